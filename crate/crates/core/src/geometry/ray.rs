use std::ops::Deref;

use super::Vec3;
use crate::error::{Error, Result};

/// Hits at or before this ray parameter are discarded, so rays launched from
/// a surface do not re-hit it.
pub const T_MIN: f64 = 1e-6;

/// Hits closer than this in `t` are treated as one crossing (shared edges and
/// vertices).
pub const HIT_TIE_TOLERANCE: f64 = 1e-9;

// Slack on the barycentric inside test so that rays through a shared edge
// register on at least one of the adjacent faces.
const BARY_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ray {
    origin: Vec3,
    direction: Vec3,
}

impl Ray {
    /// The direction is normalised; zero or non-finite input is rejected.
    pub fn new(origin: Vec3, direction: Vec3) -> Result<Self> {
        let n = direction.norm();
        if !(n.is_finite() && n > 0.0) || !origin.iter().all(|c| c.is_finite()) {
            return Err(Error::invalid(
                "ray",
                "direction must be finite and non-zero",
            ));
        }
        Ok(Ray {
            origin,
            direction: direction / n,
        })
    }

    pub fn origin(&self) -> &Vec3 {
        &self.origin
    }

    pub fn direction(&self) -> &Vec3 {
        &self.direction
    }

    pub fn at(&self, t: f64) -> Vec3 {
        self.origin + self.direction * t
    }
}

/// One ray–surface crossing. `u` and `v` weight the face's second and third
/// vertex; `z_depth` is the hit's z coordinate in the ray's frame, which is
/// the camera-space depth for camera rays.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Hit {
    pub t: f64,
    pub face: usize,
    pub u: f64,
    pub v: f64,
    pub z_depth: f64,
}

/// Crossings ordered by strictly increasing `t`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct HitList {
    hits: Vec<Hit>,
}

impl HitList {
    /// Sorts raw crossings, merges ties and keeps the nearest `max_hits`.
    ///
    /// Crossings within [`HIT_TIE_TOLERANCE`] of the first crossing of a
    /// group collapse into the one with the smallest face id.
    pub fn from_candidates(mut raw: Vec<Hit>, max_hits: usize) -> Self {
        raw.sort_by(|a, b| a.t.total_cmp(&b.t).then(a.face.cmp(&b.face)));
        let mut hits: Vec<Hit> = Vec::with_capacity(raw.len().min(max_hits));
        let mut group_start = f64::NEG_INFINITY;
        for h in raw {
            if h.t - group_start < HIT_TIE_TOLERANCE {
                let last = hits.last_mut().expect("group has a representative");
                if h.face < last.face {
                    *last = h;
                }
                continue;
            }
            if hits.len() == max_hits {
                break;
            }
            group_start = h.t;
            hits.push(h);
        }
        HitList { hits }
    }

    pub fn into_vec(self) -> Vec<Hit> {
        self.hits
    }
}

impl Deref for HitList {
    type Target = [Hit];

    fn deref(&self) -> &[Hit] {
        &self.hits
    }
}

/// Möller–Trumbore intersection without back-face culling.
///
/// Returns `(t, u, v)` for crossings with `t > T_MIN`.
#[inline]
pub fn ray_triangle(ray: &Ray, a: &Vec3, b: &Vec3, c: &Vec3) -> Option<(f64, f64, f64)> {
    let e1 = b - a;
    let e2 = c - a;
    let p = ray.direction.cross(&e2);
    let det = e1.dot(&p);
    // grazing rays: treat anything within ~1e-12 rad of the plane as a miss
    let scale = e1.cross(&e2).norm();
    if det.is_nan() || det.abs() <= 1e-12 * scale {
        return None;
    }
    let inv = 1.0 / det;
    let s = ray.origin - a;
    let u = s.dot(&p) * inv;
    if !(-BARY_SLACK..=1.0 + BARY_SLACK).contains(&u) {
        return None;
    }
    let q = s.cross(&e1);
    let v = ray.direction.dot(&q) * inv;
    if v < -BARY_SLACK || u + v > 1.0 + BARY_SLACK {
        return None;
    }
    let t = e2.dot(&q) * inv;
    (t > T_MIN).then_some((t, u, v))
}
