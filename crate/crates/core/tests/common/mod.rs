//! Fixtures and brute-force oracles shared by the integration tests. The
//! oracles deliberately avoid the library's acceleration structures.

#![allow(dead_code)]

use nalgebra::{Matrix3, Rotation3};
use peelmap::codec::PeeledMapStack;
use peelmap::fusion::ResidualDeformationStack;
use peelmap::geometry::{ray_triangle, PinholeCamera, Ray, RigidTransform, TriangleMesh, Vec3};
use peelmap::shapes;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Camera at the world origin looking down +z, shifted so that the world
/// origin sits at depth `distance`.
pub fn camera_facing_origin(distance: f64, focal: f64, width: u32, height: u32) -> PinholeCamera {
    PinholeCamera::centered(focal, width, height)
        .unwrap()
        .with_pose(RigidTransform::new(Matrix3::identity(), Vec3::new(0.0, 0.0, distance)).unwrap())
}

pub fn rotated(mesh: &TriangleMesh, axis: Vec3, degrees: f64) -> TriangleMesh {
    let r = Rotation3::from_axis_angle(&nalgebra::Unit::new_normalize(axis), degrees.to_radians());
    mesh.map_vertices(|v| r * v)
}

pub fn random_vec(rng: &mut impl Rng, half: f64) -> Vec3 {
    Vec3::new(
        rng.random_range(-half..half),
        rng.random_range(-half..half),
        rng.random_range(-half..half),
    )
}

/// Unstructured triangle soup inside a cube of half-size 1.
pub fn triangle_soup(rng: &mut impl Rng, faces: usize) -> TriangleMesh {
    let mut verts = Vec::with_capacity(3 * faces);
    for _ in 0..faces {
        let c = random_vec(rng, 1.0);
        let size = rng.random_range(0.02..0.4);
        for _ in 0..3 {
            verts.push(c + random_vec(rng, size));
        }
    }
    let tris = (0..faces).map(|f| [3 * f, 3 * f + 1, 3 * f + 2]).collect();
    TriangleMesh::new(verts, tris, None).unwrap()
}

/// Icosphere with every vertex pushed radially by a random amount; shared
/// edges stay shared.
pub fn bumpy_sphere(rng: &mut impl Rng, subdivisions: u32, amplitude: f64) -> TriangleMesh {
    let base = shapes::icosphere(1.0, subdivisions);
    let scales: Vec<f64> = (0..base.vertices().len())
        .map(|_| 1.0 + rng.random_range(-amplitude..amplitude))
        .collect();
    let verts = base
        .vertices()
        .iter()
        .zip(&scales)
        .map(|(v, s)| v * *s)
        .collect();
    TriangleMesh::new(verts, base.faces().to_vec(), None).unwrap()
}

/// Every crossing of `ray` with every valid face, sorted by `(t, face)`,
/// grouped so that crossings within `tol` of a group's first `t` collapse
/// into the smallest face id.
pub fn naive_hits(mesh: &TriangleMesh, ray: &Ray, tol: f64) -> Vec<(f64, usize)> {
    let mut raw = Vec::new();
    for f in 0..mesh.face_count() {
        if !mesh.is_face_valid(f) {
            continue;
        }
        let [a, b, c] = mesh.triangle(f);
        if let Some((t, _, _)) = ray_triangle(ray, &a, &b, &c) {
            raw.push((t, f));
        }
    }
    raw.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap().then(x.1.cmp(&y.1)));
    let mut out: Vec<(f64, usize)> = Vec::new();
    let mut first_t = f64::NEG_INFINITY;
    for (t, f) in raw {
        if t - first_t < tol {
            let last = out.last_mut().unwrap();
            last.1 = last.1.min(f);
        } else {
            first_t = t;
            out.push((t, f));
        }
    }
    out
}

fn segment_distance_sq(p: &Vec3, a: &Vec3, b: &Vec3) -> f64 {
    let ab = b - a;
    let t = ((p - a).dot(&ab) / ab.norm_squared()).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm_squared()
}

/// Point–triangle distance via plane projection and edge fallbacks.
pub fn triangle_distance(p: &Vec3, a: &Vec3, b: &Vec3, c: &Vec3) -> f64 {
    let n = (b - a).cross(&(c - a));
    let n2 = n.norm_squared();
    let q = p - n * ((p - a).dot(&n) / n2);
    let inside = [(a, b), (b, c), (c, a)]
        .iter()
        .all(|(u, v)| (*v - *u).cross(&(q - *u)).dot(&n) >= 0.0);
    if inside {
        return (p - q).norm();
    }
    segment_distance_sq(p, a, b)
        .min(segment_distance_sq(p, b, c))
        .min(segment_distance_sq(p, c, a))
        .sqrt()
}

/// Mean distance to the nearest valid face, scanning every face.
pub fn brute_p2s(points: &[Vec3], mesh: &TriangleMesh) -> f64 {
    let total: f64 = points
        .iter()
        .map(|p| {
            (0..mesh.face_count())
                .filter(|&f| mesh.is_face_valid(f))
                .map(|f| {
                    let [a, b, c] = mesh.triangle(f);
                    triangle_distance(p, &a, &b, &c)
                })
                .fold(f64::INFINITY, f64::min)
        })
        .sum();
    total / points.len() as f64
}

fn brute_directed(from: &[Vec3], to: &[Vec3]) -> f64 {
    let total: f64 = from
        .iter()
        .map(|p| {
            to.iter()
                .map(|q| (p - q).norm_squared())
                .fold(f64::INFINITY, f64::min)
        })
        .sum();
    total / from.len() as f64
}

/// Symmetric mean of squared nearest-neighbour distances, O(n²).
pub fn brute_chamfer(a: &[Vec3], b: &[Vec3]) -> f64 {
    0.5 * (brute_directed(a, b) + brute_directed(b, a))
}

/// Random stack: each cell is background with probability `p_empty`,
/// otherwise uniform in `[near, far)`.
pub fn random_stack(
    rng: &mut impl Rng,
    camera: PinholeCamera,
    layers: usize,
    p_empty: f64,
    with_rgb: bool,
) -> PeeledMapStack {
    let n = layers * (camera.width() * camera.height()) as usize;
    let depth = (0..n)
        .map(|_| {
            if rng.random_bool(p_empty) {
                0.0
            } else {
                rng.random_range(0.5f32..4.0)
            }
        })
        .collect();
    let rgb = with_rgb.then(|| (0..3 * n).map(|_| rng.random::<f32>()).collect());
    PeeledMapStack::new(camera, layers, depth, rgb).unwrap()
}

/// Random well-ordered stack: per pixel, ascending depths then background.
pub fn random_ordered_stack(
    rng: &mut impl Rng,
    camera: PinholeCamera,
    layers: usize,
) -> PeeledMapStack {
    let (w, h) = (camera.width() as usize, camera.height() as usize);
    let n = w * h;
    let mut depth = vec![0f32; layers * n];
    for p in 0..n {
        let k = rng.random_range(0..=layers);
        let mut d: Vec<f32> = (0..k).map(|_| rng.random_range(0.5f32..4.0)).collect();
        d.sort_by(f32::total_cmp);
        for (l, v) in d.into_iter().enumerate() {
            depth[l * n + p] = v;
        }
    }
    PeeledMapStack::new(camera, layers, depth, None).unwrap()
}

pub fn random_rd(
    rng: &mut impl Rng,
    camera: PinholeCamera,
    layers: usize,
    limit: f64,
) -> ResidualDeformationStack {
    let n = layers * (camera.width() * camera.height()) as usize;
    let validity: Vec<bool> = (0..n).map(|_| rng.random_bool(0.7)).collect();
    let delta = validity
        .iter()
        .map(|&ok| {
            if ok {
                rng.random_range(-limit..=limit)
            } else {
                0.0
            }
        })
        .collect();
    ResidualDeformationStack::new(camera, layers, delta, validity).unwrap()
}

pub fn small_camera(w: u32, h: u32) -> PinholeCamera {
    PinholeCamera::centered(10.0, w, h).unwrap()
}

/// Per-layer mean |a − b| by explicit loops.
pub fn oracle_layer_l1(a: &[f64], b: &[f64], layers: usize, w: usize, h: usize) -> Vec<f64> {
    let mut out = Vec::new();
    for l in 0..layers {
        let mut s = 0.0;
        for v in 0..h {
            for u in 0..w {
                let i = (l * h + v) * w + u;
                s += (a[i] - b[i]).abs();
            }
        }
        out.push(s / (w * h) as f64);
    }
    out
}

/// Central-difference gradient images of one layer with replicate padding.
pub fn oracle_gradients(img: &[f64], w: usize, h: usize) -> (Vec<f64>, Vec<f64>) {
    let at = |u: isize, v: isize| {
        let u = u.clamp(0, w as isize - 1) as usize;
        let v = v.clamp(0, h as isize - 1) as usize;
        img[v * w + u]
    };
    let mut gx = vec![0.0; w * h];
    let mut gy = vec![0.0; w * h];
    for v in 0..h as isize {
        for u in 0..w as isize {
            gx[v as usize * w + u as usize] = (at(u + 1, v) - at(u - 1, v)) / 2.0;
            gy[v as usize * w + u as usize] = (at(u, v + 1) - at(u, v - 1)) / 2.0;
        }
    }
    (gx, gy)
}
