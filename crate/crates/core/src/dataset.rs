//! Ground-truth preparation: removing body faces hidden inside a garment and
//! producing rotated view stacks for training.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::codec::{encode_peeled, PeeledMapStack};
use crate::error::{Error, Result};
use crate::fusion::{compute_rd_gt, ResidualDeformationStack};
use crate::geometry::{rotate_yaw_about, Bvh, Hit, PinholeCamera, Ray, TriangleMesh, Vec3};
use crate::io::{save_mesh, save_rd, save_stack, write_atomic};

/// Launch points after the centroid sit at this fraction of the way to a
/// vertex; extra rays beyond one per vertex move further out.
const LAUNCH_OFFSET: f64 = 0.25;
const MAX_LAUNCH_OFFSET: f64 = 0.9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubtractionConfig {
    pub rays_per_face: usize,
    /// Ray reach inside the garment, m.
    pub max_interior_distance: f64,
    /// Origin offset along the ray, m.
    pub epsilon: f64,
}

impl Default for SubtractionConfig {
    fn default() -> Self {
        SubtractionConfig {
            rays_per_face: 4,
            max_interior_distance: 0.25,
            epsilon: 1e-6,
        }
    }
}

impl SubtractionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.rays_per_face == 0 {
            return Err(Error::invalid("rays_per_face", "must be at least 1"));
        }
        if !(self.max_interior_distance > 0.0 && self.max_interior_distance.is_finite()) {
            return Err(Error::invalid(
                "max_interior_distance",
                format!("{} is not a positive length", self.max_interior_distance),
            ));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(Error::invalid(
                "epsilon",
                format!("{} is not a length", self.epsilon),
            ));
        }
        Ok(())
    }
}

/// `+1.0` when most garment faces already point away from the garment
/// centroid, `-1.0` otherwise.
pub fn outward_sign(garment: &TriangleMesh) -> f64 {
    let centre = garment.centroid();
    let mut votes = 0i64;
    for f in (0..garment.face_count()).filter(|&f| garment.is_face_valid(f)) {
        let d = garment
            .face_normal(f)
            .dot(&(garment.face_centroid(f) - centre));
        if d > 0.0 {
            votes += 1;
        } else if d < 0.0 {
            votes -= 1;
        }
    }
    if votes < 0 {
        -1.0
    } else {
        1.0
    }
}

/// Interior ray origins for one garment face: the centroid, then points
/// between the centroid and each vertex in turn.
pub fn launch_points(tri: &[Vec3; 3], count: usize) -> Vec<Vec3> {
    let c = (tri[0] + tri[1] + tri[2]) / 3.0;
    (0..count)
        .map(|j| {
            if j == 0 {
                return c;
            }
            let round = (j - 1) / 3;
            let scale = (LAUNCH_OFFSET * (1 + round) as f64).min(MAX_LAUNCH_OFFSET);
            c + (tri[(j - 1) % 3] - c) * scale
        })
        .collect()
}

/// Flags body faces struck by any inward garment ray.
pub fn body_faces_inside(
    body: &TriangleMesh,
    garment: &TriangleMesh,
    cfg: &SubtractionConfig,
) -> Result<Vec<bool>> {
    cfg.validate()?;
    if garment.valid_face_count() == 0 {
        return Err(Error::EmptyMesh);
    }
    let bvh = Bvh::build(body)?;
    let sign = outward_sign(garment);
    let reach = cfg.max_interior_distance;

    let per_face: Vec<Vec<usize>> = (0..garment.face_count())
        .into_par_iter()
        .filter(|&f| garment.is_face_valid(f))
        .map_init(Vec::<Hit>::new, |buf, f| {
            let inward = -sign * garment.face_normal(f);
            let mut hit = Vec::new();
            for p in launch_points(&garment.triangle(f), cfg.rays_per_face) {
                let ray = Ray::new(p + inward * cfg.epsilon, inward).expect("unit normal");
                buf.clear();
                bvh.collect_hits(body, &ray, reach, buf);
                hit.extend(buf.iter().map(|h| h.face));
            }
            hit
        })
        .collect();

    let mut inside = vec![false; body.face_count()];
    for face in per_face.into_iter().flatten() {
        inside[face] = true;
    }
    Ok(inside)
}

/// Garment merged with the body faces no interior ray reached.
pub fn subtract_body(
    body: &TriangleMesh,
    garment: &TriangleMesh,
    cfg: &SubtractionConfig,
) -> Result<TriangleMesh> {
    let inside = body_faces_inside(body, garment, cfg)?;
    let mut kept = body.clone();
    for (f, _) in inside.iter().enumerate().filter(|(_, &hit)| hit) {
        kept.mark_invalid(f);
    }
    Ok(garment.merge(&kept.compact()))
}

/// One rotated training view.
#[derive(Clone, Debug)]
pub struct GroundTruthView {
    pub yaw_deg: f64,
    pub clothed_mesh: TriangleMesh,
    pub smpl_mesh: TriangleMesh,
    pub clothed: PeeledMapStack,
    pub smpl: PeeledMapStack,
    pub rd: ResidualDeformationStack,
}

/// Identity view followed by one view per distinct non-zero yaw, both
/// meshes rotated together about the clothed centroid.
pub fn make_ground_truth(
    clothed: &TriangleMesh,
    smpl: &TriangleMesh,
    camera: &PinholeCamera,
    layers: usize,
    rd_limit: f64,
    yaw_angles: &[f64],
) -> Result<Vec<GroundTruthView>> {
    let mut angles = vec![0.0];
    for &a in yaw_angles {
        if !a.is_finite() {
            return Err(Error::invalid("yaw", format!("{a} is not finite")));
        }
        if !angles.contains(&a) {
            angles.push(a);
        }
    }
    let pivot = clothed.centroid();
    angles
        .into_iter()
        .map(|yaw_deg| {
            let clothed_mesh = rotate_yaw_about(clothed, yaw_deg, pivot);
            let smpl_mesh = rotate_yaw_about(smpl, yaw_deg, pivot);
            let clothed = encode_peeled(&clothed_mesh, camera, layers)?;
            let smpl = encode_peeled(&smpl_mesh, camera, layers)?;
            let rd = compute_rd_gt(&smpl, &clothed, rd_limit)?;
            Ok(GroundTruthView {
                yaw_deg,
                clothed_mesh,
                smpl_mesh,
                clothed,
                smpl,
                rd,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub clothed_mesh: PathBuf,
    pub smpl_mesh: PathBuf,
    pub view_angle: f64,
    pub clothed_peel: PathBuf,
    pub smpl_peel: PathBuf,
    pub rd_peel: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub samples: Vec<ManifestEntry>,
}

/// File-name suffix for a view, e.g. `yaw45`, `yaw-45`, `yaw22.5`.
pub fn view_suffix(yaw_deg: f64) -> String {
    format!("yaw{}", yaw_deg + 0.0)
}

/// Writes every view into `out_dir` (paths in the manifest are relative to
/// it) and returns the manifest path.
pub fn write_ground_truth(views: &[GroundTruthView], out_dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(out_dir)?;
    let mut samples = Vec::with_capacity(views.len());
    for view in views {
        let s = view_suffix(view.yaw_deg);
        let entry = ManifestEntry {
            clothed_mesh: format!("clothed_{s}.obj").into(),
            smpl_mesh: format!("smpl_{s}.obj").into(),
            view_angle: view.yaw_deg,
            clothed_peel: format!("clothed_{s}.peel").into(),
            smpl_peel: format!("smpl_{s}.peel").into(),
            rd_peel: format!("rd_{s}.peel").into(),
        };
        save_mesh(&out_dir.join(&entry.clothed_mesh), &view.clothed_mesh)?;
        save_mesh(&out_dir.join(&entry.smpl_mesh), &view.smpl_mesh)?;
        save_stack(&out_dir.join(&entry.clothed_peel), &view.clothed)?;
        save_stack(&out_dir.join(&entry.smpl_peel), &view.smpl)?;
        save_rd(&out_dir.join(&entry.rd_peel), &view.rd)?;
        samples.push(entry);
    }
    let path = out_dir.join("manifest.json");
    let mut text =
        serde_json::to_string_pretty(&Manifest { samples }).expect("manifest serialises");
    text.push('\n');
    write_atomic(&path, text.as_bytes())?;
    Ok(path)
}
