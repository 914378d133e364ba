//! Reconstruction metrics: symmetric Chamfer distance between point sets
//! and point-to-surface distance against a mesh.
//!
//! Chamfer averages *squared* nearest-neighbour distances; P2S averages
//! *unsquared* point-to-triangle distances. Per-point terms are computed in
//! parallel and reduced with a fixed pairwise tree, so results are identical
//! for any number of workers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::codec::{decode_pointcloud, encode_peeled, ColoredPointCloud, PeeledMapStack};
use crate::error::{Error, Result};
use crate::geometry::{Bvh, TriangleMesh, Vec3};
use crate::kdtree::KdTree;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    /// `(pred_to_gt + gt_to_pred) / 2`, m².
    pub chamfer: f64,
    /// Mean distance from predicted points to the ground-truth surface, m.
    pub p2s: f64,
    /// Mean squared distance from each predicted point to its nearest
    /// ground-truth point.
    pub pred_to_gt: f64,
    pub gt_to_pred: f64,
}

/// Sum with a fixed binary reduction tree.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 8 {
        return values.iter().sum();
    }
    let (a, b) = values.split_at(values.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

fn mean(values: &[f64]) -> f64 {
    pairwise_sum(values) / values.len() as f64
}

/// Mean squared distance from each point of `from` to its nearest point in
/// `to`.
pub fn directed_chamfer(from: &[Vec3], to: &[Vec3]) -> Result<f64> {
    if from.is_empty() || to.is_empty() {
        return Err(Error::EmptyCloud);
    }
    let tree = KdTree::build(to);
    let d: Vec<f64> = from
        .par_iter()
        .map(|p| tree.nearest(p).expect("non-empty tree").1)
        .collect();
    Ok(mean(&d))
}

/// Returns `(chamfer, a_to_b, b_to_a)`.
pub fn chamfer_terms(a: &ColoredPointCloud, b: &ColoredPointCloud) -> Result<(f64, f64, f64)> {
    let ab = directed_chamfer(&a.points, &b.points)?;
    let ba = directed_chamfer(&b.points, &a.points)?;
    Ok(((ab + ba) / 2.0, ab, ba))
}

pub fn chamfer_distance(a: &ColoredPointCloud, b: &ColoredPointCloud) -> Result<f64> {
    Ok(chamfer_terms(a, b)?.0)
}

/// Distance from every point to the closest valid face of `mesh`.
pub fn surface_distances(points: &[Vec3], mesh: &TriangleMesh, bvh: &Bvh) -> Vec<f64> {
    points
        .par_iter()
        .map(|p| bvh.closest_face(mesh, p).1.sqrt())
        .collect()
}

/// Mean unsquared point-to-triangle distance, minimised over all faces.
pub fn point_to_surface(cloud: &ColoredPointCloud, mesh: &TriangleMesh) -> Result<f64> {
    if cloud.is_empty() {
        return Err(Error::EmptyCloud);
    }
    let bvh = Bvh::build(mesh)?;
    Ok(mean(&surface_distances(&cloud.points, mesh, &bvh)))
}

/// Full report for a predicted cloud against a ground-truth cloud (sampled
/// from `gt_mesh`) and the mesh itself.
pub fn evaluate(
    pred: &ColoredPointCloud,
    gt_cloud: &ColoredPointCloud,
    gt_mesh: &TriangleMesh,
) -> Result<MetricReport> {
    let (chamfer, pred_to_gt, gt_to_pred) = chamfer_terms(pred, gt_cloud)?;
    Ok(MetricReport {
        chamfer,
        p2s: point_to_surface(pred, gt_mesh)?,
        pred_to_gt,
        gt_to_pred,
    })
}

/// Report for a predicted stack. The ground-truth cloud is the mesh encoded
/// through the same camera and layer count, so both clouds are sampled by
/// the same pixel rays.
pub fn evaluate_stack(pred: &PeeledMapStack, gt_mesh: &TriangleMesh) -> Result<MetricReport> {
    let gt = encode_peeled(gt_mesh, pred.camera(), pred.layers())?;
    evaluate(&decode_pointcloud(pred), &decode_pointcloud(&gt), gt_mesh)
}

/// `count` points drawn uniformly by area over the valid faces.
pub fn sample_surface(mesh: &TriangleMesh, count: usize, seed: u64) -> Result<ColoredPointCloud> {
    let faces: Vec<usize> = (0..mesh.face_count())
        .filter(|&f| mesh.is_face_valid(f))
        .collect();
    if faces.is_empty() {
        return Err(Error::EmptyMesh);
    }
    let mut cumulative = Vec::with_capacity(faces.len());
    let mut acc = 0.0;
    for &f in &faces {
        acc += mesh.face_area(f);
        cumulative.push(acc);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(count);
    let mut colors = mesh.colors().map(|_| Vec::with_capacity(count));
    for _ in 0..count {
        let x = rng.random::<f64>() * acc;
        let k = cumulative.partition_point(|&c| c <= x).min(faces.len() - 1);
        let (mut r1, mut r2) = (rng.random::<f64>(), rng.random::<f64>());
        if r1 + r2 > 1.0 {
            r1 = 1.0 - r1;
            r2 = 1.0 - r2;
        }
        let [a, b, c] = mesh.triangle(faces[k]);
        points.push(a + (b - a) * r1 + (c - a) * r2);
        if let Some(colors) = colors.as_mut() {
            colors.push(mesh.color_at(faces[k], r1, r2).expect("mesh has colours"));
        }
    }
    Ok(ColoredPointCloud {
        points,
        colors,
        layer_ids: None,
    })
}
