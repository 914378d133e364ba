// Residual deformation between a body and its clothed surface, and fusion
// back into peeled depths.

use nalgebra::Matrix3;
use peelmap::codec::encode_peeled;
use peelmap::fusion::{compute_rd_gt, fuse_maps, fusion_mask, DEFAULT_RD_LIMIT};
use peelmap::geometry::{PinholeCamera, RigidTransform, Vec3};
use peelmap::shapes;

pub fn run_example() -> peelmap::Result<()> {
    let camera = PinholeCamera::centered(120.0, 96, 96)?.with_pose(RigidTransform::new(
        Matrix3::identity(),
        Vec3::new(0.0, 0.0, 3.0),
    )?);
    let body = encode_peeled(&shapes::uv_sphere(0.9, 24, 48), &camera, 4)?;
    let clothed = encode_peeled(&shapes::icosphere(1.0, 4), &camera, 4)?;

    let rd = compute_rd_gt(&body, &clothed, DEFAULT_RD_LIMIT)?;
    println!(
        "{} valid offsets, max |dd| = {:.4} m",
        rd.valid_count(),
        rd.max_abs_delta()
    );

    let mask = fusion_mask(&rd, &clothed)?;
    let fused = fuse_maps(&body, &rd, &clothed)?;
    let same = fused
        .depth()
        .iter()
        .zip(clothed.depth())
        .filter(|(a, b)| a == b)
        .count();
    println!(
        "{} masked cells; {same} of {} fused depths equal the clothed stack",
        mask.count(),
        fused.depth().len()
    );
    Ok(())
}

fn main() {
    run_example().expect("example failed");
}
