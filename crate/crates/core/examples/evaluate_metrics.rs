// Chamfer and point-to-surface distance of a noisy reconstruction.

use nalgebra::Matrix3;
use peelmap::codec::{decode_pointcloud, encode_peeled};
use peelmap::geometry::{PinholeCamera, RigidTransform, Vec3};
use peelmap::metrics::{chamfer_distance, evaluate_stack, point_to_surface, sample_surface};
use peelmap::shapes;

pub fn run_example() -> peelmap::Result<()> {
    let gt = shapes::icosphere(1.0, 4);
    let camera = PinholeCamera::centered(120.0, 96, 96)?.with_pose(RigidTransform::new(
        Matrix3::identity(),
        Vec3::new(0.0, 0.0, 3.0),
    )?);

    let exact = encode_peeled(&gt, &camera, 4)?;
    let self_report = evaluate_stack(&exact, &gt)?;
    println!(
        "ground truth vs itself: CD {:.2e}, P2S {:.2e}",
        self_report.chamfer, self_report.p2s
    );

    // a reconstruction that is 2 cm too large
    let pred = encode_peeled(&shapes::icosphere(1.02, 4), &camera, 4)?;
    let report = evaluate_stack(&pred, &gt)?;
    println!(
        "inflated sphere: CD {:.2e}, P2S {:.4}",
        report.chamfer, report.p2s
    );

    let samples = sample_surface(&gt, 5000, 1)?;
    let cloud = decode_pointcloud(&pred);
    println!(
        "against 5000 area samples: CD {:.2e}, P2S {:.4}",
        chamfer_distance(&cloud, &samples)?,
        point_to_surface(&cloud, &gt)?
    );
    Ok(())
}

fn main() {
    run_example().expect("example failed");
}
