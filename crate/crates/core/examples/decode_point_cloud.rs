// Back-project a peeled stack into a coloured point cloud, check it lies on
// the source surface and subsample it.

use nalgebra::Rotation3;
use peelmap::codec::{decode_pointcloud, encode_peeled, subsample_uniform};
use peelmap::geometry::{PinholeCamera, RigidTransform, Vec3};
use peelmap::io::save_cloud;
use peelmap::metrics::point_to_surface;
use peelmap::shapes;

pub fn run_example() -> peelmap::Result<()> {
    let mesh = shapes::paint_by_position(&shapes::torus(0.8, 0.3, 48, 24));
    let tilt = Rotation3::from_euler_angles(1.1, 0.0, 0.2).into_inner();
    let camera = PinholeCamera::centered(150.0, 128, 128)?
        .with_pose(RigidTransform::new(tilt, Vec3::new(0.0, 0.0, 3.0))?);
    let stack = encode_peeled(&mesh, &camera, 4)?;
    let cloud = decode_pointcloud(&stack);
    println!(
        "{} points from {} non-empty pixels",
        cloud.len(),
        stack.nonzero_count()
    );
    println!(
        "point-to-surface: {:.2e} m",
        point_to_surface(&cloud, &mesh)?
    );

    let small = subsample_uniform(&cloud, 1000, 7)?;
    let dir = tempfile::tempdir()?;
    save_cloud(&dir.path().join("torus.ply"), &small)?;
    println!("kept {} points in torus.ply", small.len());
    Ok(())
}

fn main() {
    run_example().expect("example failed");
}
