// Remove body faces hidden under a garment, then write rotated
// ground-truth views with a manifest.

use nalgebra::Matrix3;
use peelmap::dataset::{make_ground_truth, subtract_body, write_ground_truth, SubtractionConfig};
use peelmap::geometry::{PinholeCamera, RigidTransform, Vec3};
use peelmap::shapes;

pub fn run_example() -> peelmap::Result<()> {
    let body = shapes::uv_sphere(1.0, 16, 32);
    let garment = shapes::hemisphere(1.15, 16, 64);
    let clothed = subtract_body(&body, &garment, &SubtractionConfig::default())?;
    println!(
        "body {} faces, garment {} faces, clothed mesh {} faces",
        body.face_count(),
        garment.face_count(),
        clothed.face_count()
    );

    let camera = PinholeCamera::centered(60.0, 64, 64)?.with_pose(RigidTransform::new(
        Matrix3::identity(),
        Vec3::new(0.0, 0.0, 3.5),
    )?);
    let views = make_ground_truth(&clothed, &body, &camera, 4, 0.15, &[45.0, 60.0, -45.0])?;
    for v in &views {
        println!("yaw {:>4}: {} valid offsets", v.yaw_deg, v.rd.valid_count());
    }

    let dir = tempfile::tempdir()?;
    let manifest = write_ground_truth(&views, dir.path())?;
    println!(
        "{}",
        std::fs::read_to_string(manifest)?
            .lines()
            .take(9)
            .collect::<Vec<_>>()
            .join("\n")
    );
    Ok(())
}

fn main() {
    run_example().expect("example failed");
}
