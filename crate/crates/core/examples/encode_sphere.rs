// Encode a coloured sphere into four peeled depth/RGB layers and export
// PNG previews.

use nalgebra::Matrix3;
use peelmap::codec::encode_peeled;
use peelmap::geometry::{PinholeCamera, RigidTransform, Vec3};
use peelmap::io::{export_depth_png, save_stack};
use peelmap::shapes;

pub fn run_example() -> peelmap::Result<()> {
    let mesh = shapes::paint_by_position(&shapes::icosphere(1.0, 4));
    let camera = PinholeCamera::centered(220.0, 255, 255)?.with_pose(RigidTransform::new(
        Matrix3::identity(),
        Vec3::new(0.0, 0.0, 2.5),
    )?);
    let stack = encode_peeled(&mesh, &camera, 4)?;

    let centre: Vec<f32> = (0..4).map(|l| stack.depth_at(l, 127, 127)).collect();
    println!("centre pixel depths: {centre:?}");
    println!(
        "first-layer colour: {:?}",
        stack.rgb_at(0, 127, 127).unwrap()
    );

    let dir = tempfile::tempdir()?;
    save_stack(&dir.path().join("sphere.peel"), &stack)?;
    for layer in 0..2 {
        export_depth_png(
            &stack,
            layer,
            1.0,
            4.0,
            &dir.path().join(format!("layer{layer}.png")),
        )?;
    }
    println!(
        "wrote sphere.peel, sphere.camera.json and 2 PNGs to {}",
        dir.path().display()
    );
    Ok(())
}

fn main() {
    run_example().expect("example failed");
}
