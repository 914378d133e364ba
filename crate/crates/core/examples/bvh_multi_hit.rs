// Every crossing of a ray with a closed mesh, front to back.

use peelmap::geometry::{Bvh, Ray, Vec3};
use peelmap::shapes;

pub fn run_example() -> peelmap::Result<()> {
    let mesh = shapes::icosphere(1.0, 3).merge(&shapes::icosphere(0.5, 2));
    let bvh = Bvh::build(&mesh)?;
    println!(
        "{} faces, {} BVH nodes",
        mesh.face_count(),
        bvh.nodes().len()
    );

    let ray = Ray::new(Vec3::new(0.0, 0.0, -3.0), Vec3::z())?;
    let hits = bvh.intersect_all(&mesh, &ray, usize::MAX);
    for h in hits.iter() {
        println!("t = {:.6}  face {}", h.t, h.face);
    }
    assert_eq!(hits.len(), 4);

    let (face, d2) = bvh.closest_face(&mesh, &Vec3::new(0.0, 2.0, 0.0));
    println!("closest face to (0, 2, 0): {face} at {:.4}", d2.sqrt());
    Ok(())
}

fn main() {
    run_example().expect("example failed");
}
