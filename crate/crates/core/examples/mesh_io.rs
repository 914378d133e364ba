// OBJ and binary PLY round trips.

use peelmap::io::{load_mesh, parse_obj, save_mesh};
use peelmap::shapes;

pub fn run_example() -> peelmap::Result<()> {
    let quad = parse_obj("v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n")?;
    println!("an OBJ quad becomes {} triangles", quad.face_count());

    let mesh = shapes::paint_by_position(&shapes::cube(1.0));
    let dir = tempfile::tempdir()?;
    for name in ["cube.obj", "cube.ply"] {
        let path = dir.path().join(name);
        save_mesh(&path, &mesh)?;
        let back = load_mesh(&path)?;
        println!(
            "{name}: {} bytes, {} vertices, colours: {}",
            std::fs::metadata(&path)?.len(),
            back.vertices().len(),
            back.colors().is_some()
        );
        assert_eq!(back.faces(), mesh.faces());
    }
    Ok(())
}

fn main() {
    run_example().expect("example failed");
}
