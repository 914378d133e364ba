// Drive the command-line interface in-process: encode, decode and score.

use nalgebra::Matrix3;
use peelmap::cli;
use peelmap::geometry::{PinholeCamera, RigidTransform, Vec3};
use peelmap::io::{save_mesh, write_camera};
use peelmap::shapes;

pub fn run_example() -> peelmap::Result<()> {
    let dir = tempfile::tempdir()?;
    let p = |name: &str| dir.path().join(name).to_string_lossy().into_owned();
    save_mesh(
        dir.path().join("sphere.obj").as_path(),
        &shapes::icosphere(1.0, 3),
    )?;
    let camera = PinholeCamera::centered(80.0, 64, 64)?.with_pose(RigidTransform::new(
        Matrix3::identity(),
        Vec3::new(0.0, 0.0, 3.0),
    )?);
    write_camera(dir.path().join("camera.json").as_path(), &camera)?;

    let steps: [Vec<String>; 3] = [
        [
            "encode",
            "--mesh",
            &p("sphere.obj"),
            "--camera",
            &p("camera.json"),
            "--out",
            &p("sphere.peel"),
        ]
        .map(String::from)
        .to_vec(),
        [
            "decode",
            "--input",
            &p("sphere.peel"),
            "--out",
            &p("sphere.ply"),
        ]
        .map(String::from)
        .to_vec(),
        [
            "metrics",
            "--pred",
            &p("sphere.peel"),
            "--gt-mesh",
            &p("sphere.obj"),
            "--out",
            &p("metrics.json"),
        ]
        .map(String::from)
        .to_vec(),
    ];
    for args in steps {
        let code = cli::run(std::iter::once("peelmap".to_string()).chain(args.iter().cloned()));
        println!("peelmap {} -> exit {code}", args[0]);
        assert_eq!(code, cli::EXIT_OK);
    }
    println!(
        "{}",
        std::fs::read_to_string(dir.path().join("metrics.json"))?
    );

    let code = cli::run([
        "peelmap",
        "encode",
        "--mesh",
        "missing.obj",
        "--camera",
        "missing.json",
        "--out",
        "x.peel",
    ]);
    println!("missing input -> exit {code}");
    Ok(())
}

fn main() {
    run_example().expect("example failed");
}
