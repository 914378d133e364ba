mod common;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use common::*;
use peelmap::codec::PeeledMapStack;
use peelmap::fusion::ResidualDeformationStack;
use peelmap::geometry::TriangleMesh;
use peelmap::io::{
    load_cloud, load_mesh, load_stack, save_mesh, save_rd, save_stack, write_camera,
};
use peelmap::shapes;

fn peelmap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_peelmap"))
        .args(args)
        .output()
        .unwrap()
}

fn code(args: &[&str]) -> i32 {
    peelmap(args).status.code().unwrap()
}

struct Workspace {
    dir: tempfile::TempDir,
}

impl Workspace {
    fn new() -> Self {
        Workspace {
            dir: tempfile::tempdir().unwrap(),
        }
    }
    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }
    fn s(&self, name: &str) -> String {
        self.path(name).to_string_lossy().into_owned()
    }
    fn mesh(&self, name: &str, mesh: &TriangleMesh) -> String {
        save_mesh(&self.path(name), mesh).unwrap();
        self.s(name)
    }
    fn camera(&self, distance: f64, w: u32, h: u32) -> String {
        write_camera(
            &self.path("camera.json"),
            &camera_facing_origin(distance, w as f64, w, h),
        )
        .unwrap();
        self.s("camera.json")
    }
}

#[test]
fn help_documents_every_flag() {
    assert_eq!(code(&["--help"]), 0);
    for (sub, flags) in [
        (
            "encode",
            &[
                "--mesh", "--camera", "--layers", "--width", "--height", "--out",
            ][..],
        ),
        ("decode", &["--input", "--out"]),
        ("fuse", &["--smpl", "--rd", "--pred", "--out"]),
        ("rd-gt", &["--smpl", "--clothed", "--rd-limit", "--out"]),
        (
            "losses",
            &[
                "--pred-peel",
                "--gt-peel",
                "--pred-rd",
                "--gt-rd",
                "--smpl",
                "--lambda-rd",
                "--lambda-rgb",
                "--lambda-sm",
            ],
        ),
        ("metrics", &["--pred", "--gt-mesh", "--gt-samples", "--out"]),
        (
            "dataset",
            &[
                "--body",
                "--garment",
                "--camera",
                "--yaw",
                "--out-dir",
                "--max-interior-distance",
            ],
        ),
        ("subsample", &["--input", "--count", "--out"]),
    ] {
        let out = peelmap(&[sub, "--help"]);
        assert_eq!(out.status.code(), Some(0), "{sub}");
        let text = String::from_utf8_lossy(&out.stdout);
        for flag in flags.iter().chain(&["--threads", "--seed", "--config"]) {
            assert!(text.contains(flag), "{sub} --help lacks {flag}");
        }
    }
}

#[test]
fn encode_writes_header_and_sidecar() {
    let ws = Workspace::new();
    let mesh = ws.mesh("sphere.obj", &shapes::icosphere(1.0, 3));
    let cam = ws.camera(3.0, 64, 64);
    let out = ws.s("s.peel");
    assert_eq!(
        code(&[
            "encode", "--mesh", &mesh, "--camera", &cam, "--width", "512", "--height", "512",
            "--out", &out
        ]),
        0
    );
    let bytes = fs::read(&out).unwrap();
    assert_eq!(&bytes[..4], b"PEEL");
    assert_eq!(u16::from_le_bytes([bytes[6], bytes[7]]), 4);
    assert_eq!(u32::from_le_bytes(bytes[8..12].try_into().unwrap()), 512);
    assert_eq!(u32::from_le_bytes(bytes[12..16].try_into().unwrap()), 512);
    assert!(ws.path("s.camera.json").is_file());
}

#[test]
fn encode_errors() {
    let ws = Workspace::new();
    let cam = ws.camera(3.0, 16, 16);
    let mesh = ws.mesh("m.obj", &shapes::cube(1.0));
    let out = ws.s("o.peel");
    let missing = peelmap(&[
        "encode",
        "--mesh",
        &ws.s("nope.obj"),
        "--camera",
        &cam,
        "--out",
        &out,
    ]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(!missing.stderr.is_empty());
    assert_eq!(
        code(&["encode", "--mesh", &mesh, "--camera", &cam, "--layers", "0", "--out", &out]),
        3
    );
    assert_eq!(
        code(&[
            "encode",
            "--mesh",
            &mesh,
            "--camera",
            &cam,
            "--threads",
            "0",
            "--out",
            &out
        ]),
        3
    );
    assert_eq!(
        code(&["encode", "--mesh", &mesh, "--camera", &cam, "--layers", "many", "--out", &out]),
        3
    );
    assert!(!Path::new(&out).exists());
}

#[test]
fn decode_reproduces_box_depths() {
    let ws = Workspace::new();
    let mesh = ws.mesh("box.obj", &shapes::cube(1.0));
    let cam = ws.camera(3.0, 32, 32);
    assert_eq!(
        code(&[
            "encode",
            "--mesh",
            &mesh,
            "--camera",
            &cam,
            "--out",
            &ws.s("b.peel")
        ]),
        0
    );
    assert_eq!(
        code(&[
            "decode",
            "--input",
            &ws.s("b.peel"),
            "--out",
            &ws.s("b.ply")
        ]),
        0
    );
    let cloud = load_cloud(&ws.path("b.ply")).unwrap();
    assert_eq!(
        cloud.len(),
        load_stack(&ws.path("b.peel")).unwrap().nonzero_count()
    );
    // every point lies on a face of the unit cube, stored in f32
    for p in &cloud.points {
        let m = p.x.abs().max(p.y.abs()).max(p.z.abs());
        assert!((m - 0.5).abs() < 1e-5, "{p:?}");
    }
}

#[test]
fn decode_edge_cases() {
    let ws = Workspace::new();
    let cam = camera_facing_origin(3.0, 10.0, 8, 8);
    save_stack(
        &ws.path("empty.peel"),
        &PeeledMapStack::background(cam, 4, false).unwrap(),
    )
    .unwrap();
    assert_eq!(
        code(&[
            "decode",
            "--input",
            &ws.s("empty.peel"),
            "--out",
            &ws.s("e.ply")
        ]),
        0
    );
    assert!(load_cloud(&ws.path("e.ply")).unwrap().is_empty());

    let mut bytes = fs::read(ws.path("empty.peel")).unwrap();
    bytes[0] = b'X';
    fs::write(ws.path("bad.peel"), bytes).unwrap();
    fs::copy(ws.path("empty.camera.json"), ws.path("bad.camera.json")).unwrap();
    assert_eq!(
        code(&[
            "decode",
            "--input",
            &ws.s("bad.peel"),
            "--out",
            &ws.s("bad.ply")
        ]),
        2
    );
    assert!(!ws.path("bad.ply").exists());
}

#[test]
fn fuse_commands() {
    let ws = Workspace::new();
    let cam = small_camera(2, 2);
    let smpl = PeeledMapStack::new(cam, 1, vec![1.0, 2.0, 0.0, 3.0], None).unwrap();
    let rd = ResidualDeformationStack::new(
        cam,
        1,
        vec![0.1, 0.0, 0.0, -0.1],
        vec![true, false, false, true],
    )
    .unwrap();
    let pred = PeeledMapStack::new(cam, 1, vec![5.0, 5.0, 5.0, 0.0], None).unwrap();
    save_stack(&ws.path("smpl.peel"), &smpl).unwrap();
    save_rd(&ws.path("rd.peel"), &rd).unwrap();
    save_stack(&ws.path("pred.peel"), &pred).unwrap();
    let args = [
        "fuse",
        "--smpl",
        &ws.s("smpl.peel"),
        "--rd",
        &ws.s("rd.peel"),
        "--pred",
        &ws.s("pred.peel"),
        "--out",
        &ws.s("f.peel"),
    ];
    assert_eq!(code(&args), 0);
    assert_eq!(
        load_stack(&ws.path("f.peel")).unwrap().depth(),
        &[1.1, 5.0, 5.0, 0.0]
    );

    let zero = ResidualDeformationStack::new(cam, 1, vec![0.0; 4], vec![true; 4]).unwrap();
    save_rd(&ws.path("zero.peel"), &zero).unwrap();
    let args = [
        "fuse",
        "--smpl",
        &ws.s("smpl.peel"),
        "--rd",
        &ws.s("zero.peel"),
        "--pred",
        &ws.s("pred.peel"),
        "--out",
        &ws.s("z.peel"),
    ];
    assert_eq!(code(&args), 0);
    assert_eq!(
        load_stack(&ws.path("z.peel")).unwrap().depth(),
        &[1.0, 2.0, 0.0, 0.0]
    );

    save_stack(
        &ws.path("big.peel"),
        &PeeledMapStack::background(small_camera(4, 4), 1, false).unwrap(),
    )
    .unwrap();
    let args = [
        "fuse",
        "--smpl",
        &ws.s("smpl.peel"),
        "--rd",
        &ws.s("rd.peel"),
        "--pred",
        &ws.s("big.peel"),
        "--out",
        &ws.s("m.peel"),
    ];
    assert_eq!(code(&args), 3);
    assert!(!ws.path("m.peel").exists());
}

#[test]
fn rd_gt_and_losses() {
    let ws = Workspace::new();
    let cam = ws.camera(3.0, 24, 24);
    let body = ws.mesh("body.obj", &shapes::icosphere(1.0, 3));
    let cloth = ws.mesh("cloth.obj", &shapes::icosphere(1.1, 3));
    assert_eq!(
        code(&[
            "encode",
            "--mesh",
            &body,
            "--camera",
            &cam,
            "--out",
            &ws.s("b.peel")
        ]),
        0
    );
    assert_eq!(
        code(&[
            "encode",
            "--mesh",
            &cloth,
            "--camera",
            &cam,
            "--out",
            &ws.s("c.peel")
        ]),
        0
    );
    assert_eq!(
        code(&[
            "rd-gt",
            "--smpl",
            &ws.s("b.peel"),
            "--clothed",
            &ws.s("c.peel"),
            "--out",
            &ws.s("rd.peel")
        ]),
        0
    );
    assert_eq!(
        code(&[
            "rd-gt",
            "--smpl",
            &ws.s("b.peel"),
            "--clothed",
            &ws.s("c.peel"),
            "--rd-limit",
            "-1",
            "--out",
            &ws.s("x.peel")
        ]),
        3
    );

    // losses need RGB on both peeled stacks
    let out = peelmap(&[
        "losses",
        "--pred-peel",
        &ws.s("c.peel"),
        "--gt-peel",
        &ws.s("c.peel"),
        "--pred-rd",
        &ws.s("rd.peel"),
        "--gt-rd",
        &ws.s("rd.peel"),
        "--smpl",
        &ws.s("b.peel"),
    ]);
    assert_eq!(out.status.code(), Some(3));

    let painted = ws.mesh(
        "painted.obj",
        &shapes::paint_by_position(&shapes::icosphere(1.1, 3)),
    );
    assert_eq!(
        code(&[
            "encode",
            "--mesh",
            &painted,
            "--camera",
            &cam,
            "--out",
            &ws.s("p.peel")
        ]),
        0
    );
    let out = peelmap(&[
        "losses",
        "--pred-peel",
        &ws.s("p.peel"),
        "--gt-peel",
        &ws.s("p.peel"),
        "--pred-rd",
        &ws.s("rd.peel"),
        "--gt-rd",
        &ws.s("rd.peel"),
        "--smpl",
        &ws.s("b.peel"),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["total"], 0.0);
}

#[test]
fn metrics_commands() {
    let ws = Workspace::new();
    let cam = ws.camera(3.0, 64, 64);
    let mesh = ws.mesh("gt.obj", &shapes::icosphere(1.0, 3));
    assert_eq!(
        code(&[
            "encode",
            "--mesh",
            &mesh,
            "--camera",
            &cam,
            "--out",
            &ws.s("gt.peel")
        ]),
        0
    );
    assert_eq!(
        code(&[
            "metrics",
            "--pred",
            &ws.s("gt.peel"),
            "--gt-mesh",
            &mesh,
            "--out",
            &ws.s("m.json")
        ]),
        0
    );
    let v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(ws.path("m.json")).unwrap()).unwrap();
    assert!(v["chamfer"].as_f64().unwrap() < 1e-6);
    assert!(v["p2s"].as_f64().unwrap() < 1e-6);
    assert_eq!(v["CD"], v["chamfer"]);
    assert_eq!(v["P2S"], v["p2s"]);

    let cam_obj = camera_facing_origin(3.0, 10.0, 8, 8);
    save_stack(
        &ws.path("empty.peel"),
        &PeeledMapStack::background(cam_obj, 4, false).unwrap(),
    )
    .unwrap();
    assert_eq!(
        code(&["metrics", "--pred", &ws.s("empty.peel"), "--gt-mesh", &mesh]),
        3
    );
}

#[test]
fn dataset_command() {
    let ws = Workspace::new();
    let cam = ws.camera(4.0, 32, 32);
    let body = ws.mesh("body.obj", &shapes::icosphere(1.0, 2));
    let garment = ws.mesh("garment.obj", &shapes::icosphere(1.2, 3));
    let out = ws.s("data");
    assert_eq!(
        code(&[
            "dataset",
            "--body",
            &body,
            "--garment",
            &garment,
            "--camera",
            &cam,
            "--yaw",
            "45,60,-45",
            "--out-dir",
            &out
        ]),
        0
    );
    let manifest: peelmap::dataset::Manifest =
        serde_json::from_str(&fs::read_to_string(ws.path("data/manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest.samples.len(), 4);
    let clothed = load_mesh(&ws.path("data").join(&manifest.samples[0].clothed_mesh)).unwrap();
    assert_eq!(clothed.face_count(), shapes::icosphere(1.2, 3).face_count());

    assert_eq!(
        code(&[
            "dataset",
            "--body",
            &body,
            "--garment",
            &garment,
            "--camera",
            &cam,
            "--out-dir",
            &ws.s("single")
        ]),
        0
    );
    assert_eq!(
        fs::read_dir(ws.path("single"))
            .unwrap()
            .filter(|e| e
                .as_ref()
                .unwrap()
                .path()
                .extension()
                .is_some_and(|x| x == "peel"))
            .count(),
        3
    );

    fs::write(ws.path("file"), b"x").unwrap();
    assert_eq!(
        code(&[
            "dataset",
            "--body",
            &body,
            "--garment",
            &garment,
            "--camera",
            &cam,
            "--out-dir",
            &ws.s("file/sub")
        ]),
        2
    );
    assert_eq!(
        code(&[
            "dataset",
            "--body",
            &body,
            "--garment",
            &garment,
            "--camera",
            &cam,
            "--yaw",
            "x",
            "--out-dir",
            &out
        ]),
        3
    );
}

#[test]
fn subsample_command() {
    let ws = Workspace::new();
    let cam = ws.camera(3.0, 32, 32);
    let mesh = ws.mesh("s.obj", &shapes::icosphere(1.0, 2));
    assert_eq!(
        code(&[
            "encode",
            "--mesh",
            &mesh,
            "--camera",
            &cam,
            "--out",
            &ws.s("s.peel")
        ]),
        0
    );
    assert_eq!(
        code(&[
            "decode",
            "--input",
            &ws.s("s.peel"),
            "--out",
            &ws.s("s.ply")
        ]),
        0
    );
    for name in ["a.ply", "b.ply"] {
        assert_eq!(
            code(&[
                "--seed",
                "9",
                "subsample",
                "--input",
                &ws.s("s.ply"),
                "--count",
                "50",
                "--out",
                &ws.s(name)
            ]),
            0
        );
    }
    assert_eq!(
        fs::read(ws.path("a.ply")).unwrap(),
        fs::read(ws.path("b.ply")).unwrap()
    );
    assert_eq!(load_cloud(&ws.path("a.ply")).unwrap().len(), 50);
    assert_eq!(
        code(&[
            "subsample",
            "--input",
            &ws.s("s.ply"),
            "--count",
            "0",
            "--out",
            &ws.s("c.ply")
        ]),
        3
    );
}

#[test]
fn config_file_supplies_flags_and_explicit_flags_win() {
    let ws = Workspace::new();
    let cam = ws.camera(3.0, 16, 16);
    let mesh = ws.mesh("m.obj", &shapes::icosphere(1.0, 2));
    fs::write(
        ws.path("cfg.json"),
        format!(r#"{{"layers": 2, "threads": 2, "mesh": "{mesh}"}}"#),
    )
    .unwrap();
    let cfg = ws.s("cfg.json");
    assert_eq!(
        code(&[
            "--config",
            &cfg,
            "encode",
            "--camera",
            &cam,
            "--out",
            &ws.s("a.peel")
        ]),
        0
    );
    assert_eq!(load_stack(&ws.path("a.peel")).unwrap().layers(), 2);
    assert_eq!(
        code(&[
            "--config",
            &cfg,
            "encode",
            "--camera",
            &cam,
            "--layers",
            "3",
            "--out",
            &ws.s("b.peel")
        ]),
        0
    );
    assert_eq!(load_stack(&ws.path("b.peel")).unwrap().layers(), 3);

    fs::write(ws.path("bad.json"), "[1, 2]").unwrap();
    assert_eq!(
        code(&[
            "--config",
            &ws.s("bad.json"),
            "encode",
            "--camera",
            &cam,
            "--out",
            &ws.s("c.peel")
        ]),
        2
    );
}

#[test]
fn outputs_are_idempotent() {
    let ws = Workspace::new();
    let cam = ws.camera(3.0, 48, 48);
    let mesh = ws.mesh(
        "m.obj",
        &shapes::paint_by_position(&shapes::torus(0.8, 0.3, 24, 12)),
    );
    for (name, threads) in [("a.peel", "1"), ("b.peel", "3")] {
        assert_eq!(
            code(&[
                "--threads",
                threads,
                "encode",
                "--mesh",
                &mesh,
                "--camera",
                &cam,
                "--out",
                &ws.s(name)
            ]),
            0
        );
    }
    assert_eq!(
        fs::read(ws.path("a.peel")).unwrap(),
        fs::read(ws.path("b.peel")).unwrap()
    );
}
