use std::fmt::Write;

use crate::error::{Error, Result};
use crate::geometry::{TriangleMesh, Vec3};

/// Parses `v` and `f` records. Vertices may carry an RGB triple
/// (`v x y z r g b`, channels in `[0, 1]`); either all or none must.
/// Polygons are fan-triangulated, texture/normal indices ignored.
pub fn parse_obj(text: &str) -> Result<TriangleMesh> {
    let mut vertices = Vec::new();
    let mut colors: Vec<[f32; 3]> = Vec::new();
    let mut faces = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let err = |msg: String| Error::format("obj", format!("line {}: {msg}", lineno + 1));
        let mut tokens = line.split_whitespace();
        match tokens.next() {
            Some("v") => {
                let vals: Vec<f64> = tokens
                    .map(|t| t.parse::<f64>().map_err(|e| err(format!("{t}: {e}"))))
                    .collect::<Result<_>>()?;
                match vals.len() {
                    3 | 4 => {}
                    6 | 7 => colors.push([vals[3] as f32, vals[4] as f32, vals[5] as f32]),
                    n => return Err(err(format!("vertex with {n} values"))),
                }
                vertices.push(Vec3::new(vals[0], vals[1], vals[2]));
            }
            Some("f") => {
                let idx: Vec<usize> = tokens
                    .map(|t| {
                        let head = t.split('/').next().unwrap_or("");
                        let i: i64 = head.parse().map_err(|e| err(format!("{t}: {e}")))?;
                        let n = vertices.len() as i64;
                        let resolved = if i > 0 { i - 1 } else { n + i };
                        if i == 0 || resolved < 0 {
                            return Err(err(format!("bad vertex index {i}")));
                        }
                        Ok(resolved as usize)
                    })
                    .collect::<Result<_>>()?;
                if idx.len() < 3 {
                    return Err(err("face with fewer than 3 vertices".into()));
                }
                for k in 1..idx.len() - 1 {
                    faces.push([idx[0], idx[k], idx[k + 1]]);
                }
            }
            _ => {}
        }
    }
    let colors = match colors.len() {
        0 => None,
        n if n == vertices.len() => Some(colors),
        _ => return Err(Error::format("obj", "only some vertices carry colours")),
    };
    TriangleMesh::new(vertices, faces, colors).map_err(|e| Error::format("obj", e.to_string()))
}

/// Writes vertices (with colours when present) and the valid faces.
/// Coordinates use the shortest decimal form that reads back bit-exact.
pub fn write_obj(mesh: &TriangleMesh) -> String {
    let mut out = String::new();
    let colors = mesh.colors();
    for (i, v) in mesh.vertices().iter().enumerate() {
        match colors {
            Some(c) => {
                let [r, g, b] = c[i];
                writeln!(out, "v {} {} {} {} {} {}", v.x, v.y, v.z, r, g, b).unwrap();
            }
            None => writeln!(out, "v {} {} {}", v.x, v.y, v.z).unwrap(),
        }
    }
    for (f, _) in mesh
        .faces()
        .iter()
        .zip(mesh.face_valid())
        .filter(|(_, &ok)| ok)
    {
        writeln!(out, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1).unwrap();
    }
    out
}
