//! File formats: OBJ and binary PLY meshes/clouds, the PEEL map container
//! with its JSON camera sidecar, and PNG previews.
//!
//! Every writer goes through [`write_atomic`], so a failed command never
//! leaves a truncated file behind.

mod obj;
mod peel;
mod ply;
mod png_export;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

pub use obj::{parse_obj, write_obj};
pub use peel::{
    camera_sidecar_path, decode_container, encode_container, load_rd, load_stack, read_camera,
    save_rd, save_stack, write_camera, PeelContainer, FLAG_RGB, FLAG_SIGNED_DELTA, MAGIC, VERSION,
};
pub use ply::{parse_ply_cloud, parse_ply_mesh, write_ply_cloud, write_ply_mesh};
pub use png_export::{depth_layer_png, export_depth_png};

use crate::codec::ColoredPointCloud;
use crate::error::{Error, Result};
use crate::geometry::TriangleMesh;

/// Writes `bytes` to a temporary file next to `path`, then renames it into
/// place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

fn extension(path: &Path) -> String {
    path.extension()
        .and_then(|e| e.to_str())
        .unwrap_or("")
        .to_ascii_lowercase()
}

/// Loads an `.obj` or `.ply` mesh.
pub fn load_mesh(path: &Path) -> Result<TriangleMesh> {
    let bytes = fs::read(path)?;
    match extension(path).as_str() {
        "obj" => parse_obj(&String::from_utf8_lossy(&bytes)),
        "ply" => parse_ply_mesh(&bytes),
        other => Err(Error::format(
            "mesh",
            format!("unsupported extension '{other}'"),
        )),
    }
}

pub fn save_mesh(path: &Path, mesh: &TriangleMesh) -> Result<()> {
    let bytes = match extension(path).as_str() {
        "obj" => write_obj(mesh).into_bytes(),
        "ply" => write_ply_mesh(mesh),
        other => {
            return Err(Error::format(
                "mesh",
                format!("unsupported extension '{other}'"),
            ))
        }
    };
    write_atomic(path, &bytes)
}

pub fn load_cloud(path: &Path) -> Result<ColoredPointCloud> {
    parse_ply_cloud(&fs::read(path)?)
}

pub fn save_cloud(path: &Path, cloud: &ColoredPointCloud) -> Result<()> {
    write_atomic(path, &write_ply_cloud(cloud))
}
