//! PEEL container.
//!
//! ```text
//! offset  size  field
//! 0       4     magic "PEEL"
//! 4       1     version (1)
//! 5       1     flags: bit0 RGB grid present, bit1 signed-delta payload
//! 6       2     layers      (u16 LE)
//! 8       4     width       (u32 LE)
//! 12      4     height      (u32 LE)
//! 16      ...   layers*height*width f32 LE, layer by layer, row-major
//!               then, if bit0, the RGB grid likewise (3 interleaved f32 per pixel)
//!               then, if bit1, a validity bitmap of layers*height*width bits,
//!               LSB-first, padded to a whole byte
//! ```
//!
//! Intrinsics and pose live in a JSON sidecar `<name>.camera.json`.

use std::fs;
use std::path::{Path, PathBuf};

use super::write_atomic;
use crate::codec::PeeledMapStack;
use crate::error::{Error, Result};
use crate::fusion::ResidualDeformationStack;
use crate::geometry::PinholeCamera;

pub const MAGIC: &[u8; 4] = b"PEEL";
pub const VERSION: u8 = 1;
pub const FLAG_RGB: u8 = 1 << 0;
pub const FLAG_SIGNED_DELTA: u8 = 1 << 1;

const HEADER_LEN: usize = 16;

/// Raw container contents, independent of what the grids mean.
#[derive(Clone, Debug, PartialEq)]
pub struct PeelContainer {
    pub layers: u16,
    pub width: u32,
    pub height: u32,
    pub values: Vec<f32>,
    pub rgb: Option<Vec<f32>>,
    /// Present exactly when the signed-delta flag is set.
    pub validity: Option<Vec<bool>>,
}

impl PeelContainer {
    pub fn flags(&self) -> u8 {
        let mut f = 0;
        if self.rgb.is_some() {
            f |= FLAG_RGB;
        }
        if self.validity.is_some() {
            f |= FLAG_SIGNED_DELTA;
        }
        f
    }

    fn cells(&self) -> usize {
        self.layers as usize * self.width as usize * self.height as usize
    }
}

pub fn encode_container(c: &PeelContainer) -> Vec<u8> {
    let n = c.cells();
    assert_eq!(c.values.len(), n, "value grid size");
    let mut out = Vec::with_capacity(HEADER_LEN + 4 * n);
    out.extend_from_slice(MAGIC);
    out.push(VERSION);
    out.push(c.flags());
    out.extend_from_slice(&c.layers.to_le_bytes());
    out.extend_from_slice(&c.width.to_le_bytes());
    out.extend_from_slice(&c.height.to_le_bytes());
    for v in &c.values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    if let Some(rgb) = &c.rgb {
        assert_eq!(rgb.len(), 3 * n, "rgb grid size");
        for v in rgb {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    if let Some(valid) = &c.validity {
        assert_eq!(valid.len(), n, "validity grid size");
        let mut bits = vec![0u8; n.div_ceil(8)];
        for (i, _) in valid.iter().enumerate().filter(|(_, &v)| v) {
            bits[i / 8] |= 1 << (i % 8);
        }
        out.extend_from_slice(&bits);
    }
    out
}

pub fn decode_container(bytes: &[u8]) -> Result<PeelContainer> {
    let bad = |reason: String| Error::format("PEEL", reason);
    if bytes.len() < HEADER_LEN || &bytes[..4] != MAGIC {
        return Err(bad("missing PEEL magic".into()));
    }
    if bytes[4] != VERSION {
        return Err(bad(format!("unsupported version {}", bytes[4])));
    }
    let flags = bytes[5];
    if flags & !(FLAG_RGB | FLAG_SIGNED_DELTA) != 0 {
        return Err(bad(format!("unknown flag bits {flags:#04x}")));
    }
    let layers = u16::from_le_bytes([bytes[6], bytes[7]]);
    let width = u32::from_le_bytes(bytes[8..12].try_into().unwrap());
    let height = u32::from_le_bytes(bytes[12..16].try_into().unwrap());
    let n = (layers as usize)
        .checked_mul(width as usize)
        .and_then(|x| x.checked_mul(height as usize))
        .ok_or_else(|| bad("grid size overflows".into()))?;
    let has_rgb = flags & FLAG_RGB != 0;
    let has_valid = flags & FLAG_SIGNED_DELTA != 0;
    let expected = HEADER_LEN
        + 4 * n
        + if has_rgb { 12 * n } else { 0 }
        + if has_valid { n.div_ceil(8) } else { 0 };
    if bytes.len() != expected {
        return Err(bad(format!(
            "expected {expected} bytes, found {}",
            bytes.len()
        )));
    }
    let floats = |from: usize, count: usize| -> Vec<f32> {
        bytes[from..from + 4 * count]
            .chunks_exact(4)
            .map(|b| f32::from_le_bytes(b.try_into().unwrap()))
            .collect()
    };
    let values = floats(HEADER_LEN, n);
    let mut at = HEADER_LEN + 4 * n;
    let rgb = has_rgb.then(|| {
        let v = floats(at, 3 * n);
        at += 12 * n;
        v
    });
    let validity = has_valid.then(|| {
        (0..n)
            .map(|i| bytes[at + i / 8] >> (i % 8) & 1 == 1)
            .collect()
    });
    Ok(PeelContainer {
        layers,
        width,
        height,
        values,
        rgb,
        validity,
    })
}

/// `<dir>/<stem>.camera.json` for `<dir>/<stem>.<ext>`.
pub fn camera_sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("camera.json")
}

pub fn read_camera(path: &Path) -> Result<PinholeCamera> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::format("camera JSON", e.to_string()))
}

pub fn write_camera(path: &Path, camera: &PinholeCamera) -> Result<()> {
    let mut text = serde_json::to_string_pretty(camera).expect("camera serialises");
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

fn layers_u16(layers: usize) -> Result<u16> {
    u16::try_from(layers).map_err(|_| Error::invalid("layers", "more than 65535 layers"))
}

impl PeeledMapStack {
    pub fn to_container(&self) -> Result<PeelContainer> {
        Ok(PeelContainer {
            layers: layers_u16(self.layers())?,
            width: self.width() as u32,
            height: self.height() as u32,
            values: self.depth().to_vec(),
            rgb: self.rgb().map(<[f32]>::to_vec),
            validity: None,
        })
    }

    pub fn from_container(c: PeelContainer, camera: PinholeCamera) -> Result<Self> {
        if c.validity.is_some() {
            return Err(Error::format(
                "PEEL",
                "file holds residual deformations, not depths",
            ));
        }
        check_camera(&c, &camera)?;
        PeeledMapStack::new(camera, c.layers as usize, c.values, c.rgb)
            .map_err(|e| Error::format("PEEL", e.to_string()))
    }
}

impl ResidualDeformationStack {
    pub fn to_container(&self) -> Result<PeelContainer> {
        Ok(PeelContainer {
            layers: layers_u16(self.layers())?,
            width: self.width() as u32,
            height: self.height() as u32,
            values: self.delta().iter().map(|&d| d as f32).collect(),
            rgb: None,
            validity: Some(self.validity().to_vec()),
        })
    }

    pub fn from_container(c: PeelContainer, camera: PinholeCamera) -> Result<Self> {
        check_camera(&c, &camera)?;
        let Some(validity) = c.validity else {
            return Err(Error::format(
                "PEEL",
                "file holds depths, not residual deformations",
            ));
        };
        let delta = c.values.iter().map(|&d| d as f64).collect();
        ResidualDeformationStack::new(camera, c.layers as usize, delta, validity)
            .map_err(|e| Error::format("PEEL", e.to_string()))
    }
}

fn check_camera(c: &PeelContainer, camera: &PinholeCamera) -> Result<()> {
    if c.width != camera.width() || c.height != camera.height() {
        return Err(Error::format(
            "PEEL",
            format!(
                "grid is {}x{} but camera sidecar says {}x{}",
                c.width,
                c.height,
                camera.width(),
                camera.height()
            ),
        ));
    }
    Ok(())
}

fn load_container(path: &Path) -> Result<(PeelContainer, PinholeCamera)> {
    let bytes = fs::read(path)?;
    let container = decode_container(&bytes)?;
    let camera = read_camera(&camera_sidecar_path(path))?;
    Ok((container, camera))
}

/// Writes the stack and its camera sidecar.
pub fn save_stack(path: &Path, stack: &PeeledMapStack) -> Result<()> {
    let bytes = encode_container(&stack.to_container()?);
    write_camera(&camera_sidecar_path(path), stack.camera())?;
    write_atomic(path, &bytes)
}

pub fn load_stack(path: &Path) -> Result<PeeledMapStack> {
    let (c, cam) = load_container(path)?;
    PeeledMapStack::from_container(c, cam)
}

pub fn save_rd(path: &Path, rd: &ResidualDeformationStack) -> Result<()> {
    let bytes = encode_container(&rd.to_container()?);
    write_camera(&camera_sidecar_path(path), rd.camera())?;
    write_atomic(path, &bytes)
}

pub fn load_rd(path: &Path) -> Result<ResidualDeformationStack> {
    let (c, cam) = load_container(path)?;
    ResidualDeformationStack::from_container(c, cam)
}
