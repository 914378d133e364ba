use std::path::Path;

use super::write_atomic;
use crate::codec::PeeledMapStack;
use crate::error::{Error, Result};

/// 16-bit grayscale rendering of one depth layer. Depths are mapped linearly
/// from `[min, max]` onto `[0, 65535]` and clamped; background stays 0.
/// Visualisation only, the mapping is lossy.
pub fn depth_layer_png(
    stack: &PeeledMapStack,
    layer: usize,
    min: f32,
    max: f32,
) -> Result<Vec<u8>> {
    if layer >= stack.layers() {
        return Err(Error::invalid(
            "layer",
            format!("{layer} >= {}", stack.layers()),
        ));
    }
    if !min.is_finite() || !max.is_finite() || max <= min {
        return Err(Error::invalid("depth range", format!("[{min}, {max}]")));
    }
    let mut samples = Vec::with_capacity(2 * stack.pixels_per_layer());
    for &d in stack.depth_layer(layer) {
        let level = if d == 0.0 {
            0
        } else {
            (((d - min) / (max - min)).clamp(0.0, 1.0) * 65535.0).round() as u16
        };
        samples.extend_from_slice(&level.to_be_bytes());
    }
    let mut out = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut out, stack.width() as u32, stack.height() as u32);
        enc.set_color(png::ColorType::Grayscale);
        enc.set_depth(png::BitDepth::Sixteen);
        let mut writer = enc
            .write_header()
            .map_err(|e| Error::Io(std::io::Error::other(e)))?;
        writer
            .write_image_data(&samples)
            .map_err(|e| Error::Io(std::io::Error::other(e)))?;
    }
    Ok(out)
}

pub fn export_depth_png(
    stack: &PeeledMapStack,
    layer: usize,
    min: f32,
    max: f32,
    path: &Path,
) -> Result<()> {
    write_atomic(path, &depth_layer_png(stack, layer, min, max)?)
}
