//! Residual deformation of a body-prior peeled stack and mask-gated fusion
//! with directly predicted peeled depths.
//!
//! A residual deformation (RD) is a signed per-pixel, per-layer depth offset
//! that moves prior depths onto the clothed surface. Each RD cell carries an
//! explicit validity flag: offsets are signed, so the sign of the offset
//! cannot double as the "defined here" test.

use crate::codec::{PeeledMapStack, BACKGROUND};
use crate::error::{Error, Result};
use crate::geometry::PinholeCamera;

/// Default bound on |δd| in metres.
pub const DEFAULT_RD_LIMIT: f64 = 0.15;

#[derive(Clone, Debug, PartialEq)]
pub struct ResidualDeformationStack {
    camera: PinholeCamera,
    layers: usize,
    delta: Vec<f64>,
    validity: Vec<bool>,
}

impl ResidualDeformationStack {
    /// Offsets must be finite and exactly zero wherever invalid.
    pub fn new(
        camera: PinholeCamera,
        layers: usize,
        delta: Vec<f64>,
        validity: Vec<bool>,
    ) -> Result<Self> {
        if layers == 0 {
            return Err(Error::invalid("layers", "must be at least 1"));
        }
        let n = layers * camera.width() as usize * camera.height() as usize;
        if delta.len() != n || validity.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "RD grids have {} offsets and {} flags, expected {n}",
                delta.len(),
                validity.len()
            )));
        }
        if delta.iter().any(|d| !d.is_finite()) {
            return Err(Error::invalid("residual deformation", "non-finite offset"));
        }
        if delta.iter().zip(&validity).any(|(&d, &ok)| !ok && d != 0.0) {
            return Err(Error::invalid(
                "residual deformation",
                "non-zero offset at an invalid cell",
            ));
        }
        Ok(ResidualDeformationStack {
            camera,
            layers,
            delta,
            validity,
        })
    }

    /// All-zero, all-invalid stack.
    pub fn empty(camera: PinholeCamera, layers: usize) -> Result<Self> {
        let n = layers * camera.width() as usize * camera.height() as usize;
        Self::new(camera, layers, vec![0.0; n], vec![false; n])
    }

    pub fn camera(&self) -> &PinholeCamera {
        &self.camera
    }
    pub fn layers(&self) -> usize {
        self.layers
    }
    pub fn width(&self) -> usize {
        self.camera.width() as usize
    }
    pub fn height(&self) -> usize {
        self.camera.height() as usize
    }
    pub fn delta(&self) -> &[f64] {
        &self.delta
    }
    pub fn validity(&self) -> &[bool] {
        &self.validity
    }

    pub fn valid_count(&self) -> usize {
        self.validity.iter().filter(|&&v| v).count()
    }

    pub fn max_abs_delta(&self) -> f64 {
        self.delta.iter().fold(0.0, |m, d| m.max(d.abs()))
    }

    /// Offsets at valid cells, in grid order.
    pub fn valid_deltas(&self) -> impl Iterator<Item = f64> + '_ {
        self.delta
            .iter()
            .zip(&self.validity)
            .filter(|(_, &ok)| ok)
            .map(|(&d, _)| d)
    }
}

/// Per-layer, per-pixel selector: true where prior + RD is used.
#[derive(Clone, Debug, PartialEq)]
pub struct FusionMask {
    pub layers: usize,
    pub width: usize,
    pub height: usize,
    pub mask: Vec<bool>,
}

impl FusionMask {
    pub fn count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }
}

fn check_pair(what: &str, a: &PeeledMapStack, layers: usize, camera: &PinholeCamera) -> Result<()> {
    if a.layers() != layers || a.camera() != camera {
        return Err(Error::DimensionMismatch(format!(
            "{what}: {}x{}x{} stack does not match {}x{}x{} reference (or cameras differ)",
            a.layers(),
            a.height(),
            a.width(),
            layers,
            camera.height(),
            camera.width()
        )));
    }
    Ok(())
}

/// Ground-truth offsets `clothed − smpl`, clamped to `±rd_limit`, wherever
/// both stacks have a surface in the same layer.
pub fn compute_rd_gt(
    smpl: &PeeledMapStack,
    clothed: &PeeledMapStack,
    rd_limit: f64,
) -> Result<ResidualDeformationStack> {
    if rd_limit.is_nan() || rd_limit <= 0.0 {
        return Err(Error::invalid(
            "rd_limit",
            format!("{rd_limit} is not positive"),
        ));
    }
    check_pair("clothed", clothed, smpl.layers(), smpl.camera())?;
    let (delta, validity) = smpl
        .depth()
        .iter()
        .zip(clothed.depth())
        .map(|(&s, &c)| {
            if s > BACKGROUND && c > BACKGROUND {
                // exact in f64 for any pair of f32 depths
                ((c as f64 - s as f64).clamp(-rd_limit, rd_limit), true)
            } else {
                (0.0, false)
            }
        })
        .unzip();
    ResidualDeformationStack::new(*smpl.camera(), smpl.layers(), delta, validity)
}

/// `m = rd valid ∧ peel > 0`, cell by cell.
pub fn fusion_mask(rd: &ResidualDeformationStack, peel: &PeeledMapStack) -> Result<FusionMask> {
    check_pair("peel", peel, rd.layers(), rd.camera())?;
    Ok(FusionMask {
        layers: rd.layers(),
        width: rd.width(),
        height: rd.height(),
        mask: rd
            .validity()
            .iter()
            .zip(peel.depth())
            .map(|(&ok, &p)| ok && p > BACKGROUND)
            .collect(),
    })
}

/// Mask-gated blend before layer re-sorting: `smpl + δd` where the mask is
/// set, `peel` elsewhere.
pub fn blend_layers(
    smpl: &PeeledMapStack,
    rd: &ResidualDeformationStack,
    peel: &PeeledMapStack,
) -> Result<(FusionMask, Vec<f32>)> {
    check_pair("smpl", smpl, rd.layers(), rd.camera())?;
    let mask = fusion_mask(rd, peel)?;
    let blended = mask
        .mask
        .iter()
        .enumerate()
        .map(|(i, &m)| {
            if m {
                (smpl.depth()[i] as f64 + rd.delta()[i]) as f32
            } else {
                peel.depth()[i]
            }
        })
        .collect();
    Ok((mask, blended))
}

/// Fused peeled depths.
///
/// After blending, each pixel's layers are re-sorted ascending with
/// background (and any non-positive value) moved to the end, so the output
/// is a well-ordered peeled stack. RGB from `peel`, when present, follows
/// its depth through the permutation.
pub fn fuse_maps(
    smpl: &PeeledMapStack,
    rd: &ResidualDeformationStack,
    peel: &PeeledMapStack,
) -> Result<PeeledMapStack> {
    let (_, blended) = blend_layers(smpl, rd, peel)?;
    let layers = rd.layers();
    let n = rd.width() * rd.height();
    let src_rgb = peel.rgb();
    let mut depth = vec![BACKGROUND; layers * n];
    let mut rgb = src_rgb.map(|_| vec![0f32; 3 * layers * n]);
    let mut order: Vec<usize> = Vec::with_capacity(layers);
    for p in 0..n {
        order.clear();
        order.extend((0..layers).filter(|&l| blended[l * n + p] > 0.0));
        // stable: equal depths keep their layer order
        order.sort_by(|&a, &b| blended[a * n + p].total_cmp(&blended[b * n + p]));
        for (dst, &src) in order.iter().enumerate() {
            depth[dst * n + p] = blended[src * n + p];
            if let (Some(out), Some(inp)) = (rgb.as_mut(), src_rgb) {
                let (d, s) = (3 * (dst * n + p), 3 * (src * n + p));
                out[d..d + 3].copy_from_slice(&inp[s..s + 3]);
            }
        }
    }
    PeeledMapStack::new(*rd.camera(), layers, depth, rgb)
}
