//! Training objectives evaluated deterministically on map stacks.
//!
//! Every per-layer term is an L1 norm divided by the pixel count (and by the
//! channel count for RGB), so values do not depend on the map resolution.
//! Scalar terms sum the per-layer values.

use serde::{Deserialize, Serialize};

use crate::codec::PeeledMapStack;
use crate::error::{Error, Result};
use crate::fusion::ResidualDeformationStack;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LossWeights {
    pub lambda_rd: f64,
    pub lambda_rgb: f64,
    pub lambda_sm: f64,
}

impl Default for LossWeights {
    fn default() -> Self {
        LossWeights {
            lambda_rd: 1.0,
            lambda_rgb: 0.1,
            lambda_sm: 0.001,
        }
    }
}

impl LossWeights {
    pub fn new(lambda_rd: f64, lambda_rgb: f64, lambda_sm: f64) -> Result<Self> {
        for (name, w) in [
            ("lambda_rd", lambda_rd),
            ("lambda_rgb", lambda_rgb),
            ("lambda_sm", lambda_sm),
        ] {
            if !(w >= 0.0 && w.is_finite()) {
                return Err(Error::invalid("loss weight", format!("{name} = {w}")));
            }
        }
        Ok(LossWeights {
            lambda_rd,
            lambda_rgb,
            lambda_sm,
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PerLayerLosses {
    pub peel: Vec<f64>,
    pub rd: Vec<f64>,
    pub sm: Vec<f64>,
    /// Entry 0 is always 0: the first RGB layer is the input image.
    pub rgb: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LossReport {
    pub l_peel: f64,
    pub l_rd: f64,
    pub l_sm: f64,
    pub l_rgb: f64,
    pub total: f64,
    pub per_layer: PerLayerLosses,
}

/// Inputs for the combined objective.
#[derive(Clone, Copy, Debug)]
pub struct LossInputs<'a> {
    pub pred_peel: &'a PeeledMapStack,
    pub gt_peel: &'a PeeledMapStack,
    pub pred_rd: &'a ResidualDeformationStack,
    pub gt_rd: &'a ResidualDeformationStack,
    pub smpl: &'a PeeledMapStack,
}

fn check_dims(what: &str, a: (usize, usize, usize), b: (usize, usize, usize)) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch(format!(
            "{what}: {}x{}x{} vs {}x{}x{}",
            a.0, a.1, a.2, b.0, b.1, b.2
        )));
    }
    Ok(())
}

fn dims(s: &PeeledMapStack) -> (usize, usize, usize) {
    (s.layers(), s.height(), s.width())
}

fn rd_dims(s: &ResidualDeformationStack) -> (usize, usize, usize) {
    (s.layers(), s.height(), s.width())
}

fn mean_abs_diff(a: impl Iterator<Item = f64>, b: impl Iterator<Item = f64>, count: usize) -> f64 {
    a.zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>() / count as f64
}

/// Per-layer mean |pred − gt| of peeled depths.
pub fn loss_peel(pred: &PeeledMapStack, gt: &PeeledMapStack) -> Result<Vec<f64>> {
    check_dims("peel loss", dims(pred), dims(gt))?;
    let n = pred.pixels_per_layer();
    Ok((0..pred.layers())
        .map(|l| {
            mean_abs_diff(
                pred.depth_layer(l).iter().map(|&d| d as f64),
                gt.depth_layer(l).iter().map(|&d| d as f64),
                n,
            )
        })
        .collect())
}

/// Per-layer mean |δd_pred − δd_gt|; invalid cells count as zero offset.
pub fn loss_rd(pred: &ResidualDeformationStack, gt: &ResidualDeformationStack) -> Result<Vec<f64>> {
    check_dims("RD loss", rd_dims(pred), rd_dims(gt))?;
    let n = pred.width() * pred.height();
    let masked = |s: &ResidualDeformationStack, l: usize| {
        let range = l * n..(l + 1) * n;
        s.delta()[range.clone()]
            .iter()
            .zip(&s.validity()[range])
            .map(|(&d, &ok)| if ok { d } else { 0.0 })
            .collect::<Vec<_>>()
    };
    Ok((0..pred.layers())
        .map(|l| mean_abs_diff(masked(pred, l).into_iter(), masked(gt, l).into_iter(), n))
        .collect())
}

/// Central-difference gradients with replicate padding.
fn gradients(img: &[f64], w: usize, h: usize) -> (Vec<f64>, Vec<f64>) {
    let at = |u: usize, v: usize| img[v * w + u];
    let mut gx = vec![0.0; w * h];
    let mut gy = vec![0.0; w * h];
    for v in 0..h {
        for u in 0..w {
            let (ul, ur) = (u.saturating_sub(1), (u + 1).min(w - 1));
            let (vu, vd) = (v.saturating_sub(1), (v + 1).min(h - 1));
            gx[v * w + u] = (at(ur, v) - at(ul, v)) / 2.0;
            gy[v * w + u] = (at(u, vd) - at(u, vu)) / 2.0;
        }
    }
    (gx, gy)
}

/// Per-layer L1 distance between the spatial gradients of `gt δd + smpl`
/// and `pred δd + smpl`: mean |Δ∂x| + mean |Δ∂y|.
pub fn loss_smooth(
    pred: &ResidualDeformationStack,
    gt: &ResidualDeformationStack,
    smpl: &PeeledMapStack,
) -> Result<Vec<f64>> {
    check_dims("smoothness loss", rd_dims(pred), rd_dims(gt))?;
    check_dims("smoothness loss", rd_dims(pred), dims(smpl))?;
    let (w, h) = (pred.width(), pred.height());
    let n = w * h;
    let composite = |rd: &ResidualDeformationStack, l: usize| -> Vec<f64> {
        (0..n)
            .map(|p| {
                let i = l * n + p;
                let d = if rd.validity()[i] { rd.delta()[i] } else { 0.0 };
                d + smpl.depth()[i] as f64
            })
            .collect()
    };
    Ok((0..pred.layers())
        .map(|l| {
            let (gx_t, gy_t) = gradients(&composite(gt, l), w, h);
            let (gx_p, gy_p) = gradients(&composite(pred, l), w, h);
            mean_abs_diff(gx_t.into_iter(), gx_p.into_iter(), n)
                + mean_abs_diff(gy_t.into_iter(), gy_p.into_iter(), n)
        })
        .collect())
}

/// Per-layer mean |pred − gt| over RGB channels for layers 2.. (index 1..);
/// the first layer's entry is 0.
pub fn loss_rgb(pred: &PeeledMapStack, gt: &PeeledMapStack) -> Result<Vec<f64>> {
    check_dims("RGB loss", dims(pred), dims(gt))?;
    let (Some(a), Some(b)) = (pred.rgb(), gt.rgb()) else {
        return Err(Error::MissingRgb);
    };
    let n = 3 * pred.pixels_per_layer();
    Ok((0..pred.layers())
        .map(|l| {
            if l == 0 {
                return 0.0;
            }
            let r = l * n..(l + 1) * n;
            mean_abs_diff(
                a[r.clone()].iter().map(|&c| c as f64),
                b[r].iter().map(|&c| c as f64),
                n,
            )
        })
        .collect())
}

/// `L = L_peel + λ_rd·L_rd + λ_rgb·L_rgb + λ_sm·L_sm`.
pub fn total_loss(inputs: &LossInputs<'_>, weights: &LossWeights) -> Result<LossReport> {
    let per_layer = PerLayerLosses {
        peel: loss_peel(inputs.pred_peel, inputs.gt_peel)?,
        rd: loss_rd(inputs.pred_rd, inputs.gt_rd)?,
        sm: loss_smooth(inputs.pred_rd, inputs.gt_rd, inputs.smpl)?,
        rgb: loss_rgb(inputs.pred_peel, inputs.gt_peel)?,
    };
    check_dims(
        "loss inputs",
        dims(inputs.pred_peel),
        rd_dims(inputs.pred_rd),
    )?;
    let sum = |v: &[f64]| v.iter().sum::<f64>();
    let (l_peel, l_rd, l_sm, l_rgb) = (
        sum(&per_layer.peel),
        sum(&per_layer.rd),
        sum(&per_layer.sm),
        sum(&per_layer.rgb),
    );
    let total =
        l_peel + weights.lambda_rd * l_rd + weights.lambda_rgb * l_rgb + weights.lambda_sm * l_sm;
    Ok(LossReport {
        l_peel,
        l_rd,
        l_sm,
        l_rgb,
        total,
        per_layer,
    })
}
