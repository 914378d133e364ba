use std::path::Path;

use serde::Serialize;

use super::{
    Cli, Command, DatasetArgs, DecodeArgs, EncodeArgs, FuseArgs, LossesArgs, MetricsArgs, RdGtArgs,
    SubsampleArgs,
};
use crate::codec::{decode_pointcloud, encode_peeled, subsample_uniform};
use crate::dataset::{make_ground_truth, subtract_body, write_ground_truth, SubtractionConfig};
use crate::error::{Error, Result};
use crate::fusion::{compute_rd_gt, fuse_maps};
use crate::io::{
    export_depth_png, load_cloud, load_mesh, load_rd, load_stack, read_camera, save_cloud, save_rd,
    save_stack, write_atomic,
};
use crate::metrics::{evaluate, evaluate_stack, sample_surface};
use crate::objectives::{total_loss, LossInputs, LossWeights};

pub(super) fn execute(cli: &Cli) -> Result<()> {
    let Some(n) = cli.threads else {
        return dispatch(cli);
    };
    if n == 0 {
        return Err(Error::invalid("threads", "must be at least 1"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .map_err(|e| Error::invalid("threads", e.to_string()))?;
    pool.install(|| dispatch(cli))
}

fn dispatch(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Encode(a) => encode(a),
        Command::Decode(a) => decode(a),
        Command::Fuse(a) => fuse(a),
        Command::RdGt(a) => rd_gt(a),
        Command::Losses(a) => losses(a),
        Command::Metrics(a) => metrics(a, cli.seed),
        Command::Dataset(a) => dataset(a),
        Command::Subsample(a) => subsample(a, cli.seed),
    }
}

fn positive(what: &'static str, n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid(what, "must be at least 1"));
    }
    Ok(())
}

fn write_json(out: Option<&Path>, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("report serialises");
    text.push('\n');
    match out {
        Some(p) => write_atomic(p, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn encode(a: &EncodeArgs) -> Result<()> {
    positive("layers", a.layers)?;
    if a.width == Some(0) || a.height == Some(0) {
        return Err(Error::invalid(
            "resolution",
            "width and height must be at least 1",
        ));
    }
    let mut camera = read_camera(&a.camera)?;
    if a.width.is_some() || a.height.is_some() {
        let w = a.width.unwrap_or(camera.width());
        let h = a.height.unwrap_or(camera.height());
        camera = camera.with_resolution(w, h)?;
    }
    let mesh = load_mesh(&a.mesh)?;
    let stack = encode_peeled(&mesh, &camera, a.layers)?;
    save_stack(&a.out, &stack)?;
    if let Some(dir) = &a.png_dir {
        std::fs::create_dir_all(dir)?;
        let far = stack.depth().iter().fold(0f32, |m, &d| m.max(d));
        for layer in 0..stack.layers() {
            export_depth_png(
                &stack,
                layer,
                0.0,
                far.max(f32::MIN_POSITIVE),
                &dir.join(format!("layer{layer}.png")),
            )?;
        }
    }
    Ok(())
}

fn decode(a: &DecodeArgs) -> Result<()> {
    let stack = load_stack(&a.input)?;
    save_cloud(&a.out, &decode_pointcloud(&stack))
}

fn fuse(a: &FuseArgs) -> Result<()> {
    let smpl = load_stack(&a.smpl)?;
    let rd = load_rd(&a.rd)?;
    let pred = load_stack(&a.pred)?;
    save_stack(&a.out, &fuse_maps(&smpl, &rd, &pred)?)
}

fn rd_gt(a: &RdGtArgs) -> Result<()> {
    if !(a.rd_limit > 0.0 && a.rd_limit.is_finite()) {
        return Err(Error::invalid(
            "rd_limit",
            format!("{} is not positive", a.rd_limit),
        ));
    }
    let smpl = load_stack(&a.smpl)?;
    let clothed = load_stack(&a.clothed)?;
    save_rd(&a.out, &compute_rd_gt(&smpl, &clothed, a.rd_limit)?)
}

fn losses(a: &LossesArgs) -> Result<()> {
    let weights = LossWeights::new(a.lambda_rd, a.lambda_rgb, a.lambda_sm)?;
    let pred_peel = load_stack(&a.pred_peel)?;
    let gt_peel = load_stack(&a.gt_peel)?;
    let pred_rd = load_rd(&a.pred_rd)?;
    let gt_rd = load_rd(&a.gt_rd)?;
    let smpl = load_stack(&a.smpl)?;
    let report = total_loss(
        &LossInputs {
            pred_peel: &pred_peel,
            gt_peel: &gt_peel,
            pred_rd: &pred_rd,
            gt_rd: &gt_rd,
            smpl: &smpl,
        },
        &weights,
    )?;
    write_json(a.out.as_deref(), &report)
}

/// Metric report with the short column names alongside the long ones.
#[derive(Serialize)]
struct MetricsOutput {
    chamfer: f64,
    p2s: f64,
    pred_to_gt: f64,
    gt_to_pred: f64,
    #[serde(rename = "CD")]
    cd: f64,
    #[serde(rename = "P2S")]
    p2s_short: f64,
}

fn is_peel(path: &Path) -> bool {
    path.extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("peel"))
}

fn metrics(a: &MetricsArgs, seed: u64) -> Result<()> {
    positive("gt_samples", a.gt_samples)?;
    let gt_mesh = load_mesh(&a.gt_mesh)?;
    let r = if is_peel(&a.pred) {
        evaluate_stack(&load_stack(&a.pred)?, &gt_mesh)?
    } else {
        let pred = load_cloud(&a.pred)?;
        evaluate(
            &pred,
            &sample_surface(&gt_mesh, a.gt_samples, seed)?,
            &gt_mesh,
        )?
    };
    write_json(
        a.out.as_deref(),
        &MetricsOutput {
            chamfer: r.chamfer,
            p2s: r.p2s,
            pred_to_gt: r.pred_to_gt,
            gt_to_pred: r.gt_to_pred,
            cd: r.chamfer,
            p2s_short: r.p2s,
        },
    )
}

fn parse_yaws(list: &str) -> Result<Vec<f64>> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::invalid("yaw", format!("'{s}' is not an angle")))
        })
        .collect()
}

fn dataset(a: &DatasetArgs) -> Result<()> {
    let cfg = SubtractionConfig {
        rays_per_face: a.rays_per_face,
        max_interior_distance: a.max_interior_distance,
        epsilon: a.epsilon,
    };
    cfg.validate()?;
    positive("layers", a.layers)?;
    if !(a.rd_limit > 0.0 && a.rd_limit.is_finite()) {
        return Err(Error::invalid(
            "rd_limit",
            format!("{} is not positive", a.rd_limit),
        ));
    }
    let yaws = parse_yaws(&a.yaw)?;
    let camera = read_camera(&a.camera)?;
    let body = load_mesh(&a.body)?;
    let garment = load_mesh(&a.garment)?;
    let clothed = subtract_body(&body, &garment, &cfg)?;
    let views = make_ground_truth(&clothed, &body, &camera, a.layers, a.rd_limit, &yaws)?;
    write_ground_truth(&views, &a.out_dir)?;
    Ok(())
}

fn subsample(a: &SubsampleArgs, seed: u64) -> Result<()> {
    positive("count", a.count)?;
    let cloud = load_cloud(&a.input)?;
    save_cloud(&a.out, &subsample_uniform(&cloud, a.count, seed)?)
}
