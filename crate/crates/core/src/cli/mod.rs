//! `peelmap` command-line interface.
//!
//! Exit codes: 0 on success, 2 for unreadable/unwritable/corrupt files,
//! 3 for invalid arguments or inputs.

mod commands;
mod config;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::Error;

pub use config::inject_config;

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 2;
pub const EXIT_INVALID: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "peelmap",
    version,
    about = "Peeled depth map encoding, fusion and evaluation"
)]
#[command(args_override_self = true)]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// JSON object whose keys mirror the flags; explicit flags win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ray-trace a mesh into a peeled depth (and RGB) stack.
    Encode(EncodeArgs),
    /// Back-project a stack into a PLY point cloud.
    Decode(DecodeArgs),
    /// Fuse body-prior depths and residuals with predicted peeled depths.
    Fuse(FuseArgs),
    /// Clamped residual deformation between body and clothed stacks.
    RdGt(RdGtArgs),
    /// Evaluate the training objective on stacks.
    Losses(LossesArgs),
    /// Chamfer and point-to-surface distance against a mesh.
    Metrics(MetricsArgs),
    /// Subtract the body inside a garment and write rotated ground-truth views.
    Dataset(DatasetArgs),
    /// Uniformly subsample a point cloud.
    Subsample(SubsampleArgs),
}

#[derive(Debug, Args)]
pub struct EncodeArgs {
    /// Input mesh (.obj or .ply).
    #[arg(long)]
    pub mesh: PathBuf,
    /// Camera JSON.
    #[arg(long)]
    pub camera: PathBuf,
    #[arg(long, default_value_t = crate::codec::DEFAULT_LAYERS)]
    pub layers: usize,
    /// Output width; intrinsics are rescaled from the camera file.
    #[arg(long)]
    pub width: Option<u32>,
    #[arg(long)]
    pub height: Option<u32>,
    /// Output .peel file; the camera sidecar is written next to it.
    #[arg(long)]
    pub out: PathBuf,
    /// Also write one 16-bit PNG per layer into this directory.
    #[arg(long)]
    pub png_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DecodeArgs {
    /// Input .peel file.
    #[arg(long)]
    pub input: PathBuf,
    /// Output .ply point cloud.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct FuseArgs {
    /// Body-prior depth stack.
    #[arg(long)]
    pub smpl: PathBuf,
    /// Residual deformation stack.
    #[arg(long)]
    pub rd: PathBuf,
    /// Predicted peeled depth stack.
    #[arg(long)]
    pub pred: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct RdGtArgs {
    #[arg(long)]
    pub smpl: PathBuf,
    #[arg(long)]
    pub clothed: PathBuf,
    /// Clamp for |clothed − smpl|, m.
    #[arg(long, default_value_t = crate::fusion::DEFAULT_RD_LIMIT)]
    pub rd_limit: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct LossesArgs {
    #[arg(long)]
    pub pred_peel: PathBuf,
    #[arg(long)]
    pub gt_peel: PathBuf,
    #[arg(long)]
    pub pred_rd: PathBuf,
    #[arg(long)]
    pub gt_rd: PathBuf,
    #[arg(long)]
    pub smpl: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    pub lambda_rd: f64,
    #[arg(long, default_value_t = 0.1)]
    pub lambda_rgb: f64,
    #[arg(long, default_value_t = 0.001)]
    pub lambda_sm: f64,
    /// Report path (default: standard output).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    /// Predicted point cloud (.ply) or peeled stack (.peel).
    #[arg(long)]
    pub pred: PathBuf,
    /// Ground-truth mesh.
    #[arg(long)]
    pub gt_mesh: PathBuf,
    /// Surface samples for the ground-truth cloud when `--pred` is a PLY.
    #[arg(long, default_value_t = 20_000)]
    pub gt_samples: usize,
    /// Report path (default: standard output).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DatasetArgs {
    #[arg(long)]
    pub body: PathBuf,
    #[arg(long)]
    pub garment: PathBuf,
    #[arg(long)]
    pub camera: PathBuf,
    /// Comma-separated yaw angles in degrees, e.g. "45,60,-45".
    #[arg(long, allow_hyphen_values = true, default_value = "")]
    pub yaw: String,
    #[arg(long, default_value_t = crate::codec::DEFAULT_LAYERS)]
    pub layers: usize,
    #[arg(long, default_value_t = crate::fusion::DEFAULT_RD_LIMIT)]
    pub rd_limit: f64,
    #[arg(long, default_value_t = 4)]
    pub rays_per_face: usize,
    #[arg(long, default_value_t = 0.25)]
    pub max_interior_distance: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub epsilon: f64,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct SubsampleArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub count: usize,
    #[arg(long)]
    pub out: PathBuf,
}

fn exit_code(err: &Error) -> i32 {
    if err.is_io() {
        EXIT_IO
    } else {
        EXIT_INVALID
    }
}

/// Parses `argv` (including the program name), runs the command and returns
/// the process exit code. Diagnostics go to standard error.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let argv = match inject_config(argv) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                EXIT_INVALID
            } else {
                EXIT_OK
            };
        }
    };
    match commands::execute(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
