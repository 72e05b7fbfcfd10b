//! `collar-grasp`: grasp planning, dataset labeling, mask evaluation and
//! synthetic trials from the command line.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 no detection,
//! 3 degenerate geometry, 4 I/O error. Errors are printed to standard
//! error as one JSON object `{"error": code, "message": text}`.

mod commands;
mod config;

use std::ops::Range;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use collar_grasp_core::Error;

use crate::config::Config;

#[derive(Debug, Parser)]
#[command(name = "collar-grasp", version, about = "Collar grasp estimation from depth and a collar mask")]
struct Cli {
    /// TOML configuration file; falls back to $COLLAR_GRASP_CONFIG.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Worker threads for parallel stages (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Plan a grasp from a depth image and a collar mask.
    Grasp(GraspArgs),
    /// Extract blue-collar masks from RGB frames and write dataset manifests.
    Label(LabelArgs),
    /// Score predicted masks against a manifest's ground truth.
    Eval(EvalArgs),
    /// Synthetic scenes and grasp trials.
    #[command(subcommand)]
    Synth(SynthCommand),
}

#[derive(Debug, Subcommand)]
#[allow(clippy::large_enum_variant)]
enum SynthCommand {
    /// Generate scene bundles.
    Gen(GenArgs),
    /// Run grasp trials on scene bundles or freshly generated seeds.
    Trial(TrialArgs),
}

/// Pipeline parameters; each overrides the matching config key.
#[derive(Debug, Args, Default)]
struct PipelineFlags {
    /// mask.link_dist: single-linkage distance, pixels.
    #[arg(long)]
    link_dist: Option<f64>,
    /// mask.dilate_radius
    #[arg(long)]
    dilate_radius: Option<usize>,
    /// mask.dilate_iters
    #[arg(long)]
    dilate_iters: Option<usize>,
    /// cloud.voxel: voxel edge, meters.
    #[arg(long)]
    voxel: Option<f64>,
    /// cloud.outlier_radius, meters.
    #[arg(long)]
    outlier_radius: Option<f64>,
    /// cloud.outlier_min: neighbors required within the outlier radius.
    #[arg(long)]
    outlier_min: Option<usize>,
    /// cloud.big_n: candidate count around the skeleton center.
    #[arg(long)]
    big_n: Option<usize>,
    /// cloud.small_n: neighborhood size for surface variation.
    #[arg(long)]
    small_n: Option<usize>,
    /// pose.approach_offset: pre-grasp stand-off, meters.
    #[arg(long)]
    approach_offset: Option<f64>,
}

impl PipelineFlags {
    fn apply(&self, c: &mut Config) {
        set(&mut c.mask.link_dist, self.link_dist);
        set(&mut c.mask.dilate_radius, self.dilate_radius);
        set(&mut c.mask.dilate_iters, self.dilate_iters);
        set(&mut c.cloud.voxel, self.voxel);
        set(&mut c.cloud.outlier_radius, self.outlier_radius);
        set(&mut c.cloud.outlier_min, self.outlier_min);
        set(&mut c.cloud.big_n, self.big_n);
        set(&mut c.cloud.small_n, self.small_n);
        set(&mut c.pose.approach_offset, self.approach_offset);
    }
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

#[derive(Debug, Args)]
struct GraspArgs {
    /// 16-bit depth PNG.
    #[arg(long)]
    depth: PathBuf,
    /// Collar mask PNG (nonzero = collar).
    #[arg(long)]
    mask: PathBuf,
    /// Camera JSON with fx, fy, cx, cy and optionally depth_scale.
    #[arg(long)]
    intrinsics: Option<PathBuf>,
    /// Camera JSON with rotation and translation; the plan is then given in
    /// the world frame.
    #[arg(long)]
    extrinsics: Option<PathBuf>,
    /// Write the plan here instead of standard output.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Write diagnostics JSON here instead of standard error.
    #[arg(long, value_name = "FILE")]
    diagnostics: Option<PathBuf>,
    /// Export the filtered collar cloud as ASCII PLY.
    #[arg(long, value_name = "FILE")]
    ply: Option<PathBuf>,
    #[command(flatten)]
    pipeline: PipelineFlags,
}

#[derive(Debug, Args)]
struct LabelArgs {
    /// Directory of frame_NNNNNN_rgb.png / frame_NNNNNN_depth.png pairs.
    #[arg(long = "in", value_name = "DIR")]
    input: PathBuf,
    /// Output directory for masks/ and the split manifests.
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Train,val,test fractions, e.g. 0.72,0.18,0.10.
    #[arg(long)]
    splits: Option<String>,
    #[arg(long)]
    h_min: Option<f64>,
    #[arg(long)]
    h_max: Option<f64>,
    #[arg(long)]
    s_min: Option<f64>,
    #[arg(long)]
    v_min: Option<f64>,
    /// Skip frames with an empty mask.
    #[arg(long)]
    drop_empty: bool,
    /// Directory with one subdirectory of frames per held-out garment; those
    /// frames become the test split.
    #[arg(long, value_name = "DIR")]
    test_garments: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EvalArgs {
    /// JSON-lines manifest whose masks are the ground truth.
    #[arg(long)]
    manifest: PathBuf,
    /// Directory with predicted masks named like the ground-truth masks.
    #[arg(long, value_name = "DIR")]
    pred: PathBuf,
    /// Average per-pair metrics instead of pooling counts.
    #[arg(long = "macro")]
    macro_average: bool,
    /// Write the JSON report here instead of standard output.
    #[arg(long, value_name = "FILE")]
    report: Option<PathBuf>,
}

/// Scene overrides; each replaces the matching `[synth]` key.
#[derive(Debug, Args)]
struct SceneFlags {
    /// Depth noise standard deviation, meters.
    #[arg(long)]
    noise: Option<f64>,
    /// Number of planted ridges.
    #[arg(long)]
    ridges: Option<usize>,
}

impl SceneFlags {
    fn apply(&self, c: &mut Config) {
        set(&mut c.synth.noise_std, self.noise);
        set(&mut c.synth.ridge_count, self.ridges);
    }
}

#[derive(Debug, Args)]
struct GenArgs {
    /// Seed range `A..B` (end exclusive), `A..=B`, or a single seed.
    #[arg(long, value_parser = parse_seeds)]
    seeds: Range<u64>,
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
    #[command(flatten)]
    scene: SceneFlags,
}

#[derive(Debug, Args)]
struct TrialArgs {
    /// Directory of scene bundles (subdirectories holding scene.json).
    #[arg(long, value_name = "DIR", conflicts_with = "seeds", required_unless_present = "seeds")]
    scenes: Option<PathBuf>,
    /// Generate scenes in memory for this seed range instead.
    #[arg(long, value_parser = parse_seeds)]
    seeds: Option<Range<u64>>,
    /// Write the trial report here instead of standard output.
    #[arg(long, value_name = "FILE")]
    report: Option<PathBuf>,
    /// trial.max_distance: success radius around the fold, meters.
    #[arg(long)]
    max_distance: Option<f64>,
    /// trial.max_angle_deg: allowed Z-axis deviation from the surface normal.
    #[arg(long)]
    max_angle: Option<f64>,
    #[command(flatten)]
    scene: SceneFlags,
    #[command(flatten)]
    pipeline: PipelineFlags,
}

fn parse_seeds(s: &str) -> Result<Range<u64>, String> {
    let num = |t: &str| t.trim().parse::<u64>().map_err(|_| format!("bad seed `{t}`"));
    let range = if let Some((a, b)) = s.split_once("..=") {
        num(a)?..num(b)?.checked_add(1).ok_or("seed overflow")?
    } else if let Some((a, b)) = s.split_once("..") {
        num(a)?..num(b)?
    } else {
        let a = num(s)?;
        a..a.checked_add(1).ok_or("seed overflow")?
    };
    if range.is_empty() {
        return Err(format!("empty seed range `{s}`"));
    }
    Ok(range)
}

/// A failure with its machine-readable code and exit status.
#[derive(Debug)]
pub struct CliError {
    code: &'static str,
    exit: u8,
    message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: "usage",
            exit: 1,
            message: message.into(),
        }
    }

    pub fn config(message: impl Into<String>) -> Self {
        Self {
            code: "config",
            exit: 1,
            message: message.into(),
        }
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self {
            code: "io",
            exit: 4,
            message: message.into(),
        }
    }

    fn report(&self) -> ExitCode {
        let body = serde_json::json!({ "error": self.code, "message": self.message });
        eprintln!("{body}");
        ExitCode::from(self.exit)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let exit = match &e {
            Error::NoDetection(_) => 2,
            Error::Degenerate(_) => 3,
            Error::Io { .. }
            | Error::Image { .. }
            | Error::Json { .. }
            | Error::MissingPair(_)
            | Error::MissingPredictions(_) => 4,
            _ => 1,
        };
        Self {
            code: e.code(),
            exit,
            message: e.to_string(),
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.jobs {
        if n == 0 {
            return Err(CliError::usage("--jobs must be >= 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::usage(format!("--jobs: {e}")))?;
    }
    let mut cfg = Config::load(cli.config.as_deref())?;
    match cli.command {
        Command::Grasp(a) => {
            a.pipeline.apply(&mut cfg);
            commands::grasp(&a, &cfg)
        }
        Command::Label(a) => commands::label(&a, &mut cfg),
        Command::Eval(a) => commands::eval(&a),
        Command::Synth(SynthCommand::Gen(a)) => {
            a.scene.apply(&mut cfg);
            commands::synth_gen(&a, &cfg)
        }
        Command::Synth(SynthCommand::Trial(a)) => {
            a.scene.apply(&mut cfg);
            a.pipeline.apply(&mut cfg);
            set(&mut cfg.trial.max_distance, a.max_distance);
            set(&mut cfg.trial.max_angle_deg, a.max_angle);
            commands::synth_trial(&a, &cfg)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = e.print();
                    ExitCode::SUCCESS
                }
                _ => CliError::usage(e.render().to_string().trim_end()).report(),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => e.report(),
    }
}
