use std::path::{Path, PathBuf};

use collar_grasp_core::cloud::{mask_to_cloud, preprocess};
use collar_grasp_core::eval::{evaluate_set, Averaging};
use collar_grasp_core::io;
use collar_grasp_core::labeler::{read_manifest, write_dataset, DatasetOptions, SplitFractions};
use collar_grasp_core::pose::{Confidence, GraspPlanJson};
use collar_grasp_core::synth::{
    generate_scene, load_scene, run_trial, save_scene, SyntheticScene, TrialReport,
};
use collar_grasp_core::{run_pipeline, CameraIntrinsics, Error};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::Config;
use crate::{CliError, EvalArgs, GenArgs, GraspArgs, LabelArgs, TrialArgs};

/// Pretty JSON to `path`, or to standard output.
fn emit_json<S: Serialize>(path: Option<&Path>, value: &S) -> Result<(), CliError> {
    match path {
        Some(p) => Ok(io::write_json(p, value)?),
        None => {
            let text = serde_json::to_string_pretty(value)
                .map_err(|e| CliError::io(format!("serializing output: {e}")))?;
            println!("{text}");
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct GraspDiagnostics {
    cluster_count: usize,
    skeleton_center: [usize; 2],
    /// Pixel whose depth anchored the candidate search.
    lifted_pixel: [usize; 2],
    raw_cloud_size: usize,
    cloud_size: usize,
    grasp_index: usize,
    sigma: f64,
    eigenvalues: [f64; 3],
    confidence: Confidence,
}

pub fn grasp(args: &GraspArgs, cfg: &Config) -> Result<(), CliError> {
    let params = cfg.pipeline();
    params.validate()?;
    let intr_path = args
        .intrinsics
        .as_ref()
        .or(cfg.camera.intrinsics.as_ref())
        .ok_or_else(|| CliError::usage("camera intrinsics required: pass --intrinsics or set camera.intrinsics"))?;
    let intr: CameraIntrinsics = io::read_intrinsics(intr_path)?;
    let ext = args
        .extrinsics
        .as_ref()
        .or(cfg.camera.extrinsics.as_ref())
        .map(|p| io::read_extrinsics(p))
        .transpose()?;
    let depth = io::read_depth_png(&args.depth)?;
    let mask = io::read_mask_png(&args.mask)?;

    let out = run_pipeline(&depth, &mask, &intr, ext.as_ref(), &params)?;
    let plan = out.world_plan.as_ref().unwrap_or(&out.plan);
    emit_json(args.out.as_deref(), &GraspPlanJson::from(plan))?;

    let sel = &out.selection;
    let diag = GraspDiagnostics {
        cluster_count: out.center.cluster_count,
        skeleton_center: [out.center.center.0, out.center.center.1],
        lifted_pixel: [sel.center_pixel.0, sel.center_pixel.1],
        raw_cloud_size: out.raw_cloud_size,
        cloud_size: out.cloud_size,
        grasp_index: sel.grasp_index,
        sigma: sel.region_stats.sigma,
        eigenvalues: sel.region_stats.eigenvalues,
        confidence: plan.confidence,
    };
    match &args.diagnostics {
        Some(p) => io::write_json(p, &diag)?,
        None => eprintln!("{}", serde_json::to_string(&diag).expect("plain struct")),
    }

    if let Some(p) = &args.ply {
        let cloud = preprocess(&mask_to_cloud(&depth, &mask, &intr)?, &params.preprocess)?;
        io::write_ply(p, &cloud)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct LabelSummary {
    train: usize,
    val: usize,
    test: usize,
    masks: PathBuf,
}

pub fn label(args: &LabelArgs, cfg: &mut Config) -> Result<(), CliError> {
    let l = &mut cfg.label;
    if let Some(s) = &args.splits {
        let f: SplitFractions = s.parse()?;
        l.splits = [f.train, f.val, f.test];
    }
    crate::set(&mut l.seed, args.seed);
    crate::set(&mut l.h_min, args.h_min);
    crate::set(&mut l.h_max, args.h_max);
    crate::set(&mut l.s_min, args.s_min);
    crate::set(&mut l.v_min, args.v_min);
    l.drop_empty |= args.drop_empty;

    let [train, val, test] = l.splits;
    let opts = DatasetOptions {
        seed: cfg.label.seed,
        splits: SplitFractions::new(train, val, test)?,
        thresholds: cfg.thresholds(),
        drop_empty: cfg.label.drop_empty,
        test_garments: args.test_garments.clone(),
    };
    let [a, b, c] = write_dataset(&args.input, &args.out, &opts)?;
    emit_json(
        None,
        &LabelSummary {
            train: a.entries.len(),
            val: b.entries.len(),
            test: c.entries.len(),
            masks: args.out.join("masks"),
        },
    )
}

pub fn eval(args: &EvalArgs) -> Result<(), CliError> {
    let entries = read_manifest(&args.manifest)?;
    let averaging = if args.macro_average {
        Averaging::Macro
    } else {
        Averaging::Micro
    };
    let report = evaluate_set(&entries, &args.pred, averaging)?;
    emit_json(args.report.as_deref(), &report)?;
    eprint!("{}", report.to_table());
    Ok(())
}

fn scene_dir(root: &Path, seed: u64) -> PathBuf {
    root.join(format!("scene_{seed:06}"))
}

pub fn synth_gen(args: &GenArgs, cfg: &Config) -> Result<(), CliError> {
    cfg.synth.validate()?;
    let written: Vec<PathBuf> = args
        .seeds
        .clone()
        .into_par_iter()
        .map(|seed| {
            let dir = scene_dir(&args.out, seed);
            std::fs::create_dir_all(&dir).map_err(|e| CliError::io(format!("{}: {e}", dir.display())))?;
            save_scene(&dir, &generate_scene(&cfg.synth, seed)?)?;
            Ok(dir)
        })
        .collect::<Result<_, CliError>>()?;
    emit_json(
        None,
        &serde_json::json!({ "scenes": written.len(), "out": args.out }),
    )
}

/// Subdirectories of `root` that hold a `scene.json`, sorted by name.
fn scene_dirs(root: &Path) -> Result<Vec<PathBuf>, CliError> {
    let read = std::fs::read_dir(root).map_err(|e| CliError::io(format!("{}: {e}", root.display())))?;
    let mut dirs = Vec::new();
    for entry in read {
        let entry = entry.map_err(|e| CliError::io(format!("{}: {e}", root.display())))?;
        let path = entry.path();
        if path.join("scene.json").is_file() {
            dirs.push(path);
        }
    }
    dirs.sort();
    if dirs.is_empty() {
        return Err(Error::InvalidInput(format!("{}: no scene bundles found", root.display())).into());
    }
    Ok(dirs)
}

pub fn synth_trial(args: &TrialArgs, cfg: &Config) -> Result<(), CliError> {
    let params = cfg.pipeline();
    params.validate()?;
    let criterion = cfg.trial;
    let scenes: Vec<SyntheticScene> = match (&args.scenes, &args.seeds) {
        (Some(dir), _) => scene_dirs(dir)?
            .par_iter()
            .map(|d| load_scene(d))
            .collect::<Result<_, Error>>()?,
        (None, Some(seeds)) => {
            cfg.synth.validate()?;
            seeds
                .clone()
                .into_par_iter()
                .map(|s| generate_scene(&cfg.synth, s))
                .collect::<Result<_, Error>>()?
        }
        (None, None) => return Err(CliError::usage("pass --scenes DIR or --seeds A..B")),
    };
    let outcomes = scenes
        .par_iter()
        .map(|s| run_trial(s, &params, &criterion))
        .collect();
    let report = TrialReport::new(outcomes, criterion);
    emit_json(args.report.as_deref(), &report)?;
    eprintln!(
        "{}",
        serde_json::json!({
            "trials": report.trials,
            "successes": report.successes,
            "success_rate": report.success_rate,
            "failures": report.failures,
        })
    );
    Ok(())
}
