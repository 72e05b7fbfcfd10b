//! Pipeline trials on synthetic scenes.
//!
//! `cargo run --release -p collar-grasp-core --example trial_run -- [noise_mm] [seeds] [ridges]`

use collar_grasp_core::synth::{run_batch, SceneParams, SuccessCriterion};
use collar_grasp_core::PipelineParams;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let noise_mm: f64 = args.get(1).map_or(0.5, |s| s.parse().expect("noise in mm"));
    let seeds: u64 = args.get(2).map_or(100, |s| s.parse().expect("seed count"));
    let ridges: usize = args.get(3).map_or(1, |s| s.parse().expect("ridge count"));
    let params = SceneParams {
        noise_std: noise_mm / 1000.0,
        ridge_count: ridges,
        ..SceneParams::default()
    };
    let seeds: Vec<u64> = (0..seeds).collect();
    let t = std::time::Instant::now();
    let report = run_batch(&params, &seeds, &PipelineParams::default(), &SuccessCriterion::default())
        .expect("batch");
    for o in &report.outcomes {
        if !o.success || o.folds_within != 1 {
            println!("{o:?}");
        }
    }
    let within = report
        .outcomes
        .iter()
        .filter(|o| o.distance.is_some_and(|d| d <= 0.010))
        .count();
    let one = report.outcomes.iter().filter(|o| o.folds_within == 1).count();
    println!(
        "success {}/{} within 10 mm {within} on exactly one fold {one} failures {:?} in {:?}",
        report.successes, report.trials, report.failures, t.elapsed()
    );
}
