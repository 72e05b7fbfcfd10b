//! Brute-force oracle over synthetic single-ridge scenes: the point of
//! globally maximal surface variation in the preprocessed collar cloud,
//! scored with the trial success criterion. Its success rate is the
//! reference the pipeline is held to.
//!
//! `cargo run --release -p collar-grasp-core --example oracle_run -- [noise_mm] [seeds]`

use collar_grasp_core::cloud::{mask_to_cloud, preprocess, PreprocessParams};
use collar_grasp_core::synth::{angle_deg, generate_scene, oracle_grasp, SceneParams, SuccessCriterion};
use collar_grasp_core::Vec3;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let noise_mm: f64 = args.get(1).map_or(0.5, |s| s.parse().expect("noise in mm"));
    let seeds: u64 = args.get(2).map_or(100, |s| s.parse().expect("seed count"));
    let params = SceneParams {
        noise_std: noise_mm / 1000.0,
        ..SceneParams::default()
    };
    let criterion = SuccessCriterion::default();
    let (mut success, mut within_5mm, mut within_10mm) = (0, 0, 0);
    for seed in 0..seeds {
        let scene = generate_scene(&params, seed).expect("scene");
        let raw = mask_to_cloud(&scene.depth, &scene.gt_mask, &scene.intrinsics).expect("cloud");
        let cloud = preprocess(&raw, &PreprocessParams::default()).expect("preprocess");
        let Some(g) = oracle_grasp(cloud.points(), 50, Vec3::zeros()) else {
            println!("seed {seed}: degenerate");
            continue;
        };
        let (fold, d, v) = scene.nearest_fold_point(g.point);
        let angle = angle_deg(g.normal, scene.folds[fold].normals[v]);
        let ok = d <= criterion.max_distance && angle <= criterion.max_angle_deg;
        success += usize::from(ok);
        within_5mm += usize::from(d <= 0.005);
        within_10mm += usize::from(d <= 0.010);
        println!(
            "seed {seed}: sigma {:.4} dist {:.1} mm angle {:.1} deg {} (cloud {})",
            g.sigma,
            d * 1000.0,
            angle,
            if ok { "ok" } else { "FAIL" },
            cloud.len()
        );
    }
    println!("success {success}/{seeds}, within 5 mm {within_5mm}, within 10 mm {within_10mm}");
}
