//! Grasp trials on synthetic scenes with a geometric success criterion.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{angle_deg, generate_scene, SceneParams, SyntheticScene};
use crate::error::Result;
use crate::pipeline::{run_pipeline, PipelineParams};
use crate::pose::GraspPlanJson;

/// A grasp succeeds when its position is within `max_distance` meters of a
/// planted fold and its Z axis within `max_angle_deg` of the surface normal
/// at the nearest fold point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SuccessCriterion {
    pub max_distance: f64,
    pub max_angle_deg: f64,
}

impl Default for SuccessCriterion {
    fn default() -> Self {
        Self {
            max_distance: 0.010,
            max_angle_deg: 30.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub seed: u64,
    pub success: bool,
    /// Pipeline error code, or `too-far` / `misaligned` for a grasp that
    /// misses the criterion.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    /// Distance from the grasp point to the nearest fold, meters.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angle_deg: Option<f64>,
    /// Index of the nearest fold.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fold: Option<usize>,
    /// Number of folds within `max_distance` of the grasp point.
    pub folds_within: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cloud_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plan: Option<GraspPlanJson>,
}

/// Runs the full pipeline on `scene` with its ground-truth mask as the
/// segmentation and scores the resulting grasp.
pub fn run_trial(
    scene: &SyntheticScene,
    params: &PipelineParams,
    criterion: &SuccessCriterion,
) -> TrialOutcome {
    let failed = |reason: &str| TrialOutcome {
        seed: scene.seed,
        success: false,
        reason: Some(reason.to_owned()),
        distance: None,
        angle_deg: None,
        fold: None,
        folds_within: 0,
        cloud_size: None,
        plan: None,
    };
    let out = match run_pipeline(&scene.depth, &scene.gt_mask, &scene.intrinsics, None, params) {
        Ok(o) => o,
        Err(e) => return failed(e.code()),
    };
    let goal = out.plan.goal;
    let (fold, distance, vertex) = scene.nearest_fold_point(goal.position);
    let normal = scene.folds[fold].normals[vertex];
    let angle = angle_deg(goal.z_axis(), normal);
    let folds_within = scene
        .folds
        .iter()
        .filter(|f| f.distance(goal.position).0 <= criterion.max_distance)
        .count();
    let reason = if distance > criterion.max_distance {
        Some("too-far".to_owned())
    } else if angle > criterion.max_angle_deg {
        Some("misaligned".to_owned())
    } else {
        None
    };
    TrialOutcome {
        seed: scene.seed,
        success: reason.is_none(),
        reason,
        distance: Some(distance),
        angle_deg: Some(angle),
        fold: Some(fold),
        folds_within,
        cloud_size: Some(out.cloud_size),
        plan: Some(GraspPlanJson::from(&out.plan)),
    }
}

pub const TRIAL_REPORT_SCHEMA: &str = "collar-grasp/trial_report/v1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    pub schema: String,
    pub criterion: SuccessCriterion,
    pub trials: usize,
    pub successes: usize,
    pub success_rate: f64,
    /// Failure count per reason.
    pub failures: BTreeMap<String, usize>,
    /// Sorted by seed.
    pub outcomes: Vec<TrialOutcome>,
}

impl TrialReport {
    pub fn new(mut outcomes: Vec<TrialOutcome>, criterion: SuccessCriterion) -> Self {
        outcomes.sort_by_key(|o| o.seed);
        let successes = outcomes.iter().filter(|o| o.success).count();
        let mut failures = BTreeMap::new();
        for o in &outcomes {
            if let Some(r) = &o.reason {
                *failures.entry(r.clone()).or_insert(0) += 1;
            }
        }
        let trials = outcomes.len();
        Self {
            schema: TRIAL_REPORT_SCHEMA.into(),
            criterion,
            trials,
            successes,
            success_rate: if trials == 0 {
                0.0
            } else {
                successes as f64 / trials as f64
            },
            failures,
            outcomes,
        }
    }
}

/// Generates and runs one scene per seed, in parallel.
pub fn run_batch(
    scene: &SceneParams,
    seeds: &[u64],
    params: &PipelineParams,
    criterion: &SuccessCriterion,
) -> Result<TrialReport> {
    let outcomes = seeds
        .par_iter()
        .map(|&s| Ok(run_trial(&generate_scene(scene, s)?, params, criterion)))
        .collect::<Result<Vec<_>>>()?;
    Ok(TrialReport::new(outcomes, *criterion))
}
