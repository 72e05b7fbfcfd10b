//! TOML configuration. Every key is optional and defaults to the library
//! default; unknown keys are rejected.
//!
//! ```toml
//! [mask]
//! link_dist = 10.0
//! [cloud]
//! voxel = 0.004
//! [camera]
//! intrinsics = "camera.json"
//! ```

use std::path::{Path, PathBuf};

use collar_grasp_core::cloud::{GraspParams, PreprocessParams};
use collar_grasp_core::labeler::{HsvThresholds, SplitFractions};
use collar_grasp_core::mask_ops::{CenterParams, Morphology};
use collar_grasp_core::pose::DEFAULT_APPROACH_OFFSET;
use collar_grasp_core::synth::{SceneParams, SuccessCriterion};
use collar_grasp_core::PipelineParams;
use serde::Deserialize;

use crate::CliError;

pub const CONFIG_ENV: &str = "COLLAR_GRASP_CONFIG";

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub mask: MaskSection,
    pub cloud: CloudSection,
    pub pose: PoseSection,
    pub label: LabelSection,
    pub camera: CameraSection,
    pub synth: SceneParams,
    pub trial: SuccessCriterion,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MaskSection {
    pub link_dist: f64,
    pub dilate_radius: usize,
    pub dilate_iters: usize,
    pub morphology: Morphology,
    pub diagonal_weight: f64,
}

impl Default for MaskSection {
    fn default() -> Self {
        let c = CenterParams::default();
        Self {
            link_dist: c.link_dist,
            dilate_radius: c.dilate_radius,
            dilate_iters: c.dilate_iters,
            morphology: c.morphology,
            diagonal_weight: c.diagonal_weight,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CloudSection {
    pub voxel: f64,
    pub outlier_radius: f64,
    pub outlier_min: usize,
    pub big_n: usize,
    pub small_n: usize,
    pub hole_search_radius: usize,
}

impl Default for CloudSection {
    fn default() -> Self {
        let p = PreprocessParams::default();
        let g = GraspParams::default();
        Self {
            voxel: p.voxel,
            outlier_radius: p.outlier_radius,
            outlier_min: p.outlier_min_neighbors,
            big_n: g.big_n,
            small_n: g.small_n,
            hole_search_radius: g.hole_search_radius,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PoseSection {
    pub approach_offset: f64,
}

impl Default for PoseSection {
    fn default() -> Self {
        Self {
            approach_offset: DEFAULT_APPROACH_OFFSET,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LabelSection {
    pub h_min: f64,
    pub h_max: f64,
    pub s_min: f64,
    pub v_min: f64,
    pub seed: u64,
    pub splits: [f64; 3],
    pub drop_empty: bool,
}

impl Default for LabelSection {
    fn default() -> Self {
        let t = HsvThresholds::default();
        let s = SplitFractions::default();
        Self {
            h_min: t.h_min,
            h_max: t.h_max,
            s_min: t.s_min,
            v_min: t.v_min,
            seed: 0,
            splits: [s.train, s.val, s.test],
            drop_empty: false,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CameraSection {
    pub intrinsics: Option<PathBuf>,
    pub extrinsics: Option<PathBuf>,
}

impl Config {
    /// Reads `explicit`, else the file named by `COLLAR_GRASP_CONFIG`, else
    /// returns defaults.
    pub fn load(explicit: Option<&Path>) -> Result<Self, CliError> {
        let path = match explicit {
            Some(p) => p.to_path_buf(),
            None => match std::env::var_os(CONFIG_ENV) {
                Some(p) if !p.is_empty() => PathBuf::from(p),
                _ => return Ok(Self::default()),
            },
        };
        let text = std::fs::read_to_string(&path)
            .map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn pipeline(&self) -> PipelineParams {
        PipelineParams {
            center: CenterParams {
                link_dist: self.mask.link_dist,
                dilate_radius: self.mask.dilate_radius,
                dilate_iters: self.mask.dilate_iters,
                morphology: self.mask.morphology,
                diagonal_weight: self.mask.diagonal_weight,
            },
            preprocess: PreprocessParams {
                voxel: self.cloud.voxel,
                outlier_radius: self.cloud.outlier_radius,
                outlier_min_neighbors: self.cloud.outlier_min,
            },
            grasp: GraspParams {
                big_n: self.cloud.big_n,
                small_n: self.cloud.small_n,
                hole_search_radius: self.cloud.hole_search_radius,
            },
            approach_offset: self.pose.approach_offset,
        }
    }

    pub fn thresholds(&self) -> HsvThresholds {
        HsvThresholds {
            h_min: self.label.h_min,
            h_max: self.label.h_max,
            s_min: self.label.s_min,
            v_min: self.label.v_min,
        }
    }
}
