//! Depth image + collar mask → grasp plan.

use crate::camera::{CameraIntrinsics, Extrinsics};
use crate::cloud::{mask_to_cloud, preprocess, select_grasp_point, GraspParams, GraspSelection, PreprocessParams};
use crate::error::{Error, Result};
use crate::image::{BinaryMask, DepthImage};
use crate::linalg::Vec3;
use crate::mask_ops::{extract_center_detailed, CenterExtraction, CenterParams};
use crate::pose::{build_grasp_plan, estimate_orientation_from, plan_to_world, GraspPlan, DEFAULT_APPROACH_OFFSET};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PipelineParams {
    pub center: CenterParams,
    pub preprocess: PreprocessParams,
    pub grasp: GraspParams,
    pub approach_offset: f64,
}

impl Default for PipelineParams {
    fn default() -> Self {
        Self {
            center: CenterParams::default(),
            preprocess: PreprocessParams::default(),
            grasp: GraspParams::default(),
            approach_offset: DEFAULT_APPROACH_OFFSET,
        }
    }
}

impl PipelineParams {
    pub fn validate(&self) -> Result<()> {
        self.center.validate()?;
        self.preprocess.validate()?;
        if self.grasp.big_n == 0 || self.grasp.small_n == 0 {
            return Err(Error::InvalidInput("cloud.big_n and cloud.small_n must be >= 1".into()));
        }
        if !(self.approach_offset >= 0.0) || !self.approach_offset.is_finite() {
            return Err(Error::InvalidInput(format!(
                "pose.approach_offset must be a finite value >= 0, got {}",
                self.approach_offset
            )));
        }
        Ok(())
    }
}

/// Everything the pipeline produced, for diagnostics.
#[derive(Clone, Debug)]
pub struct PipelineOutcome<T> {
    /// Camera-frame plan.
    pub plan: GraspPlan<T>,
    /// World-frame plan when extrinsics were supplied.
    pub world_plan: Option<GraspPlan<T>>,
    pub center: CenterExtraction,
    /// Points lifted from the mask.
    pub raw_cloud_size: usize,
    /// Points left after downsampling and outlier removal.
    pub cloud_size: usize,
    pub selection: GraspSelection<T>,
}

/// Runs center extraction, cloud lifting and filtering, grasp selection and
/// orientation estimation.
///
/// The orientation's Z axis is flipped to face the camera origin as seen
/// from the grasp point.
pub fn run_pipeline<T: Real>(
    depth: &DepthImage,
    mask: &BinaryMask,
    intr: &CameraIntrinsics<T>,
    extrinsics: Option<&Extrinsics<T>>,
    params: &PipelineParams,
) -> Result<PipelineOutcome<T>> {
    params.validate()?;
    mask.ensure_same_dims(depth.dims())?;
    intr.check_image(depth.width(), depth.height())?;

    let center = extract_center_detailed(mask, &params.center)?;
    let raw = mask_to_cloud(depth, mask, intr)?;
    let cloud = preprocess(&raw, &params.preprocess)?;
    if cloud.is_empty() {
        return Err(Error::NoDetection(format!(
            "all {} collar points were removed by preprocessing",
            raw.len()
        )));
    }
    let selection = select_grasp_point(&cloud, center.center, depth, mask, intr, &params.grasp)?;
    let orientation =
        estimate_orientation_from(&selection.region_stats, selection.grasp_point, Vec3::zeros())?;
    let plan = build_grasp_plan(&selection, &orientation, T::lit(params.approach_offset))?;
    let world_plan = extrinsics.map(|e| plan_to_world(&plan, e)).transpose()?;

    Ok(PipelineOutcome {
        plan,
        world_plan,
        center,
        raw_cloud_size: raw.len(),
        cloud_size: cloud.len(),
        selection,
    })
}
