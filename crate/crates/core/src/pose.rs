//! Grasp orientation from the grasp region's principal axes, and the
//! pre-grasp / goal plan.
//!
//! Axis assignment: Z is the surface normal (smallest-variance eigenvector)
//! turned toward the camera, Y the dominant in-surface direction
//! (largest-variance eigenvector), X = Y × Z, which lines up with the middle
//! eigenvector. Eigenvectors carry no sign, so Y is made to point along the
//! camera's +X (falling back to +Y when perpendicular).

use serde::{Deserialize, Serialize};

use crate::camera::{rotation_tolerance, transform_pose, Extrinsics, Frame, GraspPose};
use crate::cloud::{GraspSelection, LocalSurfaceStats};
use crate::error::{Error, Result};
use crate::linalg::{Mat3, Vec3};
use crate::scalar::Real;

/// Default stand-off of the pre-grasp pose along the approach axis, meters.
pub const DEFAULT_APPROACH_OFFSET: f64 = 0.050;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Confidence {
    Normal,
    /// The frame is partly arbitrary because eigenvalues coincide.
    Low,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrientationEstimate<T> {
    /// Columns X, Y, Z.
    pub rotation: Mat3<T>,
    pub confidence: Confidence,
}

fn ambiguity_tolerance<T: Real>() -> T {
    T::lit(1e-9).max(T::solver_epsilon() * T::lit(1024.0))
}

/// Orientation of the grasp region, with Z facing `view_point` as seen from
/// the region centroid. `view_point` is the camera origin in camera frame.
pub fn estimate_orientation<T: Real>(
    stats: &LocalSurfaceStats<T>,
    view_point: Vec3<T>,
) -> Result<OrientationEstimate<T>> {
    estimate_orientation_from(stats, stats.centroid, view_point)
}

/// Like [`estimate_orientation`], with the Z sign decided from `anchor`
/// (normally the grasp point) instead of the centroid.
///
/// When the two smallest eigenvalues coincide the normal is undefined and
/// the frame falls back to Z pointing straight at the viewer; when the two
/// largest coincide Y is an arbitrary in-plane direction. Both cases are
/// flagged [`Confidence::Low`].
pub fn estimate_orientation_from<T: Real>(
    stats: &LocalSurfaceStats<T>,
    anchor: Vec3<T>,
    view_point: Vec3<T>,
) -> Result<OrientationEstimate<T>> {
    let [l0, l1, l2] = stats.eigenvalues;
    let trace = l0 + l1 + l2;
    if !(trace > T::zero()) {
        return Err(Error::Degenerate("grasp region has zero variance".into()));
    }
    let tol = ambiguity_tolerance::<T>() * trace;
    let normal_ambiguous = l1 - l0 <= tol;
    let axis_ambiguous = l2 - l1 <= tol;

    let to_view = view_point - anchor;
    let toward_viewer = to_view.try_normalize().unwrap_or(-Vec3::unit_z());

    let (z, y_hint) = if normal_ambiguous {
        (toward_viewer, Vec3::unit_x())
    } else {
        let v0 = stats.eigenvectors[0];
        let s = v0.dot(to_view);
        let z = if s > T::zero() || (s == T::zero() && v0.z <= T::zero()) {
            v0
        } else {
            -v0
        };
        (z, stats.eigenvectors[2])
    };

    let y = orthogonal_y(z, y_hint);
    let x = y.cross(z);
    let confidence = if normal_ambiguous || axis_ambiguous {
        Confidence::Low
    } else {
        Confidence::Normal
    };
    Ok(OrientationEstimate {
        rotation: Mat3::from_cols(x, y, z),
        confidence,
    })
}

/// `hint` made orthogonal to unit `z`, normalized and sign-fixed so it
/// points along camera +X (or +Y when perpendicular to X).
fn orthogonal_y<T: Real>(z: Vec3<T>, hint: Vec3<T>) -> Vec3<T> {
    let project = |v: Vec3<T>| (v - z * v.dot(z)).try_normalize();
    let y = project(hint)
        .or_else(|| project(Vec3::unit_x()))
        .or_else(|| project(Vec3::unit_y()))
        .unwrap_or_else(|| z.any_orthogonal());
    let eps = T::solver_epsilon() * T::lit(16.0);
    let flip = if y.x.abs() > eps {
        y.x < T::zero()
    } else {
        y.y < T::zero()
    };
    if flip {
        -y
    } else {
        y
    }
}

/// Goal pose plus a pre-grasp pose backed off along the approach axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GraspPlan<T> {
    pub goal: GraspPose<T>,
    pub pre_grasp: GraspPose<T>,
    pub approach_offset: T,
    pub confidence: Confidence,
}

impl<T: Real> GraspPlan<T> {
    pub fn frame(&self) -> Frame {
        self.goal.frame
    }
}

/// Builds the plan at the selected grasp point. The pre-grasp position is
/// `approach_offset` along the orientation's Z (away from the surface), so
/// insertion travels along −Z.
pub fn build_grasp_plan<T: Real>(
    grasp: &GraspSelection<T>,
    orientation: &OrientationEstimate<T>,
    approach_offset: T,
) -> Result<GraspPlan<T>> {
    plan_at(grasp.grasp_point, orientation, approach_offset, Frame::Camera)
}

/// Plan construction from a bare position.
pub fn plan_at<T: Real>(
    position: Vec3<T>,
    orientation: &OrientationEstimate<T>,
    approach_offset: T,
    frame: Frame,
) -> Result<GraspPlan<T>> {
    if !(approach_offset >= T::zero()) || !approach_offset.is_finite() {
        return Err(Error::InvalidInput(format!(
            "approach offset must be >= 0, got {approach_offset}"
        )));
    }
    if !orientation.rotation.is_rotation(rotation_tolerance()) {
        return Err(Error::InvalidInput("orientation is not a rotation".into()));
    }
    let goal = GraspPose::new(position, orientation.rotation, frame);
    let pre_grasp = GraspPose::new(
        position + goal.z_axis() * approach_offset,
        orientation.rotation,
        frame,
    );
    Ok(GraspPlan {
        goal,
        pre_grasp,
        approach_offset,
        confidence: orientation.confidence,
    })
}

/// Transforms both poses of a camera-frame plan into the world frame.
pub fn plan_to_world<T: Real>(plan: &GraspPlan<T>, ext: &Extrinsics<T>) -> Result<GraspPlan<T>> {
    Ok(GraspPlan {
        goal: transform_pose(&plan.goal, ext)?,
        pre_grasp: transform_pose(&plan.pre_grasp, ext)?,
        approach_offset: plan.approach_offset,
        confidence: plan.confidence,
    })
}

/// Wire form of one pose.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoseJson {
    pub position: [f64; 3],
    /// Row-major 3×3.
    pub rotation: [f64; 9],
}

/// Wire form of a [`GraspPlan`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraspPlanJson {
    pub frame: Frame,
    pub goal: PoseJson,
    pub pre_grasp: PoseJson,
    pub confidence: Confidence,
}

fn pose_json<T: Real>(p: &GraspPose<T>) -> PoseJson {
    PoseJson {
        position: p.position.to_array().map(Real::to_f64_lossy),
        rotation: p.orientation.to_row_major().map(Real::to_f64_lossy),
    }
}

impl<T: Real> From<&GraspPlan<T>> for GraspPlanJson {
    fn from(plan: &GraspPlan<T>) -> Self {
        GraspPlanJson {
            frame: plan.frame(),
            goal: pose_json(&plan.goal),
            pre_grasp: pose_json(&plan.pre_grasp),
            confidence: plan.confidence,
        }
    }
}

impl GraspPlanJson {
    pub fn goal_rotation(&self) -> Mat3<f64> {
        Mat3::from_row_major(self.goal.rotation)
    }
}
