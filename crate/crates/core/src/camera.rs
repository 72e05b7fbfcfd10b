//! Pinhole camera model, rigid extrinsics and frame-tagged poses.
//!
//! Camera frame: +Z into the scene, +X right (increasing column), +Y down
//! (increasing row). Depth images store raw units that `depth_scale` turns
//! into meters.

use crate::error::{Error, Result};
use crate::linalg::{Mat3, Vec3};
use crate::scalar::Real;

/// Which frame a point or pose is expressed in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frame {
    Camera,
    World,
}

impl Frame {
    pub fn as_str(self) -> &'static str {
        match self {
            Frame::Camera => "camera",
            Frame::World => "world",
        }
    }
}

/// Default meters per raw depth unit (millimeter depth).
pub const DEFAULT_DEPTH_SCALE: f64 = 0.001;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CameraIntrinsics<T> {
    pub fx: T,
    pub fy: T,
    pub cx: T,
    pub cy: T,
    /// Meters per raw depth unit.
    pub depth_scale: T,
}

impl<T: Real> CameraIntrinsics<T> {
    pub fn new(fx: T, fy: T, cx: T, cy: T, depth_scale: T) -> Result<Self> {
        let all_finite = [fx, fy, cx, cy, depth_scale].iter().all(|v| v.is_finite());
        if !all_finite || fx <= T::zero() || fy <= T::zero() || depth_scale <= T::zero() {
            return Err(Error::InvalidInput(format!(
                "intrinsics need finite fx, fy, depth_scale > 0 (got fx={fx}, fy={fy}, depth_scale={depth_scale})"
            )));
        }
        Ok(Self {
            fx,
            fy,
            cx,
            cy,
            depth_scale,
        })
    }

    /// Checks that the principal point lies inside a `width × height` image.
    pub fn check_image(&self, width: usize, height: usize) -> Result<()> {
        let inside = |c: T, n: usize| c >= T::zero() && c < T::from_count(n);
        if inside(self.cx, width) && inside(self.cy, height) {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!(
                "principal point ({}, {}) outside {width}x{height} image",
                self.cx, self.cy
            )))
        }
    }

    pub fn cast<U: Real>(&self) -> CameraIntrinsics<U> {
        CameraIntrinsics {
            fx: U::lit(self.fx.to_f64_lossy()),
            fy: U::lit(self.fy.to_f64_lossy()),
            cx: U::lit(self.cx.to_f64_lossy()),
            cy: U::lit(self.cy.to_f64_lossy()),
            depth_scale: U::lit(self.depth_scale.to_f64_lossy()),
        }
    }
}

/// Maps pixel `(u, v)` = (column, row) with a raw depth reading to a
/// camera-frame point in meters.
pub fn deproject_pixel<T: Real>(
    u: T,
    v: T,
    depth_raw: T,
    intr: &CameraIntrinsics<T>,
) -> Result<Vec3<T>> {
    if !(depth_raw > T::zero()) || !depth_raw.is_finite() {
        return Err(Error::InvalidDepth {
            u: u.to_f64_lossy(),
            v: v.to_f64_lossy(),
        });
    }
    let z = depth_raw * intr.depth_scale;
    Ok(Vec3::new(
        (u - intr.cx) * z / intr.fx,
        (v - intr.cy) * z / intr.fy,
        z,
    ))
}

/// Projection of a camera-frame point: `(u, v, depth_raw)`.
pub fn project_point<T: Real>(p: Vec3<T>, intr: &CameraIntrinsics<T>) -> Result<(T, T, T)> {
    if !(p.z > T::zero()) {
        return Err(Error::BehindCamera {
            z: p.z.to_f64_lossy(),
        });
    }
    Ok((
        intr.fx * p.x / p.z + intr.cx,
        intr.fy * p.y / p.z + intr.cy,
        p.z / intr.depth_scale,
    ))
}

/// Rigid camera→world transform.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Extrinsics<T> {
    rotation: Mat3<T>,
    translation: Vec3<T>,
}

/// Tolerance on orthonormality and determinant for rotations.
pub fn rotation_tolerance<T: Real>() -> T {
    T::lit(1e-9).max(T::solver_epsilon() * T::lit(64.0))
}

impl<T: Real> Extrinsics<T> {
    pub fn new(rotation: Mat3<T>, translation: Vec3<T>) -> Result<Self> {
        if !rotation.is_finite() || !translation.is_finite() {
            return Err(Error::InvalidInput("non-finite extrinsics".into()));
        }
        if !rotation.is_rotation(rotation_tolerance()) {
            return Err(Error::InvalidInput(format!(
                "extrinsic rotation is not a proper rotation (orthonormality error {}, det {})",
                rotation.orthonormality_error(),
                rotation.determinant()
            )));
        }
        Ok(Self {
            rotation,
            translation,
        })
    }

    pub fn identity() -> Self {
        Self {
            rotation: Mat3::identity(),
            translation: Vec3::zeros(),
        }
    }

    pub fn rotation(&self) -> &Mat3<T> {
        &self.rotation
    }

    pub fn translation(&self) -> Vec3<T> {
        self.translation
    }

    pub fn apply(&self, p: Vec3<T>) -> Vec3<T> {
        self.rotation.mul_vec(p) + self.translation
    }
}

/// A position plus orientation frame whose columns are the X, Y, Z axes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GraspPose<T> {
    pub position: Vec3<T>,
    pub orientation: Mat3<T>,
    pub frame: Frame,
}

impl<T: Real> GraspPose<T> {
    pub fn new(position: Vec3<T>, orientation: Mat3<T>, frame: Frame) -> Self {
        Self {
            position,
            orientation,
            frame,
        }
    }

    pub fn x_axis(&self) -> Vec3<T> {
        self.orientation.col(0)
    }

    pub fn y_axis(&self) -> Vec3<T> {
        self.orientation.col(1)
    }

    pub fn z_axis(&self) -> Vec3<T> {
        self.orientation.col(2)
    }

    pub fn is_valid(&self) -> bool {
        self.position.is_finite() && self.orientation.is_rotation(rotation_tolerance())
    }
}

/// Re-expresses a camera-frame pose in the world frame.
pub fn transform_pose<T: Real>(pose: &GraspPose<T>, ext: &Extrinsics<T>) -> Result<GraspPose<T>> {
    if pose.frame != Frame::Camera {
        return Err(Error::InvalidInput(
            "transform_pose expects a camera-frame pose".into(),
        ));
    }
    Ok(GraspPose {
        position: ext.apply(pose.position),
        orientation: ext.rotation.mul_mat(&pose.orientation),
        frame: Frame::World,
    })
}
