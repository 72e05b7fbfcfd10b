//! Collar point clouds: construction from depth + mask, preprocessing,
//! neighborhoods, local covariance analysis and grasp-point selection.

mod filter;
mod grasp;
mod knn;
mod surface;

pub use filter::{radius_outlier_removal, voxel_downsample};
pub use grasp::{lift_center_pixel, select_grasp_point, CandidateScore, GraspParams, GraspSelection};
pub use knn::knn;
pub use surface::{local_surface_stats, LocalSurfaceStats};

use crate::camera::{deproject_pixel, CameraIntrinsics, Frame};
use crate::error::{Error, Result};
use crate::image::{BinaryMask, DepthImage};
use crate::linalg::Vec3;
use crate::scalar::Real;

/// 3-D points in meters, tagged with their frame.
///
/// Coordinates are finite, and camera-frame points lie in front of the
/// camera (`z > 0`).
#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud<T> {
    points: Vec<Vec3<T>>,
    frame: Frame,
}

impl<T: Real> PointCloud<T> {
    pub fn new(points: Vec<Vec3<T>>, frame: Frame) -> Result<Self> {
        if let Some(bad) = points.iter().position(|p| !p.is_finite()) {
            return Err(Error::InvalidInput(format!("point {bad} is not finite")));
        }
        if frame == Frame::Camera {
            if let Some(bad) = points.iter().position(|p| !(p.z > T::zero())) {
                return Err(Error::InvalidInput(format!(
                    "camera-frame point {bad} has z <= 0"
                )));
            }
        }
        Ok(Self { points, frame })
    }

    pub fn empty(frame: Frame) -> Self {
        Self {
            points: Vec::new(),
            frame,
        }
    }

    pub fn points(&self) -> &[Vec3<T>] {
        &self.points
    }

    pub fn into_points(self) -> Vec<Vec3<T>> {
        self.points
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn get(&self, i: usize) -> Vec3<T> {
        self.points[i]
    }

    /// Points at `indices`, in that order.
    pub fn gather(&self, indices: &[usize]) -> Vec<Vec3<T>> {
        indices.iter().map(|&i| self.points[i]).collect()
    }

    /// Derived cloud built from points of this one; keeps the frame tag.
    pub(crate) fn with_points(&self, points: Vec<Vec3<T>>) -> Self {
        Self {
            points,
            frame: self.frame,
        }
    }
}

/// De-projects every set mask pixel that has a valid depth reading.
/// Points come out in row-major pixel order.
pub fn mask_to_cloud<T: Real>(
    depth: &DepthImage,
    mask: &BinaryMask,
    intr: &CameraIntrinsics<T>,
) -> Result<PointCloud<T>> {
    mask.ensure_same_dims(depth.dims())?;
    let points: Vec<Vec3<T>> = mask
        .pixels()
        .filter(|&(r, c)| depth.is_valid(r, c))
        .map(|(r, c)| {
            deproject_pixel(
                T::from_count(c),
                T::from_count(r),
                T::lit(f64::from(depth.get(r, c))),
                intr,
            )
        })
        .collect::<Result<_>>()?;
    if points.is_empty() {
        return Err(Error::NoDetection(
            "no masked pixel has a valid depth reading".into(),
        ));
    }
    PointCloud::new(points, Frame::Camera)
}

/// Parameters for voxel down-sampling followed by radius outlier removal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PreprocessParams {
    /// Voxel edge length, meters.
    pub voxel: f64,
    /// Outlier search radius, meters.
    pub outlier_radius: f64,
    pub outlier_min_neighbors: usize,
}

impl Default for PreprocessParams {
    fn default() -> Self {
        Self {
            voxel: 0.005,
            outlier_radius: 0.010,
            outlier_min_neighbors: 5,
        }
    }
}

impl PreprocessParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.voxel > 0.0) || !(self.outlier_radius > 0.0) || self.outlier_min_neighbors == 0 {
            return Err(Error::InvalidInput(
                "cloud.voxel and cloud.outlier_radius must be > 0, cloud.outlier_min >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// Voxel down-sampling then radius outlier removal. An empty result is a
/// no-detection.
pub fn preprocess<T: Real>(cloud: &PointCloud<T>, params: &PreprocessParams) -> Result<PointCloud<T>> {
    params.validate()?;
    let down = voxel_downsample(cloud, T::lit(params.voxel))?;
    let kept = radius_outlier_removal(
        &down,
        T::lit(params.outlier_radius),
        params.outlier_min_neighbors,
    )?;
    if kept.is_empty() {
        return Err(Error::NoDetection(
            "cloud is empty after outlier removal".into(),
        ));
    }
    Ok(kept)
}
