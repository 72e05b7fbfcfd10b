//! Grasp pose estimation for garment collars from a depth image and a
//! collar segmentation mask, plus the labeling, evaluation and synthetic
//! scene tooling around it.
//!
//! Geometry is generic over [`Real`] (`f32` or `f64`); the aliases at the
//! crate root fix it to `f64`, which is what the pipeline and tools use.

// `!(x > 0)` is deliberate throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

pub mod camera;
pub mod cloud;
pub mod error;
pub mod eval;
pub mod image;
pub mod io;
pub mod labeler;
pub mod linalg;
pub mod mask_ops;
pub mod pipeline;
pub mod pose;
pub mod scalar;
pub mod synth;

pub use camera::{deproject_pixel, project_point, transform_pose, Frame};
pub use error::{Error, Result};
pub use image::{BinaryMask, DepthImage, Pixel, RgbImage};
pub use pipeline::{run_pipeline, PipelineParams};
pub use scalar::Real;

pub type Vec3 = linalg::Vec3<f64>;
pub type Mat3 = linalg::Mat3<f64>;
pub type PointCloud = cloud::PointCloud<f64>;
pub type CameraIntrinsics = camera::CameraIntrinsics<f64>;
pub type Extrinsics = camera::Extrinsics<f64>;
pub type GraspPose = camera::GraspPose<f64>;
pub type GraspPlan = pose::GraspPlan<f64>;
pub type LocalSurfaceStats = cloud::LocalSurfaceStats<f64>;
pub type GraspSelection = cloud::GraspSelection<f64>;
pub type PipelineOutcome = pipeline::PipelineOutcome<f64>;
