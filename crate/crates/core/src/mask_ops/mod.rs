//! Center region extraction on a collar mask: cluster the predicted
//! pixels, keep the largest cluster, dilate it, thin it to a skeleton and
//! take the skeleton pixel of maximum closeness centrality.

mod centrality;
mod cluster;
mod morphology;
mod skeleton;

pub use centrality::{closeness_center, skeleton_graph, Centrality, SkeletonGraph};
pub use cluster::{cluster_mask, largest_cluster, PixelCluster};
pub use morphology::{close, dilate, erode};
pub use skeleton::skeletonize;

use crate::error::{Error, Result};
use crate::image::{BinaryMask, Pixel};

/// Morphological clean-up applied to the largest cluster before thinning.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Morphology {
    #[default]
    Dilate,
    Close,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CenterParams {
    /// Single-linkage threshold in pixels.
    pub link_dist: f64,
    pub dilate_radius: usize,
    pub dilate_iters: usize,
    pub morphology: Morphology,
    /// Cost of a diagonal skeleton hop; 1 means plain hop counts.
    pub diagonal_weight: f64,
}

impl Default for CenterParams {
    fn default() -> Self {
        Self {
            link_dist: 10.0,
            dilate_radius: 1,
            dilate_iters: 1,
            morphology: Morphology::Dilate,
            diagonal_weight: 1.0,
        }
    }
}

impl CenterParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.link_dist > 0.0) || !self.link_dist.is_finite() {
            return Err(Error::InvalidInput("mask.link_dist must be > 0".into()));
        }
        if self.dilate_radius == 0 || self.dilate_iters == 0 {
            return Err(Error::InvalidInput(
                "mask.dilate_radius and mask.dilate_iters must be >= 1".into(),
            ));
        }
        if !(self.diagonal_weight > 0.0) || !self.diagonal_weight.is_finite() {
            return Err(Error::InvalidInput("mask.diagonal_weight must be > 0".into()));
        }
        Ok(())
    }
}

/// Intermediate products of center extraction.
#[derive(Clone, Debug)]
pub struct CenterExtraction {
    pub center: Pixel,
    pub cluster_count: usize,
    /// Largest cluster after morphology.
    pub region: BinaryMask,
    pub skeleton: BinaryMask,
    pub centrality: Centrality,
}

/// Runs the full extraction chain and returns the skeleton center with its
/// intermediates.
pub fn extract_center_detailed(mask: &BinaryMask, params: &CenterParams) -> Result<CenterExtraction> {
    params.validate()?;
    let clusters = cluster_mask(mask, params.link_dist)?;
    if clusters.is_empty() {
        return Err(Error::NoDetection("mask has no set pixels".into()));
    }
    let largest = largest_cluster(&clusters)?;
    let (w, h) = mask.dims();
    let cluster_mask = largest.to_mask(w, h);
    let region = match params.morphology {
        Morphology::Dilate => dilate(&cluster_mask, params.dilate_radius, params.dilate_iters)?,
        Morphology::Close => close(&cluster_mask, params.dilate_radius, params.dilate_iters)?,
    };
    let skeleton = skeletonize(&region);
    let graph = skeleton_graph(&skeleton);
    let centrality = closeness_center(&graph, params.diagonal_weight)?;
    Ok(CenterExtraction {
        center: centrality.center,
        cluster_count: clusters.len(),
        region,
        skeleton,
        centrality,
    })
}

/// Skeleton center pixel `(row, col)` of the largest collar cluster.
pub fn extract_center(mask: &BinaryMask, params: &CenterParams) -> Result<Pixel> {
    extract_center_detailed(mask, params).map(|e| e.center)
}
