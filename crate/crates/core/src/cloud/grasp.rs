//! Grasp-point selection: among the `big_n` cloud points nearest to the
//! lifted skeleton center, pick the one whose own `small_n`-neighborhood
//! has the largest surface variation.

use std::cmp::Ordering;

use rayon::prelude::*;

use crate::camera::{deproject_pixel, CameraIntrinsics};
use crate::cloud::{knn, local_surface_stats, LocalSurfaceStats, PointCloud};
use crate::error::{Error, Result};
use crate::image::{BinaryMask, DepthImage, Pixel};
use crate::linalg::Vec3;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GraspParams {
    /// Candidate count around the skeleton center.
    pub big_n: usize,
    /// Neighborhood size for each σ evaluation.
    pub small_n: usize,
    /// Pixel radius searched for a valid depth when the center is a hole.
    pub hole_search_radius: usize,
}

impl Default for GraspParams {
    fn default() -> Self {
        Self {
            big_n: 50,
            small_n: 50,
            hole_search_radius: 5,
        }
    }
}

/// σ of one candidate; `None` when its neighborhood is degenerate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CandidateScore<T> {
    pub index: usize,
    pub sigma: Option<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GraspSelection<T> {
    pub grasp_point: Vec3<T>,
    /// Index of the grasp point in the cloud.
    pub grasp_index: usize,
    /// Cloud indices of the grasp point's `small_n` nearest neighbors.
    pub grasp_region: Vec<usize>,
    pub region_stats: LocalSurfaceStats<T>,
    /// Skeleton center lifted to 3-D.
    pub center_point: Vec3<T>,
    /// Pixel whose depth was used for the lift (differs from the center
    /// when the center sits on a depth hole).
    pub center_pixel: Pixel,
    pub candidates: Vec<CandidateScore<T>>,
}

/// Lifts a pixel to 3-D. If its depth is a hole, the nearest masked pixel
/// with valid depth within `radius` pixels is used instead (ties in
/// row-major order).
pub fn lift_center_pixel<T: Real>(
    center: Pixel,
    depth: &DepthImage,
    mask: &BinaryMask,
    intr: &CameraIntrinsics<T>,
    radius: usize,
) -> Result<(Vec3<T>, Pixel)> {
    mask.ensure_same_dims(depth.dims())?;
    let (r0, c0) = center;
    if r0 >= depth.height() || c0 >= depth.width() {
        return Err(Error::InvalidInput(format!(
            "center pixel {center:?} outside {}x{} image",
            depth.width(),
            depth.height()
        )));
    }
    let chosen = if depth.is_valid(r0, c0) {
        Some(center)
    } else {
        let r2 = radius * radius;
        let mut best: Option<(usize, Pixel)> = None;
        for r in r0.saturating_sub(radius)..=(r0 + radius).min(depth.height() - 1) {
            for c in c0.saturating_sub(radius)..=(c0 + radius).min(depth.width() - 1) {
                let d2 = r.abs_diff(r0).pow(2) + c.abs_diff(c0).pow(2);
                if d2 > r2 || !mask.get(r, c) || !depth.is_valid(r, c) {
                    continue;
                }
                if best.is_none_or(|(bd, _)| d2 < bd) {
                    best = Some((d2, (r, c)));
                }
            }
        }
        best.map(|(_, p)| p)
    };
    let (r, c) = chosen.ok_or_else(|| {
        Error::NoDetection(format!(
            "no valid depth within {radius} px of skeleton center {center:?}"
        ))
    })?;
    let p = deproject_pixel(
        T::from_count(c),
        T::from_count(r),
        T::lit(f64::from(depth.get(r, c))),
        intr,
    )?;
    Ok((p, (r, c)))
}

/// Selects the grasp point near `center_pixel`.
///
/// Candidates are the `big_n` cloud points nearest the lifted center; each
/// is scored by σ over its `small_n` nearest neighbors (itself included).
/// The highest σ wins, ties by lower cloud index; the winner's neighborhood
/// becomes the grasp region.
pub fn select_grasp_point<T: Real>(
    cloud: &PointCloud<T>,
    center_pixel: Pixel,
    depth: &DepthImage,
    mask: &BinaryMask,
    intr: &CameraIntrinsics<T>,
    params: &GraspParams,
) -> Result<GraspSelection<T>> {
    if cloud.is_empty() {
        return Err(Error::NoDetection("empty collar cloud".into()));
    }
    if params.big_n == 0 || params.small_n == 0 {
        return Err(Error::InvalidInput("cloud.big_n and cloud.small_n must be >= 1".into()));
    }
    let (center_point, used_pixel) =
        lift_center_pixel(center_pixel, depth, mask, intr, params.hole_search_radius)?;

    let pts = cloud.points();
    let candidate_idx = knn(pts, center_point, params.big_n)?;
    let candidates: Vec<CandidateScore<T>> = candidate_idx
        .par_iter()
        .map(|&i| {
            let nbrs = knn(pts, pts[i], params.small_n)?;
            let sigma = match local_surface_stats(&cloud.gather(&nbrs)) {
                Ok(s) => Some(s.sigma),
                Err(Error::Degenerate(_)) => None,
                Err(e) => return Err(e),
            };
            Ok(CandidateScore { index: i, sigma })
        })
        .collect::<Result<_>>()?;

    let best = candidates
        .iter()
        .max_by(|a, b| compare_scores(a, b))
        .expect("at least one candidate");

    let grasp_region = knn(pts, pts[best.index], params.small_n)?;
    let region_stats = local_surface_stats(&cloud.gather(&grasp_region))?;

    Ok(GraspSelection {
        grasp_point: pts[best.index],
        grasp_index: best.index,
        grasp_region,
        region_stats,
        center_point,
        center_pixel: used_pixel,
        candidates,
    })
}

/// Orders candidates so that `max_by` yields the highest σ and, among
/// equal σ, the lowest index. Degenerate candidates rank last.
fn compare_scores<T: Real>(a: &CandidateScore<T>, b: &CandidateScore<T>) -> Ordering {
    match (a.sigma, b.sigma) {
        (Some(x), Some(y)) => x.partial_cmp(&y).unwrap_or(Ordering::Equal),
        (Some(_), None) => Ordering::Greater,
        (None, Some(_)) => Ordering::Less,
        (None, None) => Ordering::Equal,
    }
    .then(b.index.cmp(&a.index))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::camera::Frame;

    fn intr() -> CameraIntrinsics<f64> {
        CameraIntrinsics::new(100.0, 100.0, 10.0, 10.0, 0.001).unwrap()
    }

    #[test]
    fn score_order() {
        let s = |index, sigma| CandidateScore { index, sigma };
        let v = [s(3, Some(0.1)), s(1, Some(0.2)), s(0, None), s(2, Some(0.2))];
        let best = v.iter().max_by(|a, b| compare_scores(a, b)).unwrap();
        assert_eq!(best.index, 1);
        let none = [s(4, None), s(2, None)];
        assert_eq!(none.iter().max_by(|a, b| compare_scores(a, b)).unwrap().index, 2);
    }

    #[test]
    fn hole_at_center_uses_nearest_valid_masked_pixel() {
        let mut depth = DepthImage::zeros(20, 20);
        let mut mask = BinaryMask::empty(20, 20);
        depth.set(10, 13, 900);
        depth.set(12, 10, 950);
        mask.set(12, 10, true);
        mask.set(10, 13, true);
        let (p, used) = lift_center_pixel(
            (10, 10),
            &depth,
            &mask,
            &intr(),
            5,
        )
        .unwrap();
        assert_eq!(used, (12, 10));
        assert!((p.z - 0.95).abs() < 1e-12);

        let lone = BinaryMask::empty(20, 20);
        assert!(matches!(
            lift_center_pixel::<f64>((10, 10), &depth, &lone, &intr(), 5),
            Err(Error::NoDetection(_))
        ));
    }

    #[test]
    fn flat_cloud_still_selects() {
        let mut depth = DepthImage::zeros(20, 20);
        let mut mask = BinaryMask::empty(20, 20);
        for r in 0..20 {
            for c in 0..20 {
                depth.set(r, c, 1000);
                mask.set(r, c, true);
            }
        }
        let cloud = crate::cloud::mask_to_cloud(&depth, &mask, &intr()).unwrap();
        let sel = select_grasp_point(&cloud, (10, 10), &depth, &mask, &intr(), &GraspParams::default())
            .unwrap();
        assert_eq!(sel.grasp_region.len(), 50);
        assert_eq!(sel.candidates.len(), 50);
        assert!(sel.region_stats.sigma < 1e-12);
        let again = select_grasp_point(&cloud, (10, 10), &depth, &mask, &intr(), &GraspParams::default())
            .unwrap();
        assert_eq!(sel, again);
    }

    #[test]
    fn coincident_cloud_is_degenerate() {
        let mut depth = DepthImage::zeros(5, 5);
        depth.set(2, 2, 1000);
        let mask = BinaryMask::from_pixels(5, 5, &[(2, 2)]);
        let cloud = PointCloud::new(vec![Vec3::new(0.0, 0.0, 1.0); 4], Frame::Camera).unwrap();
        let i = CameraIntrinsics::new(100.0, 100.0, 2.0, 2.0, 0.001).unwrap();
        assert!(matches!(
            select_grasp_point(&cloud, (2, 2), &depth, &mask, &i, &GraspParams::default()),
            Err(Error::Degenerate(_))
        ));
    }
}
