//! Local covariance analysis and surface variation.
//!
//! For a neighborhood `p_1..p_n`: centroid `μ = (1/n) Σ p_j`, covariance
//! `C = (1/n) Σ (p_j − μ)(p_j − μ)ᵀ`, eigenpairs `C v_k = λ_k v_k` with
//! `λ0 ≤ λ1 ≤ λ2`, and surface variation `σ = λ0 / (λ0 + λ1 + λ2)`.
//! σ is 0 on a plane and at most 1/3 (isotropic scatter).

use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigen, Mat3, Vec3};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocalSurfaceStats<T> {
    pub centroid: Vec3<T>,
    pub covariance: Mat3<T>,
    /// Ascending, non-negative.
    pub eigenvalues: [T; 3],
    /// Unit eigenvectors matching `eigenvalues`; `eigenvectors[0]` is the
    /// surface normal estimate, `eigenvectors[2]` the dominant direction.
    pub eigenvectors: [Vec3<T>; 3],
    pub sigma: T,
}

impl<T: Real> LocalSurfaceStats<T> {
    pub fn eigen_trace(&self) -> T {
        self.eigenvalues[0] + self.eigenvalues[1] + self.eigenvalues[2]
    }
}

/// Centroid, biased covariance, sorted eigen decomposition and σ of a
/// neighborhood.
///
/// Fails with `InvalidInput` on an empty slice and `Degenerate` when all
/// points coincide (total variance at round-off level).
pub fn local_surface_stats<T: Real>(points: &[Vec3<T>]) -> Result<LocalSurfaceStats<T>> {
    if points.is_empty() {
        return Err(Error::InvalidInput(
            "surface statistics need at least one point".into(),
        ));
    }
    let n = T::from_count(points.len());
    let centroid = points.iter().fold(Vec3::zeros(), |acc, &p| acc + p) / n;

    let mut covariance = Mat3::zeros();
    for &p in points {
        let d = p - centroid;
        covariance = covariance.add_mat(&d.outer(d));
    }
    let covariance = covariance.scale(T::one() / n);

    let eig = symmetric_eigen(&covariance);
    // The covariance is positive semi-definite; negative values are round-off.
    let eigenvalues = eig.values.map(|l| l.max(T::zero()));
    let trace = eigenvalues[0] + eigenvalues[1] + eigenvalues[2];
    // Coincident points leave a centroid round-off residue of order
    // (eps · |p|)², which is not real spread.
    let scale = points
        .iter()
        .fold(T::zero(), |m, p| m.max(p.x.abs()).max(p.y.abs()).max(p.z.abs()));
    let residue = T::epsilon() * T::lit(16.0) * scale;
    if !(trace > residue * residue) {
        return Err(Error::Degenerate(format!(
            "{} neighborhood points coincide",
            points.len()
        )));
    }
    let third = T::one() / T::lit(3.0);
    let sigma = (eigenvalues[0] / trace).min(third);
    debug_assert!(sigma >= T::zero() && sigma <= third, "sigma {sigma} out of [0, 1/3]");

    Ok(LocalSurfaceStats {
        centroid,
        covariance,
        eigenvalues,
        eigenvectors: eig.vectors,
        sigma,
    })
}
