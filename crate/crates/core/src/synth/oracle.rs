//! Brute-force surface variation, written independently of the pipeline's
//! neighbor search and eigen solver so the two can be checked against each
//! other. Neighborhoods use the same ordering rule (distance, then index).

use std::f64::consts::PI;

use crate::linalg::Vec3;

type M3 = [[f64; 3]; 3];

/// The `n` nearest points to `points[i]` (itself included) by full sort.
fn neighborhood(points: &[Vec3<f64>], i: usize, n: usize) -> Vec<usize> {
    let q = points[i];
    let mut order: Vec<(f64, usize)> = points
        .iter()
        .enumerate()
        .map(|(j, p)| {
            let (dx, dy, dz) = (p.x - q.x, p.y - q.y, p.z - q.z);
            (dx * dx + dy * dy + dz * dz, j)
        })
        .collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    order.truncate(n);
    order.into_iter().map(|(_, j)| j).collect()
}

fn covariance(points: &[Vec3<f64>], idx: &[usize]) -> M3 {
    let n = idx.len() as f64;
    let mut mean = [0.0; 3];
    for &j in idx {
        let p = points[j].to_array();
        for a in 0..3 {
            mean[a] += p[a];
        }
    }
    for m in &mut mean {
        *m /= n;
    }
    let mut c = [[0.0; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            let mut s = 0.0;
            for &j in idx {
                let p = points[j].to_array();
                s += (p[a] - mean[a]) * (p[b] - mean[b]);
            }
            c[a][b] = s / n;
        }
    }
    c
}

/// Eigenvalues of a symmetric 3×3 matrix, ascending, by the trigonometric
/// closed form.
fn eigenvalues(a: &M3) -> [f64; 3] {
    let p1 = a[0][1].powi(2) + a[0][2].powi(2) + a[1][2].powi(2);
    let mut e = if p1 == 0.0 {
        [a[0][0], a[1][1], a[2][2]]
    } else {
        let q = (a[0][0] + a[1][1] + a[2][2]) / 3.0;
        let p2 = (a[0][0] - q).powi(2) + (a[1][1] - q).powi(2) + (a[2][2] - q).powi(2) + 2.0 * p1;
        let p = (p2 / 6.0).sqrt();
        let mut b = *a;
        for (i, row) in b.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (*v - if i == j { q } else { 0.0 }) / p;
            }
        }
        let det = b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1])
            - b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0])
            + b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
        let phi = (det / 2.0).clamp(-1.0, 1.0).acos() / 3.0;
        let hi = q + 2.0 * p * phi.cos();
        let lo = q + 2.0 * p * (phi + 2.0 * PI / 3.0).cos();
        [lo, 3.0 * q - hi - lo, hi]
    };
    e.sort_by(f64::total_cmp);
    e
}

/// Unit eigenvector for `lambda`: the longest cross product of two rows of
/// `A − λI`.
fn eigenvector(a: &M3, lambda: f64) -> Option<Vec3<f64>> {
    let row = |i: usize| {
        Vec3::new(
            a[i][0] - if i == 0 { lambda } else { 0.0 },
            a[i][1] - if i == 1 { lambda } else { 0.0 },
            a[i][2] - if i == 2 { lambda } else { 0.0 },
        )
    };
    let (r0, r1, r2) = (row(0), row(1), row(2));
    [r0.cross(r1), r0.cross(r2), r1.cross(r2)]
        .into_iter()
        .max_by(|x, y| x.norm_squared().total_cmp(&y.norm_squared()))
        .filter(|v| v.norm_squared() > 0.0)
        .map(|v| v / v.norm())
}

fn sigma_of(c: &M3) -> Option<(f64, [f64; 3])> {
    let e = eigenvalues(c).map(|l| l.max(0.0));
    let trace = e[0] + e[1] + e[2];
    (trace > 0.0).then(|| ((e[0] / trace).min(1.0 / 3.0), e))
}

/// σ for every point of `points` over its `n` nearest neighbors; `None`
/// where the neighborhood has zero variance.
pub fn oracle_sigma(points: &[Vec3<f64>], n: usize) -> Vec<Option<f64>> {
    use rayon::prelude::*;
    (0..points.len())
        .into_par_iter()
        .map(|i| sigma_of(&covariance(points, &neighborhood(points, i, n))).map(|(s, _)| s))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleGrasp {
    pub index: usize,
    pub sigma: f64,
    pub point: Vec3<f64>,
    /// Smallest-eigenvalue direction of the point's neighborhood, facing
    /// `view_point`.
    pub normal: Vec3<f64>,
}

/// Global maximum of [`oracle_sigma`] (ties by lower index) with its
/// neighborhood normal. `None` if every neighborhood is degenerate.
pub fn oracle_grasp(points: &[Vec3<f64>], n: usize, view_point: Vec3<f64>) -> Option<OracleGrasp> {
    let sigmas = oracle_sigma(points, n);
    let mut best: Option<(usize, f64)> = None;
    for (i, s) in sigmas.iter().enumerate() {
        if let Some(s) = *s {
            if best.is_none_or(|(_, b)| s > b) {
                best = Some((i, s));
            }
        }
    }
    let (index, sigma) = best?;
    let c = covariance(points, &neighborhood(points, index, n));
    let (_, e) = sigma_of(&c)?;
    let mut normal = eigenvector(&c, e[0]).unwrap_or(Vec3::new(0.0, 0.0, -1.0));
    if normal.dot(view_point - points[index]) < 0.0 {
        normal = -normal;
    }
    Some(OracleGrasp {
        index,
        sigma,
        point: points[index],
        normal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_eigenvalues() {
        let d = [[3.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 2.0]];
        assert_eq!(eigenvalues(&d), [1.0, 2.0, 3.0]);
        // [[2,1,0],[1,2,0],[0,0,5]] has eigenvalues 1, 3, 5.
        let a = [[2.0, 1.0, 0.0], [1.0, 2.0, 0.0], [0.0, 0.0, 5.0]];
        let e = eigenvalues(&a);
        for (got, want) in e.iter().zip([1.0, 3.0, 5.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        let v = eigenvector(&a, 1.0).unwrap();
        assert!((v.x + v.y).abs() < 1e-12 && v.z.abs() < 1e-12);
    }

    #[test]
    fn plane_and_cube() {
        let plane: Vec<_> = (0..100)
            .map(|i| Vec3::new((i % 10) as f64 * 0.01, (i / 10) as f64 * 0.01, 0.5))
            .collect();
        assert!(oracle_sigma(&plane, 20).iter().all(|s| s.unwrap() < 1e-9));
        let cube: Vec<_> = (0..8)
            .map(|i| Vec3::new((i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64 + 1.0))
            .collect();
        for s in oracle_sigma(&cube, 8) {
            assert!((s.unwrap() - 1.0 / 3.0).abs() < 1e-12);
        }
    }
}
