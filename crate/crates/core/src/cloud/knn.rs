use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::linalg::Vec3;
use crate::scalar::Real;

/// Indices of the `min(k, len)` points nearest to `query`, closest first.
/// Equal distances are ordered by index. Exact (exhaustive) search.
pub fn knn<T: Real>(points: &[Vec3<T>], query: Vec3<T>, k: usize) -> Result<Vec<usize>> {
    if points.is_empty() {
        return Err(Error::NoDetection("nearest-neighbor query on empty cloud".into()));
    }
    if k == 0 {
        return Err(Error::InvalidInput("k must be >= 1".into()));
    }
    let mut scored: Vec<(T, usize)> = points
        .iter()
        .enumerate()
        .map(|(i, p)| (p.distance_squared(query), i))
        .collect();
    let order = |a: &(T, usize), b: &(T, usize)| {
        a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal).then(a.1.cmp(&b.1))
    };
    let k = k.min(scored.len());
    if k < scored.len() {
        scored.select_nth_unstable_by(k - 1, order);
        scored.truncate(k);
    }
    scored.sort_unstable_by(order);
    Ok(scored.into_iter().map(|(_, i)| i).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line() -> Vec<Vec3<f64>> {
        (0..10).map(|i| Vec3::new(i as f64, 0.0, 1.0)).collect()
    }

    #[test]
    fn query_on_point() {
        assert_eq!(knn(&line(), Vec3::new(4.0, 0.0, 1.0), 1).unwrap(), vec![4]);
    }

    #[test]
    fn k_exceeds_len() {
        let got = knn(&line(), Vec3::new(0.0, 0.0, 1.0), 50).unwrap();
        assert_eq!(got, (0..10).collect::<Vec<_>>());
    }

    #[test]
    fn ties_by_index() {
        let got = knn(&line(), Vec3::new(4.5, 0.0, 1.0), 2).unwrap();
        assert_eq!(got, vec![4, 5]);
        let got = knn(&line(), Vec3::new(4.5, 0.0, 1.0), 3).unwrap();
        assert_eq!(got, vec![4, 5, 3]);
    }

    #[test]
    fn errors() {
        assert!(knn::<f64>(&[], Vec3::zeros(), 1).is_err());
        assert!(knn(&line(), Vec3::zeros(), 0).is_err());
    }
}
