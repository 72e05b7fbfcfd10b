use std::collections::{BTreeMap, HashMap};

use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::linalg::Vec3;
use crate::scalar::Real;

type Key = (i64, i64, i64);

fn cell_of<T: Real>(p: Vec3<T>, size: T) -> Key {
    let f = |v: T| (v / size).floor().to_i64().expect("finite cell coordinate");
    (f(p.x), f(p.y), f(p.z))
}

/// Replaces the points of every occupied voxel (grid anchored at the
/// origin, edge `voxel`) with their centroid. Output is ordered by voxel
/// key.
pub fn voxel_downsample<T: Real>(cloud: &PointCloud<T>, voxel: T) -> Result<PointCloud<T>> {
    if !(voxel > T::zero()) || !voxel.is_finite() {
        return Err(Error::InvalidInput(format!("voxel must be > 0, got {voxel}")));
    }
    let mut buckets: BTreeMap<Key, (Vec3<T>, usize)> = BTreeMap::new();
    for &p in cloud.points() {
        let slot = buckets.entry(cell_of(p, voxel)).or_insert((Vec3::zeros(), 0));
        slot.0 += p;
        slot.1 += 1;
    }
    let points = buckets
        .into_values()
        .map(|(sum, n)| sum / T::from_count(n))
        .collect();
    Ok(cloud.with_points(points))
}

/// Keeps the points that have at least `min_neighbors` other points within
/// distance `radius` (inclusive). Order is preserved.
pub fn radius_outlier_removal<T: Real>(
    cloud: &PointCloud<T>,
    radius: T,
    min_neighbors: usize,
) -> Result<PointCloud<T>> {
    if !(radius > T::zero()) || !radius.is_finite() || min_neighbors == 0 {
        return Err(Error::InvalidInput(format!(
            "outlier removal needs radius > 0 and min_neighbors >= 1 (got {radius}, {min_neighbors})"
        )));
    }
    let pts = cloud.points();
    let mut grid: HashMap<Key, Vec<usize>> = HashMap::new();
    for (i, &p) in pts.iter().enumerate() {
        grid.entry(cell_of(p, radius)).or_default().push(i);
    }
    let r2 = radius * radius;
    let kept = pts
        .iter()
        .enumerate()
        .filter(|&(i, &p)| {
            let (cx, cy, cz) = cell_of(p, radius);
            let mut count = 0;
            for dx in -1..=1 {
                for dy in -1..=1 {
                    for dz in -1..=1 {
                        let Some(members) = grid.get(&(cx + dx, cy + dy, cz + dz)) else {
                            continue;
                        };
                        for &j in members {
                            if j != i && pts[j].distance_squared(p) <= r2 {
                                count += 1;
                                if count >= min_neighbors {
                                    return true;
                                }
                            }
                        }
                    }
                }
            }
            false
        })
        .map(|(_, &p)| p)
        .collect();
    Ok(cloud.with_points(kept))
}
