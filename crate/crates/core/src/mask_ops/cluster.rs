//! Single-linkage clustering of mask pixels under a distance threshold.
//!
//! Single-linkage agglomeration stopped at `link_dist` yields exactly the
//! connected components of the graph joining every pixel pair within
//! `link_dist`, which is what is computed here with a union-find over a
//! bucket grid.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::image::{BinaryMask, Pixel};

/// One connected group of mask pixels. `pixels` are in row-major order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PixelCluster {
    pub id: usize,
    pub pixels: Vec<Pixel>,
}

impl PixelCluster {
    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    /// Smallest `(row, col)` member.
    pub fn min_pixel(&self) -> Option<Pixel> {
        self.pixels.first().copied()
    }

    pub fn to_mask(&self, width: usize, height: usize) -> BinaryMask {
        BinaryMask::from_pixels(width, height, &self.pixels)
    }
}

/// Union-find with path halving and union by size.
#[derive(Debug)]
pub(crate) struct DisjointSets {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl DisjointSets {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
    }
}

/// Partitions the set pixels of `mask` into clusters.
///
/// Two pixels share a cluster iff a chain of pixels links them with every
/// hop at Euclidean distance `<= link_dist`. Clusters are numbered in
/// row-major order of their first pixel. An all-zero mask gives an empty
/// list.
pub fn cluster_mask(mask: &BinaryMask, link_dist: f64) -> Result<Vec<PixelCluster>> {
    if !(link_dist > 0.0) || !link_dist.is_finite() {
        return Err(Error::InvalidInput(format!(
            "link_dist must be positive, got {link_dist}"
        )));
    }
    let pixels: Vec<Pixel> = mask.pixels().collect();
    if pixels.is_empty() {
        return Ok(Vec::new());
    }

    // Buckets at least link_dist wide: linked pairs sit in adjacent buckets.
    let cell = link_dist.ceil().max(1.0) as usize;
    let mut buckets: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (i, &(r, c)) in pixels.iter().enumerate() {
        buckets.entry((r / cell, c / cell)).or_default().push(i);
    }

    let max_sq = link_dist * link_dist;
    let mut sets = DisjointSets::new(pixels.len());
    for (i, &(r, c)) in pixels.iter().enumerate() {
        let (br, bc) = (r / cell, c / cell);
        for nbr in br.saturating_sub(1)..=br + 1 {
            for nbc in bc.saturating_sub(1)..=bc + 1 {
                let Some(members) = buckets.get(&(nbr, nbc)) else {
                    continue;
                };
                for &j in members {
                    if j <= i {
                        continue;
                    }
                    let (rj, cj) = pixels[j];
                    let dr = r.abs_diff(rj) as f64;
                    let dc = c.abs_diff(cj) as f64;
                    if dr * dr + dc * dc <= max_sq {
                        sets.union(i, j);
                    }
                }
            }
        }
    }

    let mut cluster_of_root: HashMap<usize, usize> = HashMap::new();
    let mut clusters: Vec<PixelCluster> = Vec::new();
    for (i, &p) in pixels.iter().enumerate() {
        let root = sets.find(i);
        let id = *cluster_of_root.entry(root).or_insert_with(|| {
            clusters.push(PixelCluster {
                id: clusters.len(),
                pixels: Vec::new(),
            });
            clusters.len() - 1
        });
        clusters[id].pixels.push(p);
    }
    Ok(clusters)
}

/// The cluster with the most pixels; ties go to the cluster whose smallest
/// pixel is lexicographically smaller.
pub fn largest_cluster(clusters: &[PixelCluster]) -> Result<&PixelCluster> {
    clusters
        .iter()
        .filter(|c| !c.is_empty())
        .min_by(|a, b| b.len().cmp(&a.len()).then(a.min_pixel().cmp(&b.min_pixel())))
        .ok_or_else(|| Error::NoDetection("no clusters in mask".into()))
}
