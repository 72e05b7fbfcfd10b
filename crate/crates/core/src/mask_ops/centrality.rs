//! Pixel graph of a skeleton and closeness-centrality center selection.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::image::{BinaryMask, Pixel};

/// Undirected 8-connected graph over skeleton pixels.
///
/// Nodes are stored in row-major order, so node index order equals
/// lexicographic `(row, col)` order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkeletonGraph {
    pub nodes: Vec<Pixel>,
    /// Sorted neighbor indices per node.
    pub adjacency: Vec<Vec<usize>>,
}

impl SkeletonGraph {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    fn is_diagonal(&self, a: usize, b: usize) -> bool {
        let (ra, ca) = self.nodes[a];
        let (rb, cb) = self.nodes[b];
        ra != rb && ca != cb
    }

    /// Connected components as sorted node-index lists, ordered by their
    /// smallest node.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut comp = vec![usize::MAX; self.len()];
        let mut out = Vec::new();
        let mut queue = VecDeque::new();
        for start in 0..self.len() {
            if comp[start] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut members = vec![start];
            comp[start] = id;
            queue.push_back(start);
            while let Some(u) = queue.pop_front() {
                for &v in &self.adjacency[u] {
                    if comp[v] == usize::MAX {
                        comp[v] = id;
                        members.push(v);
                        queue.push_back(v);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }
}

/// One node per set pixel, one unit edge per 8-neighbor pair.
pub fn skeleton_graph(skeleton: &BinaryMask) -> SkeletonGraph {
    let (w, h) = skeleton.dims();
    let nodes: Vec<Pixel> = skeleton.pixels().collect();
    let mut index = vec![usize::MAX; w * h];
    for (i, &(r, c)) in nodes.iter().enumerate() {
        index[r * w + c] = i;
    }
    let adjacency = nodes
        .iter()
        .map(|&(r, c)| {
            let mut nbrs = Vec::with_capacity(8);
            for dr in -1isize..=1 {
                for dc in -1isize..=1 {
                    if (dr, dc) == (0, 0) {
                        continue;
                    }
                    let (nr, nc) = (r as isize + dr, c as isize + dc);
                    if skeleton.get_signed(nr, nc) {
                        nbrs.push(index[nr as usize * w + nc as usize]);
                    }
                }
            }
            // Offsets were visited in row-major order, hence already sorted.
            nbrs
        })
        .collect();
    SkeletonGraph { nodes, adjacency }
}

/// Closeness result for the chosen center.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Centrality {
    pub center: Pixel,
    /// Sum of shortest-path lengths from the center to every other node of
    /// its component.
    pub distance_sum: f64,
    pub component_size: usize,
}

impl Centrality {
    /// Closeness as the inverse distance sum (infinite for a lone node).
    pub fn closeness(&self) -> f64 {
        1.0 / self.distance_sum
    }
}

/// Node of maximum closeness within the largest connected component.
///
/// Orthogonal hops cost 1 and diagonal hops `diagonal_weight`; with the
/// default weight of 1 distances are BFS hop counts. Ties go to the
/// smallest `(row, col)`; the largest-component tie goes to the component
/// holding the smaller pixel.
pub fn closeness_center(graph: &SkeletonGraph, diagonal_weight: f64) -> Result<Centrality> {
    if graph.is_empty() {
        return Err(Error::NoDetection("empty skeleton graph".into()));
    }
    if !(diagonal_weight > 0.0) || !diagonal_weight.is_finite() {
        return Err(Error::InvalidInput(format!(
            "diagonal_weight must be positive, got {diagonal_weight}"
        )));
    }
    let components = graph.components();
    let largest = components
        .iter()
        .min_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])))
        .expect("non-empty graph has a component");

    let sums: Vec<f64> = if diagonal_weight == 1.0 {
        largest
            .par_iter()
            .map(|&s| bfs_distance_sum(graph, s) as f64)
            .collect()
    } else {
        largest
            .par_iter()
            .map(|&s| dijkstra_distance_sum(graph, s, diagonal_weight))
            .collect()
    };

    let (best, sum) = largest
        .iter()
        .zip(&sums)
        .min_by(|(ia, sa), (ib, sb)| {
            sa.partial_cmp(sb).unwrap_or(Ordering::Equal).then(ia.cmp(ib))
        })
        .map(|(&i, &s)| (i, s))
        .expect("component is non-empty");

    Ok(Centrality {
        center: graph.nodes[best],
        distance_sum: sum,
        component_size: largest.len(),
    })
}

fn bfs_distance_sum(graph: &SkeletonGraph, source: usize) -> u64 {
    let mut dist = vec![u32::MAX; graph.len()];
    let mut queue = VecDeque::new();
    dist[source] = 0;
    queue.push_back(source);
    let mut total = 0u64;
    while let Some(u) = queue.pop_front() {
        total += u64::from(dist[u]);
        for &v in &graph.adjacency[u] {
            if dist[v] == u32::MAX {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    total
}

#[derive(PartialEq)]
struct HeapEntry(f64, usize);

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .0
            .partial_cmp(&self.0)
            .unwrap_or(Ordering::Equal)
            .then(other.1.cmp(&self.1))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn dijkstra_distance_sum(graph: &SkeletonGraph, source: usize, diagonal_weight: f64) -> f64 {
    let mut dist = vec![f64::INFINITY; graph.len()];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(HeapEntry(0.0, source));
    while let Some(HeapEntry(d, u)) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        for &v in &graph.adjacency[u] {
            let w = if graph.is_diagonal(u, v) {
                diagonal_weight
            } else {
                1.0
            };
            let nd = d + w;
            if nd < dist[v] {
                dist[v] = nd;
                heap.push(HeapEntry(nd, v));
            }
        }
    }
    dist.iter().filter(|d| d.is_finite()).sum()
}
