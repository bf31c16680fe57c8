//! Deterministic vantage-point tree.
//!
//! Construction is fixed: the vantage of a subtree is the first id of its
//! slice, the remaining ids are sorted by (distance to vantage, id), and
//! the split radius is the median distance. The inner child holds
//! distances <= radius, the outer child distances >= radius (ties may sit
//! on either side of the median cut, which the inclusive search bounds
//! tolerate). Queries rely on the metric's triangle inequality.

use super::{Metric, Neighbor};
use crate::geometry::DiskPoint;
use rayon::prelude::*;
use std::collections::BinaryHeap;

struct Node {
    id: usize,
    radius: f64,
    inner: Option<usize>,
    outer: Option<usize>,
}

struct VpTree<'a> {
    nodes: Vec<Node>,
    root: Option<usize>,
    points: &'a [DiskPoint],
    metric: Metric,
}

/// Closed-ball neighbor lists for every point, identical to the
/// brute-force reference: same ids, same distances, same order.
pub(super) fn all_neighbors(points: &[DiskPoint], k: usize, metric: Metric) -> Vec<Vec<Neighbor>> {
    let tree = VpTree::build(points, metric);
    (0..points.len())
        .into_par_iter()
        .map(|p| tree.neighbors_of(p, k))
        .collect()
}

/// Max-heap entry ordered by (distance, id) so the heap root is the
/// current worst of the k best candidates.
#[derive(Debug, Clone, Copy)]
struct HeapItem {
    distance: f64,
    id: usize,
}

impl PartialEq for HeapItem {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == std::cmp::Ordering::Equal
    }
}

impl Eq for HeapItem {}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.distance
            .total_cmp(&other.distance)
            .then(self.id.cmp(&other.id))
    }
}

impl<'a> VpTree<'a> {
    fn build(points: &'a [DiskPoint], metric: Metric) -> VpTree<'a> {
        let mut tree = VpTree {
            nodes: Vec::with_capacity(points.len()),
            root: None,
            points,
            metric,
        };
        tree.root = tree.build_rec((0..points.len()).collect());
        tree
    }

    fn build_rec(&mut self, mut ids: Vec<usize>) -> Option<usize> {
        let vantage = *ids.first()?;
        let rest = ids.split_off(1);
        if rest.is_empty() {
            self.nodes.push(Node {
                id: vantage,
                radius: 0.0,
                inner: None,
                outer: None,
            });
            return Some(self.nodes.len() - 1);
        }
        let mut by_dist: Vec<(f64, usize)> = rest
            .into_iter()
            .map(|q| (self.metric.distance(self.points[vantage], self.points[q]), q))
            .collect();
        by_dist.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mid = by_dist.len() / 2;
        let radius = by_dist[mid].0;
        let inner_ids = by_dist[..mid].iter().map(|&(_, q)| q).collect();
        let outer_ids = by_dist[mid..].iter().map(|&(_, q)| q).collect();
        let inner = self.build_rec(inner_ids);
        let outer = self.build_rec(outer_ids);
        self.nodes.push(Node {
            id: vantage,
            radius,
            inner,
            outer,
        });
        Some(self.nodes.len() - 1)
    }

    /// The closed-ball neighborhood of `p`: a k-NN descent establishes the
    /// k-th distance, then a range scan at that distance collects every
    /// tie. Two passes keep the tie semantics exact without complicating
    /// the heap bookkeeping.
    fn neighbors_of(&self, p: usize, k: usize) -> Vec<Neighbor> {
        let mut heap = BinaryHeap::with_capacity(k + 1);
        self.knn_rec(self.root, p, k, &mut heap);
        let dk = heap.peek().expect("k >= 1 and n >= 2 guarantee candidates").distance;
        let mut out = Vec::with_capacity(k);
        self.range_rec(self.root, p, dk, &mut out);
        out.sort_unstable_by(|a, b| a.distance.total_cmp(&b.distance).then(a.id.cmp(&b.id)));
        out
    }

    fn knn_rec(&self, node: Option<usize>, p: usize, k: usize, heap: &mut BinaryHeap<HeapItem>) {
        let Some(ni) = node else { return };
        let node = &self.nodes[ni];
        let d = self.metric.distance(self.points[p], self.points[node.id]);
        if node.id != p {
            let item = HeapItem { distance: d, id: node.id };
            if heap.len() < k {
                heap.push(item);
            } else if item < *heap.peek().expect("heap is non-empty") {
                heap.pop();
                heap.push(item);
            }
        }
        let tau = |heap: &BinaryHeap<HeapItem>| {
            if heap.len() < k {
                f64::INFINITY
            } else {
                heap.peek().expect("heap holds k items").distance
            }
        };
        // Inner child holds d(v, x) <= radius, outer holds >= radius;
        // descend the side containing the query first so tau tightens early.
        let children = if d < node.radius {
            [node.inner, node.outer]
        } else {
            [node.outer, node.inner]
        };
        for child in children {
            let t = tau(heap);
            let admissible = if child == node.inner {
                d - t <= node.radius
            } else {
                d + t >= node.radius
            };
            if admissible {
                self.knn_rec(child, p, k, heap);
            }
        }
    }

    fn range_rec(&self, node: Option<usize>, p: usize, limit: f64, out: &mut Vec<Neighbor>) {
        let Some(ni) = node else { return };
        let node = &self.nodes[ni];
        let d = self.metric.distance(self.points[p], self.points[node.id]);
        if node.id != p && d <= limit {
            out.push(Neighbor { id: node.id, distance: d });
        }
        if d - limit <= node.radius {
            self.range_rec(node.inner, p, limit, out);
        }
        if d + limit >= node.radius {
            self.range_rec(node.outer, p, limit, out);
        }
    }
}
