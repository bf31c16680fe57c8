//! Closed-ball k-nearest-neighbor search over a pluggable metric, plus the
//! neighborhood quantities both detectors consume.
//!
//! The neighborhood of `p` is the set `{q : d(q, p) <= d_k(p)}` with
//! `d_k(p)` the k-th smallest distance, so a list is longer than `k`
//! exactly when ties sit at the k-th distance. Lists are sorted by
//! `(distance, id)`; every downstream sum runs in that fixed order, which
//! is what makes scores bit-reproducible across index strategies and
//! thread counts.

use crate::datasets::Dataset;
use crate::geometry::{self, DiskPoint};
use rayon::prelude::*;
use thiserror::Error;

mod vptree;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Hyperbolic,
    Euclidean,
}

impl Metric {
    pub fn distance(self, a: DiskPoint, b: DiskPoint) -> f64 {
        match self {
            Metric::Hyperbolic => geometry::rao_distance(a, b),
            Metric::Euclidean => geometry::euclidean_distance(a, b),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Metric::Hyperbolic => "hyperbolic",
            Metric::Euclidean => "euclidean",
        }
    }
}

/// Brute force is the reference; the vantage-point tree must return
/// identical neighborhoods and exists purely as a faster option.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IndexStrategy {
    #[default]
    Brute,
    VpTree,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    pub id: usize,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NeighborsError {
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("k must be at least 1")]
    ZeroK,
    #[error("k = {k} is too large for this dataset (max {max})")]
    KTooLarge { k: usize, max: usize },
    #[error("point id {0} is out of range")]
    UnknownId(usize),
}

/// Per-point closed-ball neighborhoods of an immutable dataset.
#[derive(Debug, Clone)]
pub struct NeighborhoodIndex {
    metric: Metric,
    k: usize,
    points: Vec<DiskPoint>,
    neighbors: Vec<Vec<Neighbor>>,
    k_distance: Vec<f64>,
}

/// Builds the index. Requires `1 <= k <= |data| - 1`.
pub fn build_index(
    data: &Dataset,
    k: usize,
    metric: Metric,
    strategy: IndexStrategy,
) -> Result<NeighborhoodIndex, NeighborsError> {
    let n = data.len();
    if n == 0 {
        return Err(NeighborsError::EmptyDataset);
    }
    if k == 0 {
        return Err(NeighborsError::ZeroK);
    }
    if k > n - 1 {
        return Err(NeighborsError::KTooLarge { k, max: n - 1 });
    }
    let points = data.points().to_vec();
    let neighbors = match strategy {
        IndexStrategy::Brute => brute_neighbors(&points, k, metric),
        IndexStrategy::VpTree => vptree::all_neighbors(&points, k, metric),
    };
    let k_distance = neighbors.iter().map(|list| list[k - 1].distance).collect();
    Ok(NeighborhoodIndex {
        metric,
        k,
        points,
        neighbors,
        k_distance,
    })
}

fn brute_neighbors(points: &[DiskPoint], k: usize, metric: Metric) -> Vec<Vec<Neighbor>> {
    (0..points.len())
        .into_par_iter()
        .map(|p| {
            let mut all: Vec<Neighbor> = (0..points.len())
                .filter(|&q| q != p)
                .map(|q| Neighbor {
                    id: q,
                    distance: metric.distance(points[p], points[q]),
                })
                .collect();
            all.sort_unstable_by(|a, b| a.distance.total_cmp(&b.distance).then(a.id.cmp(&b.id)));
            let dk = all[k - 1].distance;
            let keep = all.partition_point(|nb| nb.distance <= dk);
            all.truncate(keep);
            all
        })
        .collect()
}

impl NeighborhoodIndex {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    fn check(&self, id: usize) -> Result<(), NeighborsError> {
        if id < self.points.len() {
            Ok(())
        } else {
            Err(NeighborsError::UnknownId(id))
        }
    }

    /// Neighbor list of `id`, ascending by `(distance, id)`, length >= k.
    pub fn neighbors(&self, id: usize) -> Result<&[Neighbor], NeighborsError> {
        self.check(id)?;
        Ok(&self.neighbors[id])
    }

    /// Distance from `id` to its k-th nearest neighbor.
    pub fn k_distance(&self, id: usize) -> Result<f64, NeighborsError> {
        self.check(id)?;
        Ok(self.k_distance[id])
    }

    /// Metric distance between two indexed points.
    pub fn distance(&self, a: usize, b: usize) -> Result<f64, NeighborsError> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.metric.distance(self.points[a], self.points[b]))
    }

    /// Reachability distance `max(k_distance(p), d(p, o))`.
    ///
    /// # Panics
    /// Panics when `p == o`; the quantity is defined for distinct points.
    pub fn reach_dist(&self, p: usize, o: usize) -> Result<f64, NeighborsError> {
        assert!(p != o, "reach_dist requires distinct point ids, got {p} twice");
        self.check(p)?;
        self.check(o)?;
        Ok(self.k_distance[p].max(self.metric.distance(self.points[p], self.points[o])))
    }

    /// Root-mean-square distance from `o` to its neighborhood, the sigma_r
    /// that parameterizes the per-point Gaussian. Zero when every neighbor
    /// coincides with `o`.
    pub fn standard_distance(&self, o: usize) -> Result<f64, NeighborsError> {
        self.check(o)?;
        let list = &self.neighbors[o];
        let sum_sq: f64 = list.iter().map(|nb| nb.distance * nb.distance).sum();
        Ok((sum_sq / list.len() as f64).sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dataset(coords: &[(f64, f64)]) -> Dataset {
        let points = coords
            .iter()
            .map(|&(x, y)| DiskPoint::new(x, y).expect("test point must be valid"))
            .collect();
        Dataset::from_points(points)
    }

    // Geodesic coordinate along a diameter: on the x-axis the Rao distance
    // between points is |u(a) - u(b)| with u(x) = 2 artanh(x).
    fn u(x: f64) -> f64 {
        2.0 * x.atanh()
    }

    #[test]
    fn validates_k_and_dataset() {
        let data = dataset(&[(0.0, 0.0), (0.1, 0.0), (0.2, 0.0)]);
        assert!(matches!(
            build_index(&Dataset::from_points(vec![]), 1, Metric::Hyperbolic, IndexStrategy::Brute),
            Err(NeighborsError::EmptyDataset)
        ));
        assert!(matches!(
            build_index(&data, 0, Metric::Hyperbolic, IndexStrategy::Brute),
            Err(NeighborsError::ZeroK)
        ));
        assert!(matches!(
            build_index(&data, 3, Metric::Hyperbolic, IndexStrategy::Brute),
            Err(NeighborsError::KTooLarge { k: 3, max: 2 })
        ));
        assert!(build_index(&data, 2, Metric::Hyperbolic, IndexStrategy::Brute).is_ok());
    }

    #[test]
    fn collinear_points_pick_their_nearest() {
        let data = dataset(&[(0.0, 0.0), (0.1, 0.0), (0.25, 0.0)]);
        let idx = build_index(&data, 1, Metric::Hyperbolic, IndexStrategy::Brute).unwrap();
        assert_eq!(idx.neighbors(0).unwrap()[0].id, 1);
        assert_eq!(idx.neighbors(1).unwrap()[0].id, 0);
        assert_eq!(idx.neighbors(2).unwrap()[0].id, 1);
    }

    #[test]
    fn full_k_gives_exhaustive_neighborhoods() {
        let data = dataset(&[(0.0, 0.0), (0.1, 0.0), (0.2, 0.1), (-0.3, 0.2)]);
        let idx = build_index(&data, 3, Metric::Euclidean, IndexStrategy::Brute).unwrap();
        for id in 0..4 {
            assert_eq!(idx.neighbors(id).unwrap().len(), 3);
        }
    }

    #[test]
    fn ties_at_the_kth_distance_are_all_included() {
        // p1 and p2 are mirror images of each other relative to p0.
        let data = dataset(&[(0.0, 0.0), (0.2, 0.0), (-0.2, 0.0), (0.5, 0.0)]);
        let idx = build_index(&data, 1, Metric::Hyperbolic, IndexStrategy::Brute).unwrap();
        let nbrs = idx.neighbors(0).unwrap();
        assert_eq!(nbrs.len(), 2, "tie at the 1st distance must widen the list");
        assert_eq!(nbrs[0].id, 1);
        assert_eq!(nbrs[1].id, 2);
        assert_eq!(nbrs[0].distance, nbrs[1].distance);
        assert_eq!(idx.k_distance(0).unwrap(), nbrs[0].distance);
    }

    #[test]
    fn unknown_ids_are_rejected() {
        let data = dataset(&[(0.0, 0.0), (0.1, 0.0)]);
        let idx = build_index(&data, 1, Metric::Hyperbolic, IndexStrategy::Brute).unwrap();
        assert!(matches!(idx.neighbors(2), Err(NeighborsError::UnknownId(2))));
        assert!(matches!(idx.k_distance(9), Err(NeighborsError::UnknownId(9))));
        assert!(matches!(idx.reach_dist(0, 5), Err(NeighborsError::UnknownId(5))));
        assert!(matches!(idx.standard_distance(7), Err(NeighborsError::UnknownId(7))));
    }

    #[test]
    fn reach_dist_picks_the_larger_of_kdist_and_distance() {
        let xs = [0.0, 0.1, 0.2, 0.35, -0.15];
        let data = dataset(&xs.map(|x| (x, 0.0)));
        let idx = build_index(&data, 2, Metric::Hyperbolic, IndexStrategy::Brute).unwrap();
        // Hand computation via the diameter coordinate u(x) = 2 artanh(x):
        // d_2(p0) = |u(-0.15)| (second closest to p0).
        let dk0 = u(0.15);
        assert!((idx.k_distance(0).unwrap() - dk0).abs() < 1e-15);
        // o = p1 sits inside p0's ball: reach_dist = d_2(p0).
        let r01 = idx.reach_dist(0, 1).unwrap();
        assert!((r01 - dk0).abs() < 1e-15);
        // o = p3 sits far outside: reach_dist = d(p0, p3).
        let r03 = idx.reach_dist(0, 3).unwrap();
        assert!((r03 - u(0.35)).abs() < 1e-15);
        assert!(r03 > dk0);
        // Full 5-point cross-check of both invariant inequalities.
        for p in 0..5 {
            for o in 0..5 {
                if p == o {
                    continue;
                }
                let r = idx.reach_dist(p, o).unwrap();
                assert!(r >= idx.distance(p, o).unwrap());
                assert!(r >= idx.k_distance(p).unwrap());
            }
        }
    }

    #[test]
    fn standard_distance_is_the_rms_of_neighbor_distances() {
        // Neighbors of the origin at Rao distances exactly 1, 2, 2.
        let t1 = (0.5_f64).tanh();
        let t2 = (1.0_f64).tanh();
        let data = dataset(&[(0.0, 0.0), (t1, 0.0), (t2, 0.0), (-t2, 0.0)]);
        let idx = build_index(&data, 3, Metric::Hyperbolic, IndexStrategy::Brute).unwrap();
        let sigma = idx.standard_distance(0).unwrap();
        assert!((sigma - 3.0_f64.sqrt()).abs() < 1e-12, "sigma = {sigma}");
    }

    #[test]
    fn standard_distance_of_duplicates_is_zero() {
        let data = dataset(&[(0.1, 0.1), (0.1, 0.1), (0.1, 0.1)]);
        let idx = build_index(&data, 2, Metric::Hyperbolic, IndexStrategy::Brute).unwrap();
        assert_eq!(idx.standard_distance(0).unwrap(), 0.0);
        assert_eq!(idx.k_distance(0).unwrap(), 0.0);
        assert_eq!(idx.neighbors(0).unwrap().len(), 2);
    }

    #[test]
    fn all_neighbors_at_one_distance_give_that_standard_distance() {
        // Four points at the corners of a Euclidean square around p0.
        let data = dataset(&[(0.0, 0.0), (0.1, 0.0), (-0.1, 0.0), (0.0, 0.1), (0.0, -0.1)]);
        let idx = build_index(&data, 4, Metric::Euclidean, IndexStrategy::Brute).unwrap();
        assert!((idx.standard_distance(0).unwrap() - 0.1).abs() < 1e-16);
    }

    #[test]
    fn k_distance_is_monotone_in_k() {
        let data = dataset(&[(0.0, 0.0), (0.1, 0.05), (0.3, -0.2), (-0.4, 0.1), (0.2, 0.6)]);
        let mut prev = vec![0.0; data.len()];
        for k in 1..data.len() {
            let idx = build_index(&data, k, Metric::Hyperbolic, IndexStrategy::Brute).unwrap();
            for (id, floor) in prev.iter_mut().enumerate() {
                let dk = idx.k_distance(id).unwrap();
                assert!(dk >= *floor, "k = {k}, id = {id}");
                *floor = dk;
            }
        }
    }

    prop_compose! {
        fn random_dataset()(coords in prop::collection::vec((-0.65..0.65f64, -0.65..0.65f64), 3..40))
            -> Dataset
        {
            dataset(&coords)
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn vptree_equals_brute_force(data in random_dataset(), k_seed in 0usize..100) {
            for metric in [Metric::Hyperbolic, Metric::Euclidean] {
                let k = 1 + k_seed % (data.len() - 1);
                let brute = build_index(&data, k, metric, IndexStrategy::Brute).unwrap();
                let vp = build_index(&data, k, metric, IndexStrategy::VpTree).unwrap();
                for id in 0..data.len() {
                    prop_assert_eq!(brute.k_distance(id).unwrap(), vp.k_distance(id).unwrap());
                    prop_assert_eq!(brute.neighbors(id).unwrap(), vp.neighbors(id).unwrap());
                }
            }
        }
    }
}
