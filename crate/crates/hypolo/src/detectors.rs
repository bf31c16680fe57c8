//! The two detector families: a local outlier factor (`hlof`) and a local
//! outlier probability (`hloop`), both generic over the metric so the
//! Euclidean baselines fall out of the same plumbing.
//!
//! `hloop` turns each point's RMS neighborhood distance sigma_r into a
//! probabilistic set distance by inverting the hyperbolic Gaussian CDF at
//! level phi; `loop_euclidean` is the same pipeline with the Euclidean
//! metric and the half-Gaussian quantile `sqrt(2) erfinv(phi) sigma_r`.
//! Keeping one pipeline isolates exactly what the hyperbolic variant
//! changes: the metric and the quantile rule.
//!
//! Determinism: per-point sums run in neighbor-list order (fixed by the
//! index), and the two dataset-wide aggregates (the mean quantile
//! multiplier and the PLOF second moment) are summed in ascending value
//! order, so scores are bit-identical for any thread count and any
//! permutation of tie-free input.

use crate::datasets::Dataset;
use crate::hgauss::{HGaussError, HGaussModel};
use crate::neighbors::{self, IndexStrategy, Metric, Neighbor, NeighborsError};
use crate::special;
use rayon::prelude::*;
use std::f64::consts::SQRT_2;
use thiserror::Error;

/// Probability level used by `hloop` when the config leaves phi unset.
pub const DEFAULT_PHI: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Hlof,
    Hloop,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Hlof => "hlof",
            Method::Hloop => "hloop",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectorConfig {
    pub method: Method,
    pub k: usize,
    /// Probability level phi; meaningful only for `Method::Hloop`
    /// (`None` there means [`DEFAULT_PHI`]).
    pub phi: Option<f64>,
    pub metric: Metric,
    pub strategy: IndexStrategy,
}

impl DetectorConfig {
    pub fn hlof(k: usize) -> DetectorConfig {
        DetectorConfig {
            method: Method::Hlof,
            k,
            phi: None,
            metric: Metric::Hyperbolic,
            strategy: IndexStrategy::Brute,
        }
    }

    pub fn hloop(k: usize, phi: f64) -> DetectorConfig {
        DetectorConfig {
            method: Method::Hloop,
            k,
            phi: Some(phi),
            metric: Metric::Hyperbolic,
            strategy: IndexStrategy::Brute,
        }
    }

    pub fn with_metric(mut self, metric: Metric) -> DetectorConfig {
        self.metric = metric;
        self
    }

    pub fn with_strategy(mut self, strategy: IndexStrategy) -> DetectorConfig {
        self.strategy = strategy;
        self
    }
}

/// Per-point scores plus the probabilistic pipeline's diagnostics.
///
/// All vectors are aligned with dataset ids. `degenerate` marks points
/// that received a convention value instead of a computed one: for `hlof`
/// an infinite local density (all-duplicate neighborhood), for `hloop` a
/// zero sigma_r or an all-degenerate neighborhood.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreReport {
    pub config: DetectorConfig,
    pub scores: Vec<f64>,
    pub sigma_r: Option<Vec<f64>>,
    pub lambda: Option<Vec<f64>>,
    pub pdist: Option<Vec<f64>>,
    pub nplof: Option<f64>,
    pub degenerate: Vec<bool>,
}

impl ScoreReport {
    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DetectorError {
    #[error(transparent)]
    Neighbors(#[from] NeighborsError),
    #[error("phi applies only to the probabilistic detector, not to the outlier factor")]
    UnexpectedPhi,
    #[error("phi must lie strictly inside (0, 1), got {0}")]
    InvalidPhi(f64),
    #[error("quantile inversion failed for point {id}: {source}")]
    Quantile { id: usize, source: HGaussError },
}

/// Runs the detector selected by `config.method`.
pub fn detect(data: &Dataset, config: &DetectorConfig) -> Result<ScoreReport, DetectorError> {
    match config.method {
        Method::Hlof => hlof(data, config),
        Method::Hloop => hloop(data, config),
    }
}

/// Local outlier factor under the configured metric.
///
/// `lrd_k(p) = |N_k(p)| / sum_{o in N_k(p)} max(k_distance(o), d(p, o))`
/// and the score of `p` is `mean(lrd over N_k(p)) / lrd(p)`: near 1 in
/// uniform-density regions, well above 1 for density outliers. A point
/// whose whole neighborhood coincides with it has infinite lrd; such
/// inf/inf scores are defined as 1 and flagged degenerate.
pub fn hlof(data: &Dataset, config: &DetectorConfig) -> Result<ScoreReport, DetectorError> {
    if config.phi.is_some() {
        return Err(DetectorError::UnexpectedPhi);
    }
    let index = neighbors::build_index(data, config.k, config.metric, config.strategy)?;
    let n = data.len();

    let lrd: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|p| {
            let nbrs = index.neighbors(p).expect("id in range");
            let reach_sum: f64 = nbrs
                .iter()
                .map(|nb| nb.distance.max(index.k_distance(nb.id).expect("id in range")))
                .sum();
            nbrs.len() as f64 / reach_sum
        })
        .collect();

    let scores: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|p| {
            let nbrs = index.neighbors(p).expect("id in range");
            let mean = mean_over_neighbors(&lrd, nbrs);
            if lrd[p].is_infinite() && mean.is_infinite() {
                1.0
            } else {
                mean / lrd[p]
            }
        })
        .collect();

    let degenerate = (0..n)
        .map(|p| lrd[p].is_infinite() || !scores[p].is_finite())
        .collect();

    Ok(ScoreReport {
        config: DetectorConfig {
            method: Method::Hlof,
            ..config.clone()
        },
        scores,
        sigma_r: None,
        lambda: None,
        pdist: None,
        nplof: None,
        degenerate,
    })
}

/// Local outlier probability with the hyperbolic Gaussian quantile.
///
/// Steps per point `o`: sigma_r from the closed-ball neighborhood, then
/// `pdist(o)` as the phi-quantile of the hyperbolic Gaussian with
/// dispersion sigma_r, `PLOF(o) = pdist(o) / mean pdist(N_k(o)) - 1`,
/// normalization `nplof = mean(lambda) * sqrt(mean PLOF^2)`, and finally
/// `score(o) = max(0, erf(PLOF(o) / (nplof sqrt 2)))`, capped below 1.
pub fn hloop(data: &Dataset, config: &DetectorConfig) -> Result<ScoreReport, DetectorError> {
    let phi = config.phi.unwrap_or(DEFAULT_PHI);
    let echo = DetectorConfig {
        method: Method::Hloop,
        phi: Some(phi),
        ..config.clone()
    };
    probabilistic_scores(data, config.k, phi, config.metric, config.strategy, QuantileRule::HyperbolicGaussian, echo)
}

/// Classical local outlier probability: Euclidean metric and the
/// half-Gaussian quantile `sqrt(2) erfinv(phi) sigma_r`. Shares every
/// line of plumbing with [`hloop`]; only the metric and quantile differ.
pub fn loop_euclidean(
    data: &Dataset,
    k: usize,
    phi: f64,
    strategy: IndexStrategy,
) -> Result<ScoreReport, DetectorError> {
    let echo = DetectorConfig {
        method: Method::Hloop,
        k,
        phi: Some(phi),
        metric: Metric::Euclidean,
        strategy,
    };
    probabilistic_scores(data, k, phi, Metric::Euclidean, strategy, QuantileRule::HalfGaussian, echo)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum QuantileRule {
    HyperbolicGaussian,
    HalfGaussian,
}

fn probabilistic_scores(
    data: &Dataset,
    k: usize,
    phi: f64,
    metric: Metric,
    strategy: IndexStrategy,
    rule: QuantileRule,
    echo: DetectorConfig,
) -> Result<ScoreReport, DetectorError> {
    if !(phi > 0.0 && phi < 1.0) {
        return Err(DetectorError::InvalidPhi(phi));
    }
    let index = neighbors::build_index(data, k, metric, strategy)?;
    let n = data.len();

    // (sigma_r, pdist, lambda, degenerate) per point. A zero sigma_r
    // (every context neighbor coincides with o) contributes no density
    // contrast: pdist 0, excluded from the lambda average.
    let per_point: Vec<(f64, f64, f64, bool)> = (0..n)
        .into_par_iter()
        .map(|o| {
            let sigma_r = index.standard_distance(o).expect("id in range");
            if sigma_r == 0.0 {
                return Ok((0.0, 0.0, 0.0, true));
            }
            let pdist = match rule {
                QuantileRule::HyperbolicGaussian => {
                    let model = HGaussModel::new(sigma_r)
                        .map_err(|source| DetectorError::Quantile { id: o, source })?;
                    model
                        .quantile(phi)
                        .map_err(|source| DetectorError::Quantile { id: o, source })?
                }
                QuantileRule::HalfGaussian => SQRT_2 * special::erf_inv(phi) * sigma_r,
            };
            Ok((sigma_r, pdist, pdist / sigma_r, false))
        })
        .collect::<Result<_, DetectorError>>()?;

    let sigma_r: Vec<f64> = per_point.iter().map(|t| t.0).collect();
    let pdist: Vec<f64> = per_point.iter().map(|t| t.1).collect();
    let lambda: Vec<f64> = per_point.iter().map(|t| t.2).collect();
    let mut degenerate: Vec<bool> = per_point.iter().map(|t| t.3).collect();

    // PLOF. An all-zero neighborhood mean with a positive own pdist can
    // only arise from duplicate clusters next to a distinct point; such a
    // point is maximally outlying and gets the score cap directly.
    let plof: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|o| {
            let nbrs = index.neighbors(o).expect("id in range");
            let mean = mean_over_neighbors(&pdist, nbrs);
            if mean == 0.0 {
                if pdist[o] == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            } else {
                pdist[o] / mean - 1.0
            }
        })
        .collect();

    let lambda_bar = value_ordered_mean(
        lambda
            .iter()
            .zip(&degenerate)
            .filter(|&(_, &skip)| !skip)
            .map(|(&l, _)| l)
            .collect(),
    );
    // Second moment over the points with finite PLOF; infinite ones are
    // convention-scored above and must not wipe out the normalization.
    let nplof = lambda_bar
        * value_ordered_mean(plof.iter().filter(|v| v.is_finite()).map(|v| v * v).collect()).sqrt();

    let cap = 1.0_f64.next_down();
    let scores: Vec<f64> = plof
        .iter()
        .map(|&v| {
            if nplof == 0.0 {
                0.0
            } else if v.is_infinite() {
                cap
            } else {
                special::erf(v / (nplof * SQRT_2)).clamp(0.0, cap)
            }
        })
        .collect();

    for (flag, v) in degenerate.iter_mut().zip(&plof) {
        *flag = *flag || !v.is_finite();
    }

    Ok(ScoreReport {
        config: echo,
        scores,
        sigma_r: Some(sigma_r),
        lambda: Some(lambda),
        pdist: Some(pdist),
        nplof: Some(nplof),
        degenerate,
    })
}

/// Mean of `values[nb.id]` in neighbor-list order. Identical values short
/// circuit to the value itself so that perfectly uniform neighborhoods
/// yield an exact ratio of 1 downstream (summing and dividing would lose
/// an ulp and manufacture spurious PLOF noise).
fn mean_over_neighbors(values: &[f64], nbrs: &[Neighbor]) -> f64 {
    let first = values[nbrs[0].id];
    if nbrs.iter().all(|nb| values[nb.id] == first) {
        return first;
    }
    let sum: f64 = nbrs.iter().map(|nb| values[nb.id]).sum();
    sum / nbrs.len() as f64
}

/// Mean with the summation in ascending value order: a function of the
/// value multiset alone, so dataset ordering cannot leak into the result.
/// Empty input means "no eligible points" and yields 0.
fn value_ordered_mean(mut values: Vec<f64>) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.sort_unstable_by(f64::total_cmp);
    values.iter().sum::<f64>() / values.len() as f64
}
