//! Ranking evaluation: ROC/AUC for outlier scores against ground-truth
//! labels, and a parallel sweep over neighborhood sizes.

use crate::datasets::{Dataset, Label};
use crate::detectors::{DetectorError, ScoreReport};
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("scores and labels must align: {scores} scores, {labels} labels")]
    MismatchedLengths { scores: usize, labels: usize },
    #[error("AUC needs both classes, got {n_pos} outliers and {n_neg} inliers")]
    DegenerateLabels { n_pos: usize, n_neg: usize },
    #[error("score for id {0} is not a number")]
    NanScore(usize),
    #[error("{0} points have no label; evaluation needs all of them")]
    MissingLabels(usize),
    #[error(transparent)]
    Detector(#[from] DetectorError),
}

/// ROC curve and its summary statistic. Outliers are the positive class;
/// ranking is by descending score.
#[derive(Debug, Clone, PartialEq)]
pub struct RocResult {
    pub auc: f64,
    /// `(fpr, tpr)` pairs from `(0, 0)` to `(1, 1)`, one step per
    /// distinct score threshold.
    pub roc_points: Vec<(f64, f64)>,
    pub n_pos: usize,
    pub n_neg: usize,
}

/// AUC with exact tie handling: tied scores contribute half credit,
/// equivalently each tie group gets its average rank.
pub fn auc_roc(scores: &[f64], labels: &[Label]) -> Result<RocResult, EvalError> {
    if scores.len() != labels.len() {
        return Err(EvalError::MismatchedLengths {
            scores: scores.len(),
            labels: labels.len(),
        });
    }
    if let Some(id) = scores.iter().position(|s| s.is_nan()) {
        return Err(EvalError::NanScore(id));
    }
    let n_pos = labels.iter().filter(|l| **l == Label::Outlier).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(EvalError::DegenerateLabels { n_pos, n_neg });
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_unstable_by(|&a, &b| scores[a].total_cmp(&scores[b]).then(a.cmp(&b)));

    // Rank-sum route: ascending 1-based ranks with ties averaged, then
    // AUC = (R_pos - p(p+1)/2) / (p q).
    let mut rank_sum_pos = 0.0;
    // ROC route, built in the same pass from the descending tail of the
    // sort: one curve vertex per distinct score.
    let mut roc_points = vec![(0.0, 0.0)];
    let mut seen_pos = 0usize;
    let mut seen_neg = 0usize;

    let mut group_start = 0;
    while group_start < order.len() {
        let mut group_end = group_start + 1;
        while group_end < order.len()
            && scores[order[group_end]] == scores[order[group_start]]
        {
            group_end += 1;
        }
        let avg_rank = (group_start + 1 + group_end) as f64 / 2.0;
        let pos_in_group = order[group_start..group_end]
            .iter()
            .filter(|&&id| labels[id] == Label::Outlier)
            .count();
        rank_sum_pos += avg_rank * pos_in_group as f64;
        group_start = group_end;
    }

    for group in descending_groups(&order, scores) {
        let pos_in_group = group.iter().filter(|&&id| labels[id] == Label::Outlier).count();
        seen_pos += pos_in_group;
        seen_neg += group.len() - pos_in_group;
        roc_points.push((seen_neg as f64 / n_neg as f64, seen_pos as f64 / n_pos as f64));
    }

    let p = n_pos as f64;
    let q = n_neg as f64;
    let auc = (rank_sum_pos - p * (p + 1.0) / 2.0) / (p * q);
    Ok(RocResult { auc, roc_points, n_pos, n_neg })
}

/// Tie groups of an ascending sort order, visited from highest score to
/// lowest.
fn descending_groups<'a>(
    order: &'a [usize],
    scores: &'a [f64],
) -> impl Iterator<Item = &'a [usize]> {
    let mut rest = order;
    std::iter::from_fn(move || {
        let last = *rest.last()?;
        let start = rest.partition_point(|&id| scores[id] != scores[last]);
        let (head, group) = rest.split_at(start);
        rest = head;
        Some(group)
    })
}

/// Evaluates one detector run against the dataset's labels.
pub fn evaluate_report(data: &Dataset, report: &ScoreReport) -> Result<RocResult, EvalError> {
    let labels = data.complete_labels().ok_or_else(|| {
        EvalError::MissingLabels(data.labels().iter().filter(|l| l.is_none()).count())
    })?;
    auc_roc(&report.scores, &labels)
}

/// Runs `run` once per `k` (in parallel) and reports `(k, auc)` pairs
/// sorted by ascending `k`.
pub fn sweep_k<F>(data: &Dataset, k_values: &[usize], run: F) -> Result<Vec<(usize, f64)>, EvalError>
where
    F: Fn(&Dataset, usize) -> Result<ScoreReport, DetectorError> + Sync,
{
    let mut results = k_values
        .par_iter()
        .map(|&k| {
            let report = run(data, k)?;
            Ok((k, evaluate_report(data, &report)?.auc))
        })
        .collect::<Result<Vec<_>, EvalError>>()?;
    results.sort_unstable_by_key(|&(k, _)| k);
    Ok(results)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datasets::generate_toy;
    use crate::datasets::ToySpec;
    use crate::detectors::{detect, DetectorConfig};

    const IN: Label = Label::Inlier;
    const OUT: Label = Label::Outlier;

    #[test]
    fn perfect_and_inverted_rankings() {
        let r = auc_roc(&[0.9, 0.8, 0.2, 0.1], &[OUT, OUT, IN, IN]).unwrap();
        assert_eq!(r.auc, 1.0);
        assert_eq!(r.n_pos, 2);
        assert_eq!(r.n_neg, 2);
        let r = auc_roc(&[0.1, 0.2, 0.8, 0.9], &[OUT, OUT, IN, IN]).unwrap();
        assert_eq!(r.auc, 0.0);
    }

    #[test]
    fn all_tied_scores_give_half() {
        let r = auc_roc(&[0.5, 0.5, 0.5, 0.5], &[OUT, IN, OUT, IN]).unwrap();
        assert_eq!(r.auc, 0.5);
        // A single threshold step: (0,0) -> (1,1).
        assert_eq!(r.roc_points, vec![(0.0, 0.0), (1.0, 1.0)]);
    }

    #[test]
    fn mixed_ranking_with_a_tie() {
        // Scores 3,1,2,2 with labels out,in,in,out: ordered pairs
        // (out=3 beats both inliers) + (out=2 beats in=1, ties in=2)
        // = (1 + 1 + 1 + 0.5) / 4.
        let r = auc_roc(&[3.0, 1.0, 2.0, 2.0], &[OUT, IN, IN, OUT]).unwrap();
        assert!((r.auc - 0.875).abs() < 1e-15, "auc = {}", r.auc);
    }

    #[test]
    fn roc_curve_shape_and_trapezoid_agreement() {
        let scores = [3.0, 1.0, 2.0, 2.0, 0.5, 2.5];
        let labels = [OUT, IN, IN, OUT, IN, OUT];
        let r = auc_roc(&scores, &labels).unwrap();
        assert_eq!(r.roc_points.first(), Some(&(0.0, 0.0)));
        assert_eq!(r.roc_points.last(), Some(&(1.0, 1.0)));
        for w in r.roc_points.windows(2) {
            assert!(w[1].0 >= w[0].0 && w[1].1 >= w[0].1, "curve must be monotone");
        }
        // 4 distinct thresholds + origin.
        assert_eq!(r.roc_points.len(), 6);
        let trapezoid: f64 = r
            .roc_points
            .windows(2)
            .map(|w| (w[1].0 - w[0].0) * (w[1].1 + w[0].1) / 2.0)
            .sum();
        assert!(
            (trapezoid - r.auc).abs() < 1e-12,
            "rank statistic {} vs trapezoid {trapezoid}",
            r.auc
        );
    }

    #[test]
    fn error_cases() {
        assert_eq!(
            auc_roc(&[0.1], &[OUT, IN]).unwrap_err(),
            EvalError::MismatchedLengths { scores: 1, labels: 2 }
        );
        assert_eq!(
            auc_roc(&[0.1, 0.2], &[IN, IN]).unwrap_err(),
            EvalError::DegenerateLabels { n_pos: 0, n_neg: 2 }
        );
        assert_eq!(
            auc_roc(&[0.1, f64::NAN], &[OUT, IN]).unwrap_err(),
            EvalError::NanScore(1)
        );
    }

    #[test]
    fn evaluate_report_needs_all_labels() {
        let mut data = generate_toy(&ToySpec::default()).unwrap();
        let report = detect(&data, &DetectorConfig::hloop(8, 0.95)).unwrap();
        assert!(evaluate_report(&data, &report).is_ok());

        let unlabeled = vec![None; data.len()];
        data = Dataset::from_parts(data.points().to_vec(), unlabeled, vec![None; 85]).unwrap();
        assert_eq!(
            evaluate_report(&data, &report).unwrap_err(),
            EvalError::MissingLabels(85)
        );
    }

    #[test]
    fn sweep_reports_sorted_ks_and_plausible_aucs() {
        let data = generate_toy(&ToySpec::default()).unwrap();
        let ks = [9, 3, 6];
        let sweep = sweep_k(&data, &ks, |d, k| detect(d, &DetectorConfig::hloop(k, 0.95)))
            .unwrap();
        assert_eq!(sweep.iter().map(|&(k, _)| k).collect::<Vec<_>>(), vec![3, 6, 9]);
        for &(k, auc) in &sweep {
            assert!((0.0..=1.0).contains(&auc), "k = {k}: auc = {auc}");
            assert!(auc > 0.8, "toy clusters should be easy at k = {k}, got {auc}");
        }
    }

    #[test]
    fn sweep_propagates_detector_errors() {
        let data = generate_toy(&ToySpec::default()).unwrap();
        let err = sweep_k(&data, &[3, 200], |d, k| {
            detect(d, &DetectorConfig::hloop(k, 0.95))
        })
        .unwrap_err();
        assert!(matches!(err, EvalError::Detector(_)));
    }
}
