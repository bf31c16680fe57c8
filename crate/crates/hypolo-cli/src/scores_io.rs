//! Scores CSV: `id,score` for the factor detectors, plus `sigma_r`,
//! `lambda`, and `pdist` columns when the probabilistic pipeline ran.
//! Floats carry 17 significant digits so files round-trip exactly.

use crate::Failure;
use hypolo::datasets::format_float;
use hypolo::detectors::ScoreReport;
use std::fmt::Write as _;

pub fn render(report: &ScoreReport) -> String {
    let extended = report.sigma_r.is_some();
    let mut out = String::from(if extended {
        "id,score,sigma_r,lambda,pdist\n"
    } else {
        "id,score\n"
    });
    for id in 0..report.scores.len() {
        let _ = write!(out, "{id},{}", format_float(report.scores[id]));
        if extended {
            let column = |v: &Option<Vec<f64>>| v.as_ref().map_or(f64::NAN, |v| v[id]);
            let _ = write!(
                out,
                ",{},{},{}",
                format_float(column(&report.sigma_r)),
                format_float(column(&report.lambda)),
                format_float(column(&report.pdist)),
            );
        }
        out.push('\n');
    }
    out
}

/// Parses `(id, score)` rows in file order; extra columns are ignored.
/// Id coverage against a dataset is the caller's check.
pub fn parse(text: &str) -> Result<Vec<(usize, f64)>, Failure> {
    let mut rows = Vec::new();
    let mut saw_header = false;
    for (idx, line) in text.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        if !saw_header {
            saw_header = true;
            if line != "id,score" && !line.starts_with("id,score,") {
                return Err(Failure::usage(format!(
                    "scores file must start with an \"id,score\" header, got {line:?}"
                )));
            }
            continue;
        }
        let row = idx + 1;
        let mut fields = line.split(',');
        let id: usize = fields
            .next()
            .and_then(|f| f.parse().ok())
            .ok_or_else(|| Failure::usage(format!("scores row {row}: invalid id")))?;
        let score: f64 = fields
            .next()
            .and_then(|f| f.parse().ok())
            .ok_or_else(|| Failure::usage(format!("scores row {row}: invalid score")))?;
        rows.push((id, score));
    }
    Ok(rows)
}

/// Reorders parsed rows into an id-indexed vector, requiring the ids to
/// cover `0..n` exactly.
pub fn align(rows: Vec<(usize, f64)>, n: usize) -> Result<Vec<f64>, Failure> {
    let got = rows.len();
    let mismatch = || {
        Failure::usage(format!(
            "mismatched ids: scores must cover dataset ids 0..{} exactly once, got {got} rows",
            n.saturating_sub(1),
        ))
    };
    let mut seen = vec![false; n];
    let mut out = vec![0.0; n];
    for (id, score) in rows {
        if id >= n || seen[id] {
            return Err(mismatch());
        }
        seen[id] = true;
        out[id] = score;
    }
    if seen.iter().any(|&b| !b) {
        return Err(mismatch());
    }
    Ok(out)
}
