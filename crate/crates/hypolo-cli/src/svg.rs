//! Deterministic SVG rendering: a unit-disk score plot and an AUC-vs-k
//! line chart. Pure string building with fixed-precision coordinates, so
//! identical inputs always produce identical bytes.

use hypolo::datasets::{Dataset, Label};
use std::fmt::Write as _;

const INLIER_COLOR: &str = "#2b6cb0";
const OUTLIER_COLOR: &str = "#c53030";
const UNLABELED_COLOR: &str = "#4a5568";
const SCORE_COLOR: &str = "#d69e2e";
const SERIES_COLORS: [&str; 4] = ["#2b6cb0", "#c53030", "#2f855a", "#6b46c1"];

/// Disk plot: the unit-circle boundary, one marker per point
/// (label-colored), and around each point a circle of radius
/// `0.12 * score` in disk units. Sub-threshold circles (score < 1e-3) are
/// omitted as invisible.
pub fn disk_plot(data: &Dataset, scores: &[f64]) -> String {
    assert_eq!(scores.len(), data.len(), "scores must align with dataset ids");
    let mut out = String::from(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"-1.1 -1.1 2.2 2.2\" \
         width=\"600\" height=\"600\">\n",
    );
    // Flip the y axis so the drawing matches mathematical orientation.
    out.push_str("<g transform=\"scale(1,-1)\">\n");
    out.push_str(
        "<circle cx=\"0\" cy=\"0\" r=\"1\" fill=\"none\" stroke=\"#333333\" stroke-width=\"0.008\"/>\n",
    );
    for (id, &score) in scores.iter().enumerate() {
        let p = data.point(id).expect("id in range");
        if score.is_finite() && score >= 1e-3 {
            let _ = writeln!(
                out,
                "<circle cx=\"{:.6}\" cy=\"{:.6}\" r=\"{:.6}\" fill=\"none\" stroke=\"{SCORE_COLOR}\" stroke-width=\"0.006\"/>",
                p.x(),
                p.y(),
                0.12 * score,
            );
        }
        let color = match data.label(id) {
            Some(Label::Inlier) => INLIER_COLOR,
            Some(Label::Outlier) => OUTLIER_COLOR,
            None => UNLABELED_COLOR,
        };
        let _ = writeln!(
            out,
            "<circle cx=\"{:.6}\" cy=\"{:.6}\" r=\"0.012\" fill=\"{color}\"/>",
            p.x(),
            p.y(),
        );
    }
    out.push_str("</g>\n</svg>\n");
    out
}

/// Line chart of AUC against k, one polyline per named series, with the
/// AUC axis fixed to [0, 1].
pub fn sweep_chart(series: &[(String, Vec<(usize, f64)>)]) -> String {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const M: f64 = 48.0; // margin on every side

    let ks: Vec<usize> = series
        .iter()
        .flat_map(|(_, pts)| pts.iter().map(|&(k, _)| k))
        .collect();
    let (k_min, k_max) = match (ks.iter().min(), ks.iter().max()) {
        (Some(&a), Some(&b)) => (a, b),
        _ => (0, 1),
    };
    let x = |k: usize| {
        if k_max == k_min {
            W / 2.0
        } else {
            M + (W - 2.0 * M) * (k - k_min) as f64 / (k_max - k_min) as f64
        }
    };
    let y = |auc: f64| H - M - (H - 2.0 * M) * auc;

    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {W} {H}\" width=\"{W}\" height=\"{H}\" \
         font-family=\"monospace\" font-size=\"12\">\n"
    );
    let _ = writeln!(
        out,
        "<rect x=\"0\" y=\"0\" width=\"{W}\" height=\"{H}\" fill=\"#ffffff\"/>"
    );
    // Axes.
    let _ = writeln!(
        out,
        "<line x1=\"{M}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#333333\"/>",
        H - M,
        W - M,
        H - M,
    );
    let _ = writeln!(
        out,
        "<line x1=\"{M}\" y1=\"{M}\" x2=\"{M}\" y2=\"{:.2}\" stroke=\"#333333\"/>",
        H - M,
    );
    for i in 0..=5 {
        let auc = i as f64 / 5.0;
        let _ = writeln!(
            out,
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{auc:.1}</text>",
            M - 6.0,
            y(auc) + 4.0,
        );
        let _ = writeln!(
            out,
            "<line x1=\"{M}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#dddddd\"/>",
            y(auc),
            W - M,
            y(auc),
        );
    }
    let k_step = 1 + (k_max - k_min) / 16;
    let mut k = k_min;
    while k <= k_max {
        let _ = writeln!(
            out,
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{k}</text>",
            x(k),
            H - M + 16.0,
        );
        k += k_step;
    }
    let _ = writeln!(
        out,
        "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">k</text>",
        W / 2.0,
        H - 8.0,
    );
    let _ = writeln!(
        out,
        "<text x=\"14\" y=\"{:.2}\" transform=\"rotate(-90 14 {:.2})\" text-anchor=\"middle\">AUC</text>",
        H / 2.0,
        H / 2.0,
    );

    for (i, (name, pts)) in series.iter().enumerate() {
        let color = SERIES_COLORS[i % SERIES_COLORS.len()];
        let path: Vec<String> = pts
            .iter()
            .map(|&(k, auc)| format!("{:.2},{:.2}", x(k), y(auc)))
            .collect();
        let _ = writeln!(
            out,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>",
            path.join(" "),
        );
        let _ = writeln!(
            out,
            "<text x=\"{:.2}\" y=\"{:.2}\" fill=\"{color}\">{name}</text>",
            W - M - 80.0,
            M + 16.0 * (i + 1) as f64,
        );
    }
    out.push_str("</svg>\n");
    out
}
