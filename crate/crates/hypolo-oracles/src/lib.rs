//! Slow, independent reference implementations used by the hypolo test
//! suites. Nothing here depends on the hypolo crate: every quantity is
//! recomputed from scratch (series expansions, quadrature, bisection,
//! brute-force scans) so that agreement with the fast implementations is
//! meaningful evidence rather than a tautology.

use std::f64::consts::PI;

/// Adaptive Simpson quadrature of `f` over `[a, b]`.
///
/// `tol` is an absolute error budget for the whole interval; the classic
/// Lyness criterion (|S_fine - S_coarse| <= 15 tol) controls splitting.
/// Depth is capped at 60 halvings, far beyond what any smooth integrand in
/// these tests needs.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn step(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(fa, fm, fb, a, b);
    step(f, a, b, fa, fm, fb, whole, tol, 60)
}

/// Error function via the positive-term Maclaurin series
/// erf(x) = (2/sqrt(pi)) x e^{-x^2} sum_n (2x^2)^n / (1*3*...*(2n+1)),
/// Kahan-compensated. Accurate to ~1 ulp for |x| <= 5; larger arguments
/// are routed through the continued-fraction erfc.
pub fn erf(x: f64) -> f64 {
    if x < 0.0 {
        return -erf(-x);
    }
    if x > 5.0 {
        return 1.0 - erfc(x);
    }
    if x == 0.0 {
        return 0.0;
    }
    let x2 = x * x;
    let mut term = 1.0_f64;
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    let mut n = 0u32;
    while term > sum * 1e-20 + 1e-300 {
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        term *= 2.0 * x2 / (2.0 * n as f64 + 3.0);
        n += 1;
        assert!(n < 500, "erf series failed to converge at x = {x}");
    }
    2.0 / PI.sqrt() * x * (-x2).exp() * sum
}

/// Complementary error function. For x >= 2 uses the Laplace continued
/// fraction erfc(x) = e^{-x^2}/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + ...)))
/// evaluated with the modified Lentz algorithm; smaller arguments fall back
/// to 1 - erf(x), which loses nothing there because erf(x) is not close to 1.
pub fn erfc(x: f64) -> f64 {
    if x < 2.0 {
        return 1.0 - erf(x);
    }
    let tiny = 1e-300;
    let mut f = x;
    let mut c = f;
    let mut d = 0.0_f64;
    for n in 1..500 {
        let a = n as f64 / 2.0;
        d = x + a * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = x + a / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-17 {
            return (-x * x).exp() / PI.sqrt() / f;
        }
    }
    panic!("erfc continued fraction failed to converge at x = {x}");
}

/// Inverse error function by plain bisection on [0, 6]. 200 halvings push
/// the bracket width below resolvable spacing, so the result is correctly
/// rounded up to the accuracy of the series erf itself.
pub fn erf_inv(p: f64) -> f64 {
    assert!(p.abs() < 1.0, "erf_inv domain is (-1, 1), got {p}");
    if p < 0.0 {
        return -erf_inv(-p);
    }
    invert_increasing(&erf, p, 0.0, 6.0)
}

/// Bisection inverse of a monotone increasing `f`: returns x in [lo, hi]
/// with f(x) = target. The bracket is grown by doubling from `hi` if it
/// does not already straddle the target.
pub fn invert_increasing(f: &dyn Fn(f64) -> f64, target: f64, lo: f64, hi: f64) -> f64 {
    let mut lo = lo;
    let mut hi = hi;
    let mut grow = 0;
    while f(hi) < target {
        hi *= 2.0;
        grow += 1;
        assert!(grow < 200, "no upper bracket below {hi}");
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Poincare-disk geodesic distance, straight from the closed form
/// arcosh(1 + 2|a-b|^2 / ((1-|a|^2)(1-|b|^2))). Deliberately uses the
/// plain std `acosh` rather than any rearrangement; fine as an oracle for
/// points separated by more than ~1e-6.
pub fn rao_distance(a: (f64, f64), b: (f64, f64)) -> f64 {
    let d2 = (a.0 - b.0).powi(2) + (a.1 - b.1).powi(2);
    let denom = (1.0 - a.0 * a.0 - a.1 * a.1) * (1.0 - b.0 * b.0 - b.1 * b.1);
    (1.0 + 2.0 * d2 / denom).acosh()
}

pub fn euclidean_distance(a: (f64, f64), b: (f64, f64)) -> f64 {
    ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()
}

/// Ids of the k-nearest neighbours of `p` under the pairwise distance
/// closure, including every point tied with the k-th distance, sorted by
/// (distance, id). Matches the closed-ball neighbourhood convention.
pub fn knn_ids(n: usize, p: usize, k: usize, dist: &dyn Fn(usize, usize) -> f64) -> Vec<usize> {
    assert!(k >= 1 && k < n, "k = {k} out of range for n = {n}");
    let mut by_dist: Vec<(f64, usize)> = (0..n).filter(|&q| q != p).map(|q| (dist(p, q), q)).collect();
    by_dist.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let dk = by_dist[k - 1].0;
    by_dist
        .into_iter()
        .take_while(|&(d, _)| d <= dk)
        .map(|(_, q)| q)
        .collect()
}

/// Textbook local outlier factor with closed-ball neighbourhoods, computed
/// the slow direct way from the distance closure. lrd of a point whose
/// reachability sum is zero is infinite; the resulting inf/inf scores are
/// reported as 1.
pub fn lof_scores(n: usize, k: usize, dist: &dyn Fn(usize, usize) -> f64) -> Vec<f64> {
    let nbrs: Vec<Vec<usize>> = (0..n).map(|p| knn_ids(n, p, k, dist)).collect();
    let k_dist: Vec<f64> = (0..n)
        .map(|p| nbrs[p].iter().map(|&q| dist(p, q)).fold(0.0, f64::max))
        .collect();
    let lrd: Vec<f64> = (0..n)
        .map(|p| {
            let reach: f64 = nbrs[p].iter().map(|&o| dist(p, o).max(k_dist[o])).sum();
            nbrs[p].len() as f64 / reach
        })
        .collect();
    (0..n)
        .map(|p| {
            let mean: f64 = nbrs[p].iter().map(|&o| lrd[o]).sum::<f64>() / nbrs[p].len() as f64;
            if lrd[p].is_infinite() && mean.is_infinite() {
                1.0
            } else {
                mean / lrd[p]
            }
        })
        .collect()
}

/// Textbook local outlier probability (closed-ball neighbourhoods, constant
/// normalization lambda = sqrt(2) erf_inv(phi)), computed directly from the
/// distance closure with the series erf. This is the Euclidean-quantile
/// pipeline in its entirety, written independently.
pub fn loop_scores(n: usize, k: usize, phi: f64, dist: &dyn Fn(usize, usize) -> f64) -> Vec<f64> {
    let lambda = std::f64::consts::SQRT_2 * erf_inv(phi);
    let nbrs: Vec<Vec<usize>> = (0..n).map(|p| knn_ids(n, p, k, dist)).collect();
    let pdist: Vec<f64> = (0..n)
        .map(|p| {
            let ms: f64 = nbrs[p].iter().map(|&q| dist(p, q).powi(2)).sum::<f64>() / nbrs[p].len() as f64;
            lambda * ms.sqrt()
        })
        .collect();
    let plof: Vec<f64> = (0..n)
        .map(|p| {
            let mean: f64 = nbrs[p].iter().map(|&q| pdist[q]).sum::<f64>() / nbrs[p].len() as f64;
            if mean == 0.0 && pdist[p] == 0.0 {
                0.0
            } else {
                pdist[p] / mean - 1.0
            }
        })
        .collect();
    let nplof = lambda * (plof.iter().map(|v| v * v).sum::<f64>() / n as f64).sqrt();
    plof.iter()
        .map(|&v| {
            if nplof == 0.0 {
                0.0
            } else {
                erf(v / (nplof * std::f64::consts::SQRT_2)).max(0.0)
            }
        })
        .collect()
}

/// Area under the ROC curve by exhaustive pair counting: concordant
/// outlier/inlier pairs score 1, ties score 1/2.
pub fn auc_pairs(scores: &[f64], is_outlier: &[bool]) -> f64 {
    assert_eq!(scores.len(), is_outlier.len());
    let mut concordant = 0.0_f64;
    let mut pairs = 0u64;
    for (i, &oi) in is_outlier.iter().enumerate() {
        if !oi {
            continue;
        }
        for (j, &oj) in is_outlier.iter().enumerate() {
            if oj {
                continue;
            }
            pairs += 1;
            if scores[i] > scores[j] {
                concordant += 1.0;
            } else if scores[i] == scores[j] {
                concordant += 0.5;
            }
        }
    }
    assert!(pairs > 0, "need at least one outlier and one inlier");
    concordant / pairs as f64
}

#[cfg(test)]
mod tests {
    // Reference constants are written with every digit of the value they
    // were frozen from, beyond f64 resolution.
    #![allow(clippy::excessive_precision)]
    use super::*;

    #[test]
    fn quadrature_known_integrals() {
        let s = integrate(&|x: f64| x.sin(), 0.0, PI, 1e-12);
        assert!((s - 2.0).abs() < 1e-11, "int sin = {s}");
        let g = integrate(&|x: f64| (-x * x).exp(), -8.0, 8.0, 1e-13);
        assert!((g - PI.sqrt()).abs() < 1e-11, "gaussian integral = {g}");
    }

    #[test]
    fn erf_matches_textbook_values() {
        // 30-digit references; the bound allows a few ulps (one ulp near
        // erf = 1 is already 1.1e-16).
        assert!((erf(0.5) - 0.520499877813046537682746653892).abs() < 5e-16);
        assert!((erf(1.0) - 0.842700792949714869341220635083).abs() < 5e-16);
        assert!((erf(2.0) - 0.995322265018952734162069256367).abs() < 5e-16);
        assert_eq!(erf(0.0), 0.0);
        assert_eq!(erf(-1.0), -erf(1.0));
    }

    #[test]
    fn erf_consistent_with_quadrature() {
        for &x in &[0.3, 1.7, 3.1, 4.2] {
            let q = 2.0 / PI.sqrt() * integrate(&|t: f64| (-t * t).exp(), 0.0, x, 1e-14);
            assert!((erf(x) - q).abs() < 1e-12, "x = {x}");
        }
    }

    #[test]
    fn series_and_continued_fraction_agree_on_overlap() {
        for i in 0..=20 {
            let x = 3.0 + 0.1 * i as f64;
            // `1 - erf(x)` is quantized by the ulp of 1 (1.1e-16) and the
            // series carries a few more ulps, so compare absolutely.
            let series = 1.0 - erf(x);
            let cf = erfc(x);
            assert!((series - cf).abs() < 1e-15, "x = {x}: series {series} vs cf {cf}");
        }
    }

    #[test]
    fn erf_inv_round_trips() {
        for &p in &[-0.999, -0.5, -0.01, 0.0, 0.25, 0.9, 0.95, 0.9999] {
            let x = erf_inv(p);
            assert!((erf(x) - p).abs() < 1e-15, "p = {p}, x = {x}");
        }
    }

    #[test]
    fn invert_increasing_recovers_cube_root() {
        let x = invert_increasing(&|v: f64| v * v * v, 27.0, 0.0, 1.0);
        assert!((x - 3.0).abs() < 1e-13);
    }

    #[test]
    fn rao_distance_diameter_points() {
        // For points on a diameter the geodesic coordinate is 2 artanh(x).
        let d = rao_distance((0.3, 0.0), (-0.2, 0.0));
        let want = 2.0 * (0.3_f64.atanh() + 0.2_f64.atanh());
        assert!((d - want).abs() < 1e-14, "{d} vs {want}");
    }

    #[test]
    fn lof_grid_interior_is_unremarkable() {
        let mut pts = Vec::new();
        for i in 0..5 {
            for j in 0..5 {
                pts.push((i as f64, j as f64));
            }
        }
        let dist = |a: usize, b: usize| euclidean_distance(pts[a], pts[b]);
        let scores = lof_scores(pts.len(), 4, &dist);
        // Centre of the grid, index 12: locally uniform, score near 1.
        assert!((scores[12] - 1.0).abs() < 0.2, "centre LOF = {}", scores[12]);
    }

    #[test]
    fn auc_hand_cases() {
        let perfect = auc_pairs(&[0.9, 0.8, 0.1, 0.2], &[true, true, false, false]);
        assert_eq!(perfect, 1.0);
        let tied = auc_pairs(&[0.5, 0.5], &[true, false]);
        assert_eq!(tied, 0.5);
        let inverted = auc_pairs(&[0.1, 0.9], &[true, false]);
        assert_eq!(inverted, 0.0);
    }
}
