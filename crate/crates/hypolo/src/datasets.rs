//! Datasets of labeled disk points: a deterministic toy generator and
//! TSV ingestion/serialization for precomputed embeddings.
//!
//! TSV layout: `id <tab> x <tab> y [<tab> label [<tab> name]]` with label
//! one of `inlier`, `outlier`, or empty. An optional header line is
//! auto-detected by its leading `id` token. Files are UTF-8 with `\n`
//! line endings; floats round-trip because the writer emits 17
//! significant digits.

use crate::geometry::{DiskPoint, GeometryError};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt::Write as _;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Label {
    Inlier,
    Outlier,
}

impl Label {
    pub fn name(self) -> &'static str {
        match self {
            Label::Inlier => "inlier",
            Label::Outlier => "outlier",
        }
    }
}

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("row {line}: {source}")]
    InvalidPoint { line: usize, source: GeometryError },
    #[error("row {line}: {message}")]
    ParseError { line: usize, message: String },
    #[error("row {line}: duplicate id {id}")]
    DuplicateId { id: usize, line: usize },
    #[error("ids must be contiguous from 0, but id {expected} is missing")]
    MissingId { expected: usize },
    #[error("aligned columns required: {points} points, {labels} labels, {names} names")]
    MismatchedLengths { points: usize, labels: usize, names: usize },
    #[error("invalid toy spec: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// An ordered, immutable collection of disk points with stable ids
/// `0..len` and optional per-point labels and names.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    points: Vec<DiskPoint>,
    labels: Vec<Option<Label>>,
    names: Vec<Option<String>>,
}

impl Dataset {
    pub fn from_points(points: Vec<DiskPoint>) -> Dataset {
        let n = points.len();
        Dataset {
            points,
            labels: vec![None; n],
            names: vec![None; n],
        }
    }

    pub fn from_parts(
        points: Vec<DiskPoint>,
        labels: Vec<Option<Label>>,
        names: Vec<Option<String>>,
    ) -> Result<Dataset, DatasetError> {
        if labels.len() != points.len() || names.len() != points.len() {
            return Err(DatasetError::MismatchedLengths {
                points: points.len(),
                labels: labels.len(),
                names: names.len(),
            });
        }
        Ok(Dataset { points, labels, names })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[DiskPoint] {
        &self.points
    }

    pub fn point(&self, id: usize) -> Option<DiskPoint> {
        self.points.get(id).copied()
    }

    pub fn labels(&self) -> &[Option<Label>] {
        &self.labels
    }

    pub fn label(&self, id: usize) -> Option<Label> {
        self.labels.get(id).copied().flatten()
    }

    pub fn name(&self, id: usize) -> Option<&str> {
        self.names.get(id).and_then(|n| n.as_deref())
    }

    /// All labels when every point carries one; `None` as soon as any
    /// point is unlabeled (evaluation needs the full vector).
    pub fn complete_labels(&self) -> Option<Vec<Label>> {
        self.labels.iter().copied().collect()
    }
}

/// Parameters of the two-cluster toy dataset: Gaussian clusters around
/// two centers plus a handful of fixed outliers.
#[derive(Debug, Clone, PartialEq)]
pub struct ToySpec {
    pub centers: [DiskPoint; 2],
    /// Per-coordinate standard deviation of each cluster.
    pub spread: f64,
    pub points_per_cluster: usize,
    pub outliers: Vec<DiskPoint>,
    pub seed: u64,
}

impl Default for ToySpec {
    fn default() -> ToySpec {
        let p = |x: f64, y: f64| DiskPoint::new(x, y).expect("default toy coordinates are valid");
        ToySpec {
            centers: [p(-0.45, 0.0), p(0.45, 0.0)],
            spread: 0.08,
            points_per_cluster: 40,
            // Two probes in the inter-cluster gap and three points near the
            // rim. The gap probes sit just outside the cluster fringe, close
            // enough that reachability smoothing starts absorbing them at
            // large k while the probabilistic distance profile still
            // separates them.
            outliers: vec![
                p(0.15, 0.04),
                p(-0.15, -0.04),
                p(0.0, 0.62),
                p(-0.68, 0.58),
                p(0.82, -0.40),
            ],
            seed: 0,
        }
    }
}

/// `[0, 1)` from the top 53 bits of one generator draw.
fn uniform01(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 / 9007199254740992.0
}

/// `(0, 1]`, so the logarithm below never sees zero.
fn uniform01_open(rng: &mut ChaCha8Rng) -> f64 {
    ((rng.next_u64() >> 11) + 1) as f64 / 9007199254740992.0
}

/// One standard normal pair via the Box-Muller transform. Exactly two
/// generator draws per call, which pins the stream layout for
/// reproducibility across platforms and versions.
fn gauss_pair(rng: &mut ChaCha8Rng) -> (f64, f64) {
    let r = (-2.0 * uniform01_open(rng).ln()).sqrt();
    let theta = std::f64::consts::TAU * uniform01(rng);
    (r * theta.cos(), r * theta.sin())
}

/// Deterministic toy dataset: `points_per_cluster` Gaussian samples
/// around each center (resampled while they fall outside the valid disk),
/// then the fixed outliers. Inliers are named `a00..`/`b00..`, outliers
/// `out0..`.
pub fn generate_toy(spec: &ToySpec) -> Result<Dataset, DatasetError> {
    if !spec.spread.is_finite() || spec.spread < 0.0 {
        return Err(DatasetError::InvalidSpec(format!(
            "spread must be a finite nonnegative number, got {}",
            spec.spread
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut points = Vec::new();
    let mut labels = Vec::new();
    let mut names = Vec::new();
    for (cluster, center) in spec.centers.iter().enumerate() {
        let tag = ['a', 'b'][cluster];
        for i in 0..spec.points_per_cluster {
            let point = loop {
                let (gx, gy) = gauss_pair(&mut rng);
                let candidate = DiskPoint::new(
                    center.x() + spec.spread * gx,
                    center.y() + spec.spread * gy,
                );
                if let Ok(p) = candidate {
                    break p;
                }
            };
            points.push(point);
            labels.push(Some(Label::Inlier));
            names.push(Some(format!("{tag}{i:02}")));
        }
    }
    for (i, &p) in spec.outliers.iter().enumerate() {
        points.push(p);
        labels.push(Some(Label::Outlier));
        names.push(Some(format!("out{i}")));
    }
    Dataset::from_parts(points, labels, names)
}

/// Loads a TSV embedding file.
pub fn load_embedding(path: &Path) -> Result<Dataset, DatasetError> {
    parse_embedding(&std::fs::read_to_string(path)?)
}

/// Parses TSV text into a validated dataset. Rows may appear in any id
/// order; ids must be unique and contiguous from 0.
pub fn parse_embedding(text: &str) -> Result<Dataset, DatasetError> {
    struct Row {
        point: DiskPoint,
        label: Option<Label>,
        name: Option<String>,
        line: usize,
    }
    let mut rows: Vec<(usize, Row)> = Vec::new();
    let mut first_content_line = true;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        if raw.is_empty() {
            continue;
        }
        let fields: Vec<&str> = raw.split('\t').collect();
        if first_content_line {
            first_content_line = false;
            if fields[0] == "id" {
                continue;
            }
        }
        if !(3..=5).contains(&fields.len()) {
            return Err(DatasetError::ParseError {
                line,
                message: format!("expected 3 to 5 tab-separated fields, got {}", fields.len()),
            });
        }
        let id: usize = fields[0].parse().map_err(|_| DatasetError::ParseError {
            line,
            message: format!("invalid id {:?}", fields[0]),
        })?;
        let coord = |field: &str, axis: &str| -> Result<f64, DatasetError> {
            field.parse().map_err(|_| DatasetError::ParseError {
                line,
                message: format!("invalid {axis} coordinate {field:?}"),
            })
        };
        let x = coord(fields[1], "x")?;
        let y = coord(fields[2], "y")?;
        let label = match fields.get(3).copied().unwrap_or("") {
            "" => None,
            "inlier" => Some(Label::Inlier),
            "outlier" => Some(Label::Outlier),
            other => {
                return Err(DatasetError::ParseError {
                    line,
                    message: format!("label must be \"inlier\", \"outlier\", or empty, got {other:?}"),
                })
            }
        };
        let name = match fields.get(4).copied().unwrap_or("") {
            "" => None,
            text => Some(text.to_string()),
        };
        let point =
            DiskPoint::new(x, y).map_err(|source| DatasetError::InvalidPoint { line, source })?;
        rows.push((id, Row { point, label, name, line }));
    }

    rows.sort_by_key(|(id, _)| *id);
    for window in rows.windows(2) {
        if window[0].0 == window[1].0 {
            return Err(DatasetError::DuplicateId {
                id: window[1].0,
                line: window[1].1.line,
            });
        }
    }
    for (expected, (id, _)) in rows.iter().enumerate() {
        if *id != expected {
            return Err(DatasetError::MissingId { expected });
        }
    }

    let mut points = Vec::with_capacity(rows.len());
    let mut labels = Vec::with_capacity(rows.len());
    let mut names = Vec::with_capacity(rows.len());
    for (_, row) in rows {
        points.push(row.point);
        labels.push(row.label);
        names.push(row.name);
    }
    Dataset::from_parts(points, labels, names)
}

/// Decimal text with 17 significant digits, enough for exact f64
/// round-trips.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// Renders the canonical TSV form: header line, one row per point, and
/// per row only the columns that carry data (a label placeholder is kept
/// when a name follows it).
pub fn render_embedding(data: &Dataset) -> String {
    let mut out = String::from("id\tx\ty\tlabel\tname\n");
    for id in 0..data.len() {
        let p = data.point(id).expect("id in range");
        let _ = write!(out, "{id}\t{}\t{}", format_float(p.x()), format_float(p.y()));
        let label = data.label(id);
        let name = data.name(id);
        if label.is_some() || name.is_some() {
            let _ = write!(out, "\t{}", label.map(Label::name).unwrap_or(""));
        }
        if let Some(name) = name {
            let _ = write!(out, "\t{name}");
        }
        out.push('\n');
    }
    out
}

/// Writes the canonical TSV form to a file.
pub fn save_embedding(data: &Dataset, path: &Path) -> Result<(), DatasetError> {
    Ok(std::fs::write(path, render_embedding(data))?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_rows() {
        let data = parse_embedding("0\t0.1\t0.2\tinlier\tcat\n1\t-0.3\t0.0\n").unwrap();
        assert_eq!(data.len(), 2);
        assert_eq!(data.label(0), Some(Label::Inlier));
        assert_eq!(data.name(0), Some("cat"));
        assert_eq!(data.label(1), None);
        assert_eq!(data.name(1), None);
        assert!((data.point(1).unwrap().x() + 0.3).abs() < 1e-15);
    }

    #[test]
    fn detects_optional_header() {
        let with = parse_embedding("id\tx\ty\tlabel\tname\n0\t0.1\t0.2\n").unwrap();
        let without = parse_embedding("0\t0.1\t0.2\n").unwrap();
        assert_eq!(with, without);
    }

    #[test]
    fn accepts_rows_in_any_order() {
        let data = parse_embedding("1\t0.2\t0.0\n0\t0.1\t0.0\n").unwrap();
        assert!((data.point(0).unwrap().x() - 0.1).abs() < 1e-15);
        assert!((data.point(1).unwrap().x() - 0.2).abs() < 1e-15);
    }

    #[test]
    fn rejects_invalid_points_with_line_numbers() {
        let err = parse_embedding("0\t0.1\t0.2\n1\t1.5\t0.0\n").unwrap_err();
        match err {
            DatasetError::InvalidPoint { line, source } => {
                assert_eq!(line, 2);
                assert!(matches!(source, GeometryError::OutsideDisk { .. }));
            }
            other => panic!("expected InvalidPoint, got {other:?}"),
        }
    }

    #[test]
    fn rejects_malformed_rows() {
        assert!(matches!(
            parse_embedding("0\t0.1\n"),
            Err(DatasetError::ParseError { line: 1, .. })
        ));
        assert!(matches!(
            parse_embedding("0\tnope\t0.2\n"),
            Err(DatasetError::ParseError { line: 1, .. })
        ));
        assert!(matches!(
            parse_embedding("0\t0.1\t0.2\tmaybe\n"),
            Err(DatasetError::ParseError { line: 1, .. })
        ));
    }

    #[test]
    fn rejects_duplicate_and_gapped_ids() {
        assert!(matches!(
            parse_embedding("0\t0.1\t0.2\n0\t0.2\t0.1\n"),
            Err(DatasetError::DuplicateId { id: 0, line: 2 })
        ));
        assert!(matches!(
            parse_embedding("0\t0.1\t0.2\n2\t0.2\t0.1\n"),
            Err(DatasetError::MissingId { expected: 1 })
        ));
    }

    #[test]
    fn round_trips_through_render_and_parse() {
        let spec = ToySpec::default();
        let data = generate_toy(&spec).unwrap();
        let text = render_embedding(&data);
        let back = parse_embedding(&text).unwrap();
        assert_eq!(back, data);
        assert_eq!(render_embedding(&back), text);
    }

    #[test]
    fn default_toy_has_85_points_with_5_outliers() {
        let data = generate_toy(&ToySpec::default()).unwrap();
        assert_eq!(data.len(), 85);
        let outliers = data
            .labels()
            .iter()
            .filter(|l| **l == Some(Label::Outlier))
            .count();
        assert_eq!(outliers, 5);
        assert_eq!(data.label(0), Some(Label::Inlier));
        assert_eq!(data.name(80), Some("out0"));
    }

    #[test]
    fn toy_generation_is_deterministic_per_seed() {
        let spec = ToySpec { seed: 7, ..ToySpec::default() };
        assert_eq!(generate_toy(&spec).unwrap(), generate_toy(&spec).unwrap());
        let other = ToySpec { seed: 8, ..ToySpec::default() };
        assert_ne!(generate_toy(&spec).unwrap(), generate_toy(&other).unwrap());
    }

    #[test]
    fn zero_spread_collapses_clusters_onto_centers() {
        let spec = ToySpec {
            spread: 0.0,
            points_per_cluster: 3,
            ..ToySpec::default()
        };
        let data = generate_toy(&spec).unwrap();
        for id in 0..3 {
            assert_eq!(data.point(id).unwrap(), spec.centers[0]);
        }
        for id in 3..6 {
            assert_eq!(data.point(id).unwrap(), spec.centers[1]);
        }
    }

    #[test]
    fn rejects_negative_or_non_finite_spread() {
        for bad in [-0.1, f64::NAN, f64::INFINITY] {
            let spec = ToySpec { spread: bad, ..ToySpec::default() };
            assert!(matches!(generate_toy(&spec), Err(DatasetError::InvalidSpec(_))));
        }
    }

    #[test]
    fn from_parts_requires_aligned_columns() {
        let p = DiskPoint::new(0.1, 0.1).unwrap();
        assert!(matches!(
            Dataset::from_parts(vec![p, p], vec![None], vec![None, None]),
            Err(DatasetError::MismatchedLengths { .. })
        ));
    }

    #[test]
    fn complete_labels_requires_every_point_labeled() {
        let p = DiskPoint::new(0.1, 0.1).unwrap();
        let full = Dataset::from_parts(
            vec![p, p],
            vec![Some(Label::Inlier), Some(Label::Outlier)],
            vec![None, None],
        )
        .unwrap();
        assert_eq!(full.complete_labels(), Some(vec![Label::Inlier, Label::Outlier]));
        let partial =
            Dataset::from_parts(vec![p, p], vec![Some(Label::Inlier), None], vec![None, None])
                .unwrap();
        assert_eq!(partial.complete_labels(), None);
    }

    #[test]
    fn float_format_round_trips_exactly() {
        for v in [0.1, -0.45, 1.0 / 3.0, 0.8999999999999999, 1e-300] {
            let text = format_float(v);
            assert_eq!(text.parse::<f64>().unwrap(), v, "text = {text}");
        }
    }
}
