//! `hypolo` — local outlier detection in the Poincaré disk.
//!
//! Subcommands: `gen-toy` (synthetic dataset), `detect` (score a dataset),
//! `eval` (AUC-ROC against labels, optionally sweeping k), `plot` (SVG
//! disk rendering). Every run writes a `.manifest.json` sidecar and is
//! deterministic for fixed flags; `--threads` never changes output bytes.

mod manifest;
mod scores_io;
mod svg;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hypolo::datasets::{self, Dataset, DatasetError, ToySpec};
use hypolo::detectors::{self, DetectorConfig, DetectorError, ScoreReport, DEFAULT_PHI};
use hypolo::eval::{self, EvalError};
use hypolo::neighbors::{IndexStrategy, Metric};
use manifest::RunManifest;
use serde_json::json;
use std::path::{Path, PathBuf};
use std::time::Instant;

#[derive(Parser)]
#[command(name = "hypolo", version, about = "Density-based local outlier detection in the Poincaré disk")]
struct Cli {
    /// Worker thread count (fallback: HYPOLO_THREADS, then all cores).
    /// Scores are byte-identical for every value.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the deterministic two-cluster toy dataset with planted outliers
    GenToy(GenToyArgs),
    /// Score every point of a dataset with a local outlier detector
    Detect(DetectArgs),
    /// Evaluate detector rankings against ground-truth labels (AUC-ROC)
    Eval(EvalArgs),
    /// Render a dataset and its scores as an SVG disk plot
    Plot(PlotArgs),
}

#[derive(Args)]
struct GenToyArgs {
    /// Output TSV path
    #[arg(long)]
    out: PathBuf,
    /// Generator seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Inlier count per cluster
    #[arg(long, default_value_t = 40)]
    points_per_cluster: usize,
    /// Per-coordinate cluster standard deviation
    #[arg(long, default_value_t = 0.08)]
    spread: f64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    /// Local outlier factor, hyperbolic metric
    Hlof,
    /// Local outlier probability, hyperbolic metric and quantile
    Hloop,
    /// Classical LOF (Euclidean baseline)
    Lof,
    /// Classical LoOP (Euclidean baseline)
    Loop,
}

impl MethodArg {
    fn name(self) -> &'static str {
        match self {
            MethodArg::Hlof => "hlof",
            MethodArg::Hloop => "hloop",
            MethodArg::Lof => "lof",
            MethodArg::Loop => "loop",
        }
    }

    fn metric(self) -> Metric {
        match self {
            MethodArg::Hlof | MethodArg::Hloop => Metric::Hyperbolic,
            MethodArg::Lof | MethodArg::Loop => Metric::Euclidean,
        }
    }

    fn probabilistic(self) -> bool {
        matches!(self, MethodArg::Hloop | MethodArg::Loop)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MetricArg {
    Hyperbolic,
    Euclidean,
}

#[derive(Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
enum IndexArg {
    #[default]
    Brute,
    VpTree,
}

impl IndexArg {
    fn name(self) -> &'static str {
        match self {
            IndexArg::Brute => "brute",
            IndexArg::VpTree => "vp-tree",
        }
    }

    fn strategy(self) -> IndexStrategy {
        match self {
            IndexArg::Brute => IndexStrategy::Brute,
            IndexArg::VpTree => IndexStrategy::VpTree,
        }
    }
}

#[derive(Args)]
struct DetectArgs {
    /// Input embedding TSV
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum)]
    method: MethodArg,
    /// Neighborhood size
    #[arg(long)]
    k: usize,
    /// Probability level for hloop/loop (default 0.95)
    #[arg(long)]
    phi: Option<f64>,
    /// Must agree with the method's metric when given
    #[arg(long, value_enum)]
    metric: Option<MetricArg>,
    /// Neighbor index implementation (identical output either way)
    #[arg(long, value_enum, default_value_t)]
    index: IndexArg,
    /// Output scores CSV path
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EvalArgs {
    /// Input embedding TSV; every point must be labeled
    #[arg(long)]
    input: PathBuf,
    /// Evaluate a precomputed scores CSV instead of running detectors
    #[arg(long)]
    scores: Option<PathBuf>,
    /// Detector(s) to sweep; repeat the flag for several methods
    #[arg(long = "method", value_enum)]
    methods: Vec<MethodArg>,
    /// Single neighborhood size to evaluate
    #[arg(long)]
    k: Option<usize>,
    /// Inclusive k range, e.g. 3..20
    #[arg(long)]
    sweep_k: Option<String>,
    /// Probability level for hloop/loop (default 0.95)
    #[arg(long)]
    phi: Option<f64>,
    /// Neighbor index implementation (identical output either way)
    #[arg(long, value_enum, default_value_t)]
    index: IndexArg,
    /// Output CSV path
    #[arg(long)]
    out: PathBuf,
    /// Optional AUC-vs-k SVG line chart
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct PlotArgs {
    /// Input embedding TSV
    #[arg(long)]
    input: PathBuf,
    /// Scores CSV whose ids must cover the dataset exactly
    #[arg(long)]
    scores: PathBuf,
    /// Output SVG path
    #[arg(long)]
    out: PathBuf,
}

/// Run failure with its process exit code: usage and input validation
/// problems exit 2, IO and internal numeric failures exit 1.
pub enum Failure {
    Usage(String),
    Internal(String),
}

impl Failure {
    pub fn usage(msg: impl Into<String>) -> Failure {
        Failure::Usage(msg.into())
    }

    pub fn internal(msg: impl Into<String>) -> Failure {
        Failure::Internal(msg.into())
    }
}

impl From<DatasetError> for Failure {
    fn from(e: DatasetError) -> Failure {
        match e {
            DatasetError::Io(_) => Failure::internal(e.to_string()),
            _ => Failure::usage(e.to_string()),
        }
    }
}

impl From<DetectorError> for Failure {
    fn from(e: DetectorError) -> Failure {
        match e {
            DetectorError::Quantile { .. } => Failure::internal(e.to_string()),
            _ => Failure::usage(e.to_string()),
        }
    }
}

impl From<EvalError> for Failure {
    fn from(e: EvalError) -> Failure {
        match e {
            EvalError::Detector(inner) => inner.into(),
            _ => Failure::usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Failure {
        Failure::internal(format!("io: {e}"))
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => {}
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            std::process::exit(2);
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("error: {msg}");
            std::process::exit(1);
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let threads = resolve_threads(cli.threads)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Failure::internal(format!("thread pool: {e}")))?;
    pool.install(|| match cli.command {
        Command::GenToy(args) => cmd_gen_toy(args),
        Command::Detect(args) => cmd_detect(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Plot(args) => cmd_plot(args),
    })
}

fn resolve_threads(flag: Option<usize>) -> Result<usize, Failure> {
    if let Some(n) = flag {
        return Ok(n);
    }
    match std::env::var("HYPOLO_THREADS") {
        Ok(text) => text.trim().parse().map_err(|_| {
            Failure::usage(format!("HYPOLO_THREADS must be a thread count, got {text:?}"))
        }),
        Err(_) => Ok(0), // rayon default
    }
}

fn display(path: &Path) -> String {
    path.display().to_string()
}

fn cmd_gen_toy(args: GenToyArgs) -> Result<(), Failure> {
    let started = Instant::now();
    let spec = ToySpec {
        seed: args.seed,
        spread: args.spread,
        points_per_cluster: args.points_per_cluster,
        ..ToySpec::default()
    };
    let data = datasets::generate_toy(&spec)?;
    datasets::save_embedding(&data, &args.out)?;
    manifest::write(
        &RunManifest {
            subcommand: "gen-toy",
            version: env!("CARGO_PKG_VERSION"),
            config: json!({
                "seed": args.seed,
                "points_per_cluster": args.points_per_cluster,
                "spread": args.spread,
            }),
            inputs: vec![],
            outputs: vec![display(&args.out)],
            seed: Some(args.seed),
            duration_ms: started.elapsed().as_millis(),
        },
        &args.out,
    )?;
    println!("wrote {} points to {}", data.len(), args.out.display());
    Ok(())
}

/// Effective phi for a method: probabilistic methods default to 0.95,
/// factor methods must not receive one.
fn effective_phi(method: MethodArg, phi: Option<f64>) -> Result<Option<f64>, Failure> {
    if method.probabilistic() {
        Ok(Some(phi.unwrap_or(DEFAULT_PHI)))
    } else if phi.is_some() {
        Err(Failure::usage(format!(
            "--phi only applies to hloop/loop, not {}",
            method.name()
        )))
    } else {
        Ok(None)
    }
}

fn check_metric(method: MethodArg, metric: Option<MetricArg>) -> Result<(), Failure> {
    let forced = method.metric();
    if let Some(arg) = metric {
        let chosen = match arg {
            MetricArg::Hyperbolic => Metric::Hyperbolic,
            MetricArg::Euclidean => Metric::Euclidean,
        };
        if chosen != forced {
            return Err(Failure::usage(format!(
                "--metric {} conflicts with --method {}: hlof/hloop are hyperbolic, lof/loop are euclidean",
                chosen.name(),
                method.name(),
            )));
        }
    }
    Ok(())
}

fn run_method(
    data: &Dataset,
    method: MethodArg,
    k: usize,
    phi: Option<f64>,
    strategy: IndexStrategy,
) -> Result<ScoreReport, DetectorError> {
    match method {
        MethodArg::Hlof => detectors::detect(data, &DetectorConfig::hlof(k).with_strategy(strategy)),
        MethodArg::Lof => detectors::detect(
            data,
            &DetectorConfig::hlof(k)
                .with_metric(Metric::Euclidean)
                .with_strategy(strategy),
        ),
        MethodArg::Hloop => detectors::detect(
            data,
            &DetectorConfig::hloop(k, phi.expect("probabilistic methods carry phi"))
                .with_strategy(strategy),
        ),
        MethodArg::Loop => detectors::loop_euclidean(
            data,
            k,
            phi.expect("probabilistic methods carry phi"),
            strategy,
        ),
    }
}

fn warn_degenerate(report: &ScoreReport) {
    let ids: Vec<usize> = report
        .degenerate
        .iter()
        .enumerate()
        .filter_map(|(id, &flag)| flag.then_some(id))
        .collect();
    if ids.is_empty() {
        return;
    }
    let shown: Vec<String> = ids.iter().take(10).map(|id| id.to_string()).collect();
    let suffix = if ids.len() > 10 { ", ..." } else { "" };
    eprintln!(
        "warning: {} point(s) had degenerate neighborhoods and received convention scores: ids {}{}",
        ids.len(),
        shown.join(", "),
        suffix,
    );
}

fn cmd_detect(args: DetectArgs) -> Result<(), Failure> {
    let started = Instant::now();
    check_metric(args.method, args.metric)?;
    let phi = effective_phi(args.method, args.phi)?;
    let data = datasets::load_embedding(&args.input)?;
    let report = run_method(&data, args.method, args.k, phi, args.index.strategy())?;
    warn_degenerate(&report);
    std::fs::write(&args.out, scores_io::render(&report))?;
    manifest::write(
        &RunManifest {
            subcommand: "detect",
            version: env!("CARGO_PKG_VERSION"),
            config: json!({
                "method": args.method.name(),
                "k": args.k,
                "phi": phi,
                "metric": args.method.metric().name(),
                "index": args.index.name(),
            }),
            inputs: vec![display(&args.input)],
            outputs: vec![display(&args.out)],
            seed: None,
            duration_ms: started.elapsed().as_millis(),
        },
        &args.out,
    )?;
    println!(
        "scored {} points with {} (k = {}) into {}",
        data.len(),
        args.method.name(),
        args.k,
        args.out.display(),
    );
    Ok(())
}

/// `a..b` (inclusive; `a..=b` also accepted) into the list of k values.
fn parse_sweep(text: &str) -> Result<Vec<usize>, Failure> {
    let bad = || Failure::usage(format!("--sweep-k expects an inclusive range like 3..20, got {text:?}"));
    let (a, b) = text.split_once("..").ok_or_else(bad)?;
    let a: usize = a.trim().parse().map_err(|_| bad())?;
    let b: usize = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
    if a == 0 || b < a {
        return Err(bad());
    }
    Ok((a..=b).collect())
}

fn cmd_eval(args: EvalArgs) -> Result<(), Failure> {
    let started = Instant::now();
    let data = datasets::load_embedding(&args.input)?;
    if let Some(scores_path) = &args.scores {
        if !args.methods.is_empty() || args.k.is_some() || args.sweep_k.is_some() || args.phi.is_some() {
            return Err(Failure::usage(
                "--scores evaluates a finished run; it cannot be combined with --method/--k/--sweep-k/--phi",
            ));
        }
        if args.svg.is_some() {
            return Err(Failure::usage("--svg requires a k sweep, not --scores"));
        }
        let rows = scores_io::parse(&std::fs::read_to_string(scores_path)?)?;
        let scores = scores_io::align(rows, data.len())?;
        let labels = complete_labels(&data)?;
        let result = eval::auc_roc(&scores, &labels)?;
        std::fs::write(&args.out, format!("auc\n{}\n", datasets::format_float(result.auc)))?;
        manifest::write(
            &RunManifest {
                subcommand: "eval",
                version: env!("CARGO_PKG_VERSION"),
                config: json!({ "scores": display(scores_path) }),
                inputs: vec![display(&args.input), display(scores_path)],
                outputs: vec![display(&args.out)],
                seed: None,
                duration_ms: started.elapsed().as_millis(),
            },
            &args.out,
        )?;
        println!("auc = {:.6} over {} points", result.auc, data.len());
        return Ok(());
    }

    if args.methods.is_empty() {
        return Err(Failure::usage("eval needs at least one --method (or --scores)"));
    }
    let ks = match (&args.sweep_k, args.k) {
        (Some(text), None) => parse_sweep(text)?,
        (None, Some(k)) => vec![k],
        (None, None) => return Err(Failure::usage("eval needs --k or --sweep-k")),
        (Some(_), Some(_)) => return Err(Failure::usage("--k and --sweep-k are mutually exclusive")),
    };
    if args.phi.is_some() && !args.methods.iter().any(|m| m.probabilistic()) {
        return Err(Failure::usage("--phi only applies to hloop/loop"));
    }

    let strategy = args.index.strategy();
    let mut series = Vec::new();
    for &method in &args.methods {
        let phi = effective_phi(method, args.phi)?;
        let sweep = eval::sweep_k(&data, &ks, |d, k| run_method(d, method, k, phi, strategy))?;
        series.push((method.name().to_string(), sweep));
    }

    let mut csv = String::from("method,k,auc\n");
    for (name, sweep) in &series {
        for &(k, auc) in sweep {
            csv.push_str(&format!("{name},{k},{}\n", datasets::format_float(auc)));
        }
    }
    std::fs::write(&args.out, csv)?;
    let mut outputs = vec![display(&args.out)];
    if let Some(svg_path) = &args.svg {
        std::fs::write(svg_path, svg::sweep_chart(&series))?;
        outputs.push(display(svg_path));
    }
    manifest::write(
        &RunManifest {
            subcommand: "eval",
            version: env!("CARGO_PKG_VERSION"),
            config: json!({
                "methods": args.methods.iter().map(|m| m.name()).collect::<Vec<_>>(),
                "k_values": ks,
                "phi": args.phi,
                "index": args.index.name(),
            }),
            inputs: vec![display(&args.input)],
            outputs,
            seed: None,
            duration_ms: started.elapsed().as_millis(),
        },
        &args.out,
    )?;
    for (name, sweep) in &series {
        let lo = sweep.iter().map(|&(_, a)| a).fold(f64::INFINITY, f64::min);
        let hi = sweep.iter().map(|&(_, a)| a).fold(f64::NEG_INFINITY, f64::max);
        println!("{name}: auc in [{lo:.4}, {hi:.4}] over {} value(s) of k", sweep.len());
    }
    Ok(())
}

fn complete_labels(data: &Dataset) -> Result<Vec<hypolo::datasets::Label>, Failure> {
    data.complete_labels().ok_or_else(|| {
        let missing = data.labels().iter().filter(|l| l.is_none()).count();
        Failure::usage(format!("{missing} point(s) have no label; evaluation needs all of them"))
    })
}

fn cmd_plot(args: PlotArgs) -> Result<(), Failure> {
    let started = Instant::now();
    let data = datasets::load_embedding(&args.input)?;
    let rows = scores_io::parse(&std::fs::read_to_string(&args.scores)?)?;
    let scores = scores_io::align(rows, data.len())?;
    std::fs::write(&args.out, svg::disk_plot(&data, &scores))?;
    manifest::write(
        &RunManifest {
            subcommand: "plot",
            version: env!("CARGO_PKG_VERSION"),
            config: json!({ "scores": display(&args.scores) }),
            inputs: vec![display(&args.input), display(&args.scores)],
            outputs: vec![display(&args.out)],
            seed: None,
            duration_ms: started.elapsed().as_millis(),
        },
        &args.out,
    )?;
    println!("plotted {} points to {}", data.len(), args.out.display());
    Ok(())
}
