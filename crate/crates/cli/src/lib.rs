//! The `roadtopo` command line: ground-truth generation, loss and gradient
//! checks, graph extraction, evaluation and a self-test.
//!
//! Results go to standard output as `key=value` lines. Exit codes: 0 on
//! success, 1 when a check fails, 2 on usage errors, 3 on I/O or format
//! errors.

pub mod checks;

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use roadtopo::annotation::{build_ground_truth, GroundTruth, DEFAULT_DILATE_RADIUS, DEFAULT_DMAX};
use roadtopo::extract::{extract_graph, ExtractConfig, DEFAULT_MIN_SPUR, DEFAULT_TAU};
use roadtopo::graph::{parse_graph, GeoGraph};
use roadtopo::grid::{Extent, ScalarGrid};
use roadtopo::io::{labels_to_grid, mask_to_grid, read_grid, write_grid};
use roadtopo::loss::{grad_check, total_loss, LossConfig, LossMode, PairSearch};
use roadtopo::metrics::{evaluate, MetricConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

/// Largest relative error `gradcheck` accepts.
pub const GRADCHECK_LIMIT: f64 = 1e-3;

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Input { path: PathBuf, source: roadtopo::Error },
    #[error(transparent)]
    Core(#[from] roadtopo::Error),
    #[error("{0}")]
    Check(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Core(roadtopo::Error::Config(_)) => EXIT_USAGE,
            CliError::Check(_) => EXIT_CHECK,
            CliError::Io { .. } | CliError::Input { .. } | CliError::Core(_) => EXIT_IO,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "roadtopo", version, about = "Connectivity-aware loss, graph extraction and road metrics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Rasterize a graph into ground-truth distance map, region and labels.
    Gengt(GengtArgs),
    /// Evaluate the loss of a predicted distance map.
    Loss(LossArgs),
    /// Compare the analytic gradient with central differences.
    Gradcheck(GradcheckArgs),
    /// Extract a road graph from a predicted distance map.
    Extract(ExtractArgs),
    /// Score a predicted graph against a ground-truth graph.
    Eval(EvalArgs),
    /// Run the exhaustive oracle and invariant checks.
    Selftest(SelftestArgs),
}

#[derive(Debug, Args)]
struct GengtArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    width: usize,
    #[arg(long)]
    height: usize,
    #[arg(long, default_value_t = DEFAULT_DILATE_RADIUS)]
    dilate: u32,
    #[arg(long, default_value_t = DEFAULT_DMAX)]
    dmax: f32,
    #[arg(long)]
    out_dist: PathBuf,
    #[arg(long)]
    out_region: Option<PathBuf>,
    #[arg(long)]
    out_labels: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GtArgs {
    /// Ground-truth graph, rasterized on the prediction's extent.
    #[arg(long)]
    gt_graph: PathBuf,
    #[arg(long, default_value_t = DEFAULT_DILATE_RADIUS)]
    dilate: u32,
    #[arg(long, default_value_t = DEFAULT_DMAX)]
    dmax: f32,
}

#[derive(Debug, Args)]
struct LossOpts {
    #[arg(long, default_value_t = 1e-4)]
    alpha: f64,
    #[arg(long, default_value_t = 0.1)]
    beta: f64,
    #[arg(long, default_value_t = 64, conflicts_with = "global")]
    window: usize,
    /// One window covering the whole image.
    #[arg(long)]
    global: bool,
    /// Keep every cross-label pair, not only those whose bottleneck is on a road.
    #[arg(long)]
    constrained: bool,
}

impl LossOpts {
    fn config(&self) -> LossConfig {
        LossConfig {
            alpha: self.alpha,
            beta: self.beta,
            window: self.window,
            mode: if self.global { LossMode::Global } else { LossMode::Windowed },
            search: if self.constrained { PairSearch::Constrained } else { PairSearch::Unconstrained },
        }
    }
}

#[derive(Debug, Args)]
struct LossArgs {
    #[arg(long)]
    pred: PathBuf,
    #[command(flatten)]
    gt: GtArgs,
    #[command(flatten)]
    opts: LossOpts,
    #[arg(long)]
    out_grad: Option<PathBuf>,
    /// Worker threads (default: one per core).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Debug, Args)]
struct GradcheckArgs {
    #[arg(long)]
    pred: PathBuf,
    #[command(flatten)]
    gt: GtArgs,
    #[command(flatten)]
    opts: LossOpts,
    #[arg(long, default_value_t = 1e-3)]
    eps: f32,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long, default_value_t = 17)]
    seed: u64,
}

#[derive(Debug, Args)]
struct ExtractArgs {
    #[arg(long)]
    pred: PathBuf,
    #[arg(long, default_value_t = DEFAULT_TAU)]
    tau: f32,
    #[arg(long, default_value_t = DEFAULT_MIN_SPUR)]
    min_spur: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[arg(long)]
    pred_graph: PathBuf,
    #[arg(long)]
    gt_graph: PathBuf,
    #[arg(long)]
    width: usize,
    #[arg(long)]
    height: usize,
    #[arg(long, default_value_t = 17)]
    seed: u64,
    #[arg(long, default_value_t = 500)]
    samples: usize,
    #[arg(long, default_value_t = 5.0)]
    buffer: f64,
    #[arg(long, default_value_t = 15.0)]
    snap: f64,
    #[arg(long, default_value_t = 0.05)]
    tol: f64,
    #[arg(long, default_value_t = 15.0)]
    hm_radius: f64,
    #[arg(long, default_value_t = 8)]
    hm_steps: usize,
    #[arg(long)]
    json: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Debug, Args)]
struct SelftestArgs {
    #[arg(long, default_value_t = 200)]
    seeds: u64,
}

/// Parse `argv` (program name first) and run the subcommand, writing
/// results to standard output and diagnostics to standard error.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let stdout = std::io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let result = dispatch(cli.command, &mut out);
    let _ = out.flush();
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("roadtopo: {e}");
            e.code()
        }
    }
}

fn dispatch(cmd: Command, out: &mut impl Write) -> Result<()> {
    match cmd {
        Command::Gengt(a) => gengt(a, out),
        Command::Loss(a) => buffered(a.threads, out, |buf| loss(&a, buf)),
        Command::Gradcheck(a) => gradcheck(a, out),
        Command::Extract(a) => extract(a, out),
        Command::Eval(a) => buffered(a.threads, out, |buf| eval(&a, buf)),
        Command::Selftest(a) => selftest(a, out),
    }
}

/// Run `f` on a pool of `threads` workers, collecting its output first.
fn buffered(
    threads: Option<usize>,
    out: &mut impl Write,
    f: impl FnOnce(&mut Vec<u8>) -> Result<()> + Send,
) -> Result<()> {
    let mut buf = Vec::new();
    let res = match threads {
        None => f(&mut buf),
        Some(0) => return Err(CliError::Usage("--threads must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Usage(e.to_string()))?
            .install(|| f(&mut buf)),
    };
    out.write_all(&buf).map_err(|source| CliError::Io { path: "<stdout>".into(), source })?;
    res
}

fn emit(out: &mut impl Write, key: &str, value: impl std::fmt::Display) -> Result<()> {
    writeln!(out, "{key}={value}").map_err(|source| CliError::Io { path: "<stdout>".into(), source })
}

fn read_file(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|source| CliError::Io { path: path.into(), source })
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|source| CliError::Io { path: path.into(), source })
}

fn load_grid(path: &Path) -> Result<ScalarGrid> {
    read_grid(read_file(path)?.as_slice()).map_err(|source| CliError::Input { path: path.into(), source })
}

fn save_grid(path: &Path, grid: &ScalarGrid) -> Result<()> {
    let mut buf = Vec::new();
    write_grid(&mut buf, grid).map_err(|source| CliError::Io { path: path.into(), source })?;
    write_file(path, &buf)
}

fn load_graph(path: &Path) -> Result<GeoGraph> {
    let bytes = read_file(path)?;
    let text = String::from_utf8(bytes).map_err(|_| CliError::Input {
        path: path.into(),
        source: roadtopo::Error::Format("graph file is not UTF-8".into()),
    })?;
    parse_graph(&text).map_err(|source| CliError::Input { path: path.into(), source })
}

fn ground_truth(gt: &GtArgs, width: usize, height: usize) -> Result<GroundTruth> {
    let graph = load_graph(&gt.gt_graph)?;
    build_ground_truth(&graph, width, height, gt.dilate, gt.dmax)
        .map_err(|source| CliError::Input { path: gt.gt_graph.clone(), source })
}

fn gengt(a: GengtArgs, out: &mut impl Write) -> Result<()> {
    let graph = load_graph(&a.graph)?;
    let gt = build_ground_truth(&graph, a.width, a.height, a.dilate, a.dmax).map_err(|e| match e {
        roadtopo::Error::Config(_) => CliError::Core(e),
        source => CliError::Input { path: a.graph.clone(), source },
    })?;
    save_grid(&a.out_dist, &gt.dist)?;
    if let Some(p) = &a.out_region {
        save_grid(p, &mask_to_grid(&gt.region))?;
    }
    if let Some(p) = &a.out_labels {
        save_grid(p, &labels_to_grid(&gt.labels))?;
    }
    emit(out, "width", a.width)?;
    emit(out, "height", a.height)?;
    emit(out, "region_pixels", gt.region.count())?;
    emit(out, "components", gt.labels.component_count())
}

fn loss(a: &LossArgs, out: &mut impl Write) -> Result<()> {
    let pred = load_grid(&a.pred)?;
    let gt = ground_truth(&a.gt, pred.width(), pred.height())?;
    let b = total_loss(&pred, &gt, &a.opts.config())?;
    emit(out, "mse", b.mse)?;
    emit(out, "dis", b.dis)?;
    emit(out, "conn", b.conn)?;
    emit(out, "total", b.total)?;
    if let Some(p) = &a.out_grad {
        save_grid(p, &b.grad)?;
    }
    Ok(())
}

fn gradcheck(a: GradcheckArgs, out: &mut impl Write) -> Result<()> {
    let pred = load_grid(&a.pred)?;
    let gt = ground_truth(&a.gt, pred.width(), pred.height())?;
    let r = grad_check(&pred, &gt, &a.opts.config(), a.eps, a.samples, a.seed)?;
    emit(out, "max_rel_err", r.max_rel_err)?;
    emit(out, "checked", r.checked)?;
    if r.max_rel_err > GRADCHECK_LIMIT {
        return Err(CliError::Check(format!("relative error {} exceeds {GRADCHECK_LIMIT}", r.max_rel_err)));
    }
    Ok(())
}

fn extract(a: ExtractArgs, out: &mut impl Write) -> Result<()> {
    let pred = load_grid(&a.pred)?;
    let g = extract_graph(&pred, &ExtractConfig { tau: a.tau, min_spur: a.min_spur })?;
    write_file(&a.out, g.to_text().as_bytes())?;
    emit(out, "nodes", g.node_count())?;
    emit(out, "edges", g.edge_count())?;
    emit(out, "length", g.total_length())
}

fn eval(a: &EvalArgs, out: &mut impl Write) -> Result<()> {
    let pred = load_graph(&a.pred_graph)?;
    let gt = load_graph(&a.gt_graph)?;
    let cfg = MetricConfig {
        seed: a.seed,
        samples: a.samples,
        buffer: a.buffer,
        snap_radius: a.snap,
        rel_tol: a.tol,
        hm_radius: a.hm_radius,
        hm_steps: a.hm_steps,
        ..MetricConfig::default()
    };
    let report = evaluate(&pred, &gt, a.width, a.height, &cfg)?;
    out.write_all(report.to_text().as_bytes())
        .map_err(|source| CliError::Io { path: "<stdout>".into(), source })?;
    if let Some(p) = &a.json {
        let json = serde_json::to_string_pretty(&report).expect("report serializes");
        write_file(p, json.as_bytes())?;
    }
    Ok(())
}

fn selftest(a: SelftestArgs, out: &mut impl Write) -> Result<()> {
    if a.seeds == 0 {
        return Err(CliError::Usage("--seeds must be at least 1".into()));
    }
    let results = checks::selftest(a.seeds);
    let mut failed = 0;
    for c in &results {
        writeln!(out, "{}", c.line()).map_err(|source| CliError::Io { path: "<stdout>".into(), source })?;
        failed += usize::from(!c.passed);
    }
    emit(out, "checks", results.len())?;
    emit(out, "failed", failed)?;
    if failed > 0 {
        return Err(CliError::Check(format!("{failed} check(s) failed")));
    }
    Ok(())
}
