//! Command-line front end.
//!
//! Exit codes: 0 on success, 2 for usage or input errors, 3 for numerical
//! degeneracies (uncovered simulation hulls, LP iteration limits, ...).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::dea::{crs_score, scores_at_observations, vrs_score, EvalPoint, ObservationSet, Score};
use crate::error::Error;
use crate::inference::{
    infer, median, rho_n, rho_test, InferConfig, DEFAULT_ALPHA, DEFAULT_REPLICATES, SUBSAMPLE_DRAWS,
};
use crate::io::{read_observations, report_json, write_table, IoError};
use crate::kappa::ThetaScaling;
use crate::limit::{simulate_replicates, RegionKind, RegionSpec};
use crate::reproduce::{rate_study, table1, weak_convergence, TABLE1_GRID_100, TABLE1_GRID_400};
use crate::rng::{SeedStream, SEED_ENV};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "frontier-cone", version, about = "Conical-hull DEA efficiency scores, limit-law simulation and bias-corrected inference")]
pub struct Cli {
    /// Master seed (falls back to FRONTIER_CONE_SEED, then 0).
    #[arg(long, global = true, env = SEED_ENV)]
    seed: Option<u64>,
    /// Worker threads; results do not depend on this (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// DEA-CRS and DEA-VRS scores at (x0, y0).
    Score(ScoreArgs),
    /// Bias-corrected estimate and confidence interval at (x0, y0).
    Infer(InferArgs),
    /// Replicates of the limit variable Z_n(0).
    SimulateLimit(SimulateArgs),
    /// CRS-vs-VRS statistic with an experimental subsampling p-value.
    TestCrs(TestCrsArgs),
    /// Re-run one of the simulation studies.
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Args)]
struct PointArgs {
    /// CSV with header x1..xp,y1..yq.
    #[arg(long)]
    input: PathBuf,
    /// Comma-separated positive input vector.
    #[arg(long, value_delimiter = ',', required = true)]
    x0: Vec<f64>,
    /// Comma-separated positive output vector.
    #[arg(long, value_delimiter = ',', required = true)]
    y0: Vec<f64>,
}

#[derive(Debug, Args)]
struct ScoreArgs {
    #[command(flatten)]
    point: PointArgs,
    /// Also report both scores at every observation.
    #[arg(long)]
    per_unit: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ScalingArg {
    Section,
    AnchorNorm,
}

impl From<ScalingArg> for ThetaScaling {
    fn from(s: ScalingArg) -> Self {
        match s {
            ScalingArg::Section => ThetaScaling::Section,
            ScalingArg::AnchorNorm => ThetaScaling::AnchorNorm,
        }
    }
}

#[derive(Debug, Args)]
struct InferArgs {
    #[command(flatten)]
    point: PointArgs,
    /// Neighbourhood size for the density estimate.
    #[arg(long)]
    eps: Option<f64>,
    /// Neighbourhood size for the curvature fit.
    #[arg(long)]
    delta: Option<f64>,
    /// Limit-law replicates.
    #[arg(long = "B", default_value_t = DEFAULT_REPLICATES)]
    b: usize,
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    alpha: f64,
    #[arg(long, value_enum, default_value = "section")]
    theta_scaling: ScalingArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RegionArg {
    Paraboloid,
    Rectangle,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long, value_enum, default_value = "paraboloid")]
    region: RegionArg,
    /// Effective input dimension of the region.
    #[arg(long)]
    dim: usize,
    /// kappa (paraboloid) or theta (rectangle).
    #[arg(long, allow_negative_numbers = true)]
    scale: f64,
    /// Points per replicate.
    #[arg(long)]
    n: usize,
    #[arg(long = "B", default_value_t = DEFAULT_REPLICATES)]
    b: usize,
    /// CSV of replicate values.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct TestCrsArgs {
    #[arg(long)]
    input: PathBuf,
    /// Subsample draws for the p-value (0 disables it).
    #[arg(long, default_value_t = SUBSAMPLE_DRAWS)]
    subsamples: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Experiment {
    Table1,
    Fig23,
    Rate,
}

#[derive(Debug, Args)]
struct ReproduceArgs {
    experiment: Experiment,
    /// Monte Carlo repetitions (table1, rate) or draws per side (fig23).
    #[arg(long)]
    reps: Option<usize>,
    /// Limit-law replicates per bias correction (table1).
    #[arg(long = "B", default_value_t = DEFAULT_REPLICATES)]
    b: usize,
    /// Sample sizes (default depends on the experiment).
    #[arg(long, value_delimiter = ',')]
    sizes: Vec<usize>,
    /// Only this eps = delta value instead of the full grid (table1).
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long, value_enum, default_value = "anchor-norm")]
    theta_scaling: ScalingArg,
    /// Directory for CSV tables and the JSON summary.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Error surfaced by a command, carrying its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = if e.is_numerical() { EXIT_NUMERICAL } else { EXIT_USAGE };
        CliError { code, message: e.to_string() }
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        match e {
            IoError::Sample(inner) => inner.into(),
            other => CliError { code: EXIT_USAGE, message: other.to_string() },
        }
    }
}

fn usage(message: impl Into<String>) -> CliError {
    CliError { code: EXIT_USAGE, message: message.into() }
}

type CmdResult = Result<(), CliError>;

/// Parse `args`, run the command, write reports to `stdout` and diagnostics
/// to `stderr`; returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            let _ = if code == 0 { stdout.write_all(rendered.as_bytes()) } else { stderr.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    match dispatch(&cli, stdout) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message);
            e.code
        }
    }
}

fn dispatch(cli: &Cli, stdout: &mut dyn Write) -> CmdResult {
    let seed = cli.seed.unwrap_or(0);
    match &cli.command {
        Command::Score(a) => cmd_score(a, stdout),
        Command::Infer(a) => cmd_infer(a, seed, cli.workers, stdout),
        Command::SimulateLimit(a) => cmd_simulate_limit(a, seed, cli.workers, stdout),
        Command::TestCrs(a) => cmd_test_crs(a, seed, cli.workers, stdout),
        Command::Reproduce(a) => cmd_reproduce(a, seed, cli.workers, stdout),
    }
}

fn load(point: &PointArgs) -> Result<(ObservationSet, EvalPoint), CliError> {
    let at = EvalPoint::new(point.x0.clone(), point.y0.clone())?;
    let sample = read_observations(&point.input)?;
    if sample.p() != at.x0.len() || sample.q() != at.y0.len() {
        return Err(usage(format!(
            "{} has p = {}, q = {} but --x0 has {} and --y0 has {} entries",
            point.input.display(),
            sample.p(),
            sample.q(),
            at.x0.len(),
            at.y0.len()
        )));
    }
    Ok((sample, at))
}

fn emit(text: &str, out: Option<&Path>, stdout: &mut dyn Write) -> CmdResult {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| usage(format!("{}: {e}", path.display()))),
        None => stdout.write_all(text.as_bytes()).map_err(|e| usage(e.to_string())),
    }
}

fn create_file(path: &Path) -> Result<fs::File, CliError> {
    fs::File::create(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

#[derive(Serialize)]
struct UnitScores {
    index: usize,
    crs: Score,
    vrs: Score,
}

#[derive(Serialize)]
struct ScoreReport<'a> {
    n: usize,
    p: usize,
    q: usize,
    x0: &'a [f64],
    y0: &'a [f64],
    crs: Score,
    vrs: Score,
    #[serde(skip_serializing_if = "Option::is_none")]
    per_unit: Option<Vec<UnitScores>>,
}

fn cmd_score(a: &ScoreArgs, stdout: &mut dyn Write) -> CmdResult {
    let (sample, at) = load(&a.point)?;
    let per_unit = if a.per_unit {
        let scores = scores_at_observations(&sample)?;
        Some(scores.into_iter().enumerate().map(|(index, (crs, vrs))| UnitScores { index, crs, vrs }).collect())
    } else {
        None
    };
    let report = ScoreReport {
        n: sample.n(),
        p: sample.p(),
        q: sample.q(),
        x0: &at.x0,
        y0: &at.y0,
        crs: crs_score(&sample, &at)?,
        vrs: vrs_score(&sample, &at)?,
        per_unit,
    };
    emit(&report_json("score", &report)?, a.out.as_deref(), stdout)
}

fn check_positive(name: &str, v: Option<f64>) -> CmdResult {
    match v {
        Some(x) if !(x > 0.0 && x.is_finite()) => Err(usage(format!("--{name} must be positive, got {x}"))),
        _ => Ok(()),
    }
}

fn cmd_infer(a: &InferArgs, seed: u64, workers: usize, stdout: &mut dyn Write) -> CmdResult {
    check_positive("eps", a.eps)?;
    check_positive("delta", a.delta)?;
    if a.b < 2 {
        return Err(usage(format!("--B must be at least 2, got {}", a.b)));
    }
    if !(a.alpha > 0.0 && a.alpha < 1.0) {
        return Err(usage(format!("--alpha must lie in (0, 1), got {}", a.alpha)));
    }
    let (sample, at) = load(&a.point)?;
    let config = InferConfig {
        epsilon: a.eps,
        delta: a.delta,
        replicates: a.b,
        alpha: a.alpha,
        theta_scaling: a.theta_scaling.into(),
        seed,
        workers,
    };
    let result = infer(&sample, &at, &config)?;
    emit(&report_json("infer", &result)?, a.out.as_deref(), stdout)
}

#[derive(Serialize)]
struct Quantiles {
    min: f64,
    q05: f64,
    q25: f64,
    median: f64,
    q75: f64,
    q95: f64,
    max: f64,
    mean: f64,
}

fn quantiles(values: &[f64]) -> Quantiles {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let at = |p: f64| v[((p * (v.len() - 1) as f64).round() as usize).min(v.len() - 1)];
    Quantiles {
        min: v[0],
        q05: at(0.05),
        q25: at(0.25),
        median: median(&v),
        q75: at(0.75),
        q95: at(0.95),
        max: v[v.len() - 1],
        mean: v.iter().sum::<f64>() / v.len() as f64,
    }
}

#[derive(Serialize)]
struct SimulateReport {
    region: RegionSpec,
    half_side: f64,
    thickness: f64,
    #[serde(rename = "B")]
    replicates: usize,
    invalid_count: usize,
    seed: u64,
    summary: Quantiles,
}

#[derive(Serialize)]
struct ReplicateRow {
    replicate: usize,
    value: f64,
}

fn cmd_simulate_limit(a: &SimulateArgs, seed: u64, workers: usize, stdout: &mut dyn Write) -> CmdResult {
    let kind = match a.region {
        RegionArg::Paraboloid => RegionKind::Paraboloid,
        RegionArg::Rectangle => RegionKind::Rectangle,
    };
    let spec = RegionSpec::new(kind, a.dim, a.scale, a.n).map_err(|e| usage(e.to_string()))?;
    if a.b == 0 {
        return Err(usage("--B must be at least 1"));
    }
    let reps = simulate_replicates(&spec, a.b, SeedStream::new(seed), workers)?;
    if let Some(path) = &a.out {
        let rows: Vec<ReplicateRow> =
            reps.values.iter().enumerate().map(|(replicate, &value)| ReplicateRow { replicate, value }).collect();
        write_table(&rows, create_file(path)?)?;
    }
    let report = SimulateReport {
        region: spec,
        half_side: spec.half_side(),
        thickness: spec.thickness(),
        replicates: a.b,
        invalid_count: reps.invalid_count,
        seed,
        summary: quantiles(&reps.values),
    };
    emit(&report_json("simulate-limit", &report)?, None, stdout)
}

fn cmd_test_crs(a: &TestCrsArgs, seed: u64, workers: usize, stdout: &mut dyn Write) -> CmdResult {
    let sample = read_observations(&a.input)?;
    let result = if a.subsamples == 0 { rho_n(&sample)? } else { rho_test(&sample, a.subsamples, seed, workers)? };
    #[derive(Serialize)]
    struct Body<'a> {
        n: usize,
        seed: u64,
        p_value_experimental: bool,
        #[serde(flatten)]
        result: &'a crate::inference::CrsTestResult,
    }
    let body = Body { n: sample.n(), seed, p_value_experimental: result.p_value.is_some(), result: &result };
    emit(&report_json("test-crs", &body)?, a.out.as_deref(), stdout)
}

fn cmd_reproduce(a: &ReproduceArgs, seed: u64, workers: usize, stdout: &mut dyn Write) -> CmdResult {
    if let Some(dir) = &a.out {
        fs::create_dir_all(dir).map_err(|e| usage(format!("{}: {e}", dir.display())))?;
    }
    let table_path = |name: &str| a.out.as_ref().map(|d| d.join(name));
    let summary = match a.experiment {
        Experiment::Table1 => {
            check_positive("eps", a.eps)?;
            let reps = a.reps.unwrap_or(100);
            let sizes = if a.sizes.is_empty() { vec![100, 400] } else { a.sizes.clone() };
            let mut rows = Vec::new();
            for &n in &sizes {
                let grid: Vec<f64> = match (a.eps, n) {
                    (Some(e), _) => vec![e],
                    (None, 400) => TABLE1_GRID_400.to_vec(),
                    (None, _) => TABLE1_GRID_100.to_vec(),
                };
                rows.extend(table1(n, &grid, reps, a.b, a.theta_scaling.into(), seed, workers)?);
            }
            if let Some(path) = table_path("table1.csv") {
                write_table(&rows, create_file(&path)?)?;
            }
            report_json("reproduce", &serde_json::json!({ "experiment": "table1", "seed": seed, "rows": rows }))?
        }
        Experiment::Fig23 => {
            let draws = a.reps.unwrap_or(1000);
            let sizes = if a.sizes.is_empty() { vec![100, 400] } else { a.sizes.clone() };
            let mut summaries = Vec::new();
            for &n in &sizes {
                let wc = weak_convergence(n, draws, seed, workers)?;
                if let Some(path) = table_path(&format!("fig23_n{n}.csv")) {
                    write_table(&wc.comparison.table, create_file(&path)?)?;
                }
                summaries.push(serde_json::json!({
                    "n": n, "kappa": wc.kappa, "draws": draws, "ks_distance": wc.comparison.ks_distance
                }));
            }
            report_json("reproduce", &serde_json::json!({ "experiment": "fig23", "seed": seed, "sizes": summaries }))?
        }
        Experiment::Rate => {
            let reps = a.reps.unwrap_or(100);
            let sizes = if a.sizes.is_empty() { vec![100, 200, 400, 800] } else { a.sizes.clone() };
            let study = rate_study(&sizes, reps, seed, workers)?;
            if let Some(path) = table_path("rate.csv") {
                #[derive(Serialize)]
                struct Row<'a> {
                    scenario: &'a str,
                    n: usize,
                    median_abs_error: f64,
                }
                let rows: Vec<Row> = study
                    .iter()
                    .flat_map(|s| {
                        s.result
                            .sizes
                            .iter()
                            .zip(&s.result.median_abs_errors)
                            .map(|(&n, &m)| Row { scenario: &s.scenario, n, median_abs_error: m })
                    })
                    .collect();
                write_table(&rows, create_file(&path)?)?;
            }
            report_json("reproduce", &serde_json::json!({ "experiment": "rate", "seed": seed, "reps": reps, "fits": study }))?
        }
    };
    if let Some(path) = table_path("summary.json") {
        fs::write(&path, &summary).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    }
    emit(&summary, None, stdout)
}
