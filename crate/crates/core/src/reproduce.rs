//! The simulation studies: the squared-error ratio table, the ECDF
//! comparison of scaled errors with `Z_n(0)`, and the convergence-rate fits.

use serde::Serialize;

use crate::dea::{crs_score, EvalPoint};
use crate::error::{Error, Result};
use crate::inference::{ecdf_compare, infer, median, rate_experiment, EcdfComparison, InferConfig, RateResult};
use crate::kappa::ThetaScaling;
use crate::limit::{simulate_replicates, RegionKind, RegionSpec};
use crate::rng::{par_map, SeedStream};
use crate::synthetic::ScenarioSpec;

/// `ε = δ` values swept for each sample size.
pub const TABLE1_GRID_100: [f64; 5] = [3.50, 3.75, 4.00, 4.25, 4.50];
pub const TABLE1_GRID_400: [f64; 5] = [3.25, 3.50, 3.75, 4.00, 4.25];

pub fn two_output_point() -> EvalPoint {
    EvalPoint { x0: vec![15.0, 15.0], y0: vec![10.0, 10.0] }
}

pub fn single_output_point() -> EvalPoint {
    EvalPoint { x0: vec![0.5, 0.5], y0: vec![0.25] }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table1Row {
    pub n: usize,
    pub epsilon: f64,
    pub reps: usize,
    pub theta_scaling: ThetaScaling,
    pub median_sq_error_raw: f64,
    pub median_sq_error_corrected: f64,
    pub ratio: f64,
}

/// Raw and bias-corrected estimates for one Monte Carlo sample of the
/// two-output scenario, one corrected value per bandwidth.
fn table1_rep(n: usize, grid: &[f64], b: usize, scaling: ThetaScaling, stream: SeedStream) -> Result<(f64, Vec<f64>)> {
    let sample = ScenarioSpec::cobb_douglas_q2(n, stream.child("sample", 0).seed()).generate()?;
    let at = two_output_point();
    let raw = crs_score(&sample, &at)?.lambda_hat;
    let corrected = grid
        .iter()
        .enumerate()
        .map(|(k, &eps)| {
            let config = InferConfig {
                epsilon: Some(eps),
                delta: Some(eps),
                replicates: b,
                theta_scaling: scaling,
                seed: stream.child("limit", k as u64).seed(),
                workers: 1,
                ..InferConfig::default()
            };
            Ok(infer(&sample, &at, &config)?.bias_corrected)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok((raw, corrected))
}

/// Ratio of median squared errors (bias-corrected over raw) for each
/// `ε = δ` in `grid`. Repetition `j` uses the same data for every bandwidth
/// and the same seed for every `n`.
pub fn table1(
    n: usize,
    grid: &[f64],
    reps: usize,
    b: usize,
    scaling: ThetaScaling,
    seed: u64,
    workers: usize,
) -> Result<Vec<Table1Row>> {
    if reps == 0 || grid.is_empty() {
        return Err(Error::InvalidGrid("need at least one repetition and one bandwidth".into()));
    }
    let truth = ScenarioSpec::cobb_douglas_q2(1, 0).true_lambda(&two_output_point())?;
    let stream = SeedStream::new(seed);
    let runs = par_map(reps, workers, |j| table1_rep(n, grid, b, scaling, stream.child("table1", j as u64)))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let raw_sq: Vec<f64> = runs.iter().map(|(r, _)| (r - truth).powi(2)).collect();
    let med_raw = median(&raw_sq);
    Ok(grid
        .iter()
        .enumerate()
        .map(|(k, &eps)| {
            let sq: Vec<f64> = runs.iter().map(|(_, c)| (c[k] - truth).powi(2)).collect();
            let med = median(&sq);
            Table1Row {
                n,
                epsilon: eps,
                reps,
                theta_scaling: scaling,
                median_sq_error_raw: med_raw,
                median_sq_error_corrected: med,
                ratio: med / med_raw,
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeakConvergence {
    pub n: usize,
    pub kappa: f64,
    pub draws: usize,
    pub comparison: EcdfComparison,
}

/// Scaled errors `n^{2/3}(ĝ(x0) − g(x0))` of the single-output Cobb–Douglas
/// model (rate 3) at `x0 = (0.5, 0.5)` against `Z_n(0)` simulated with the
/// exact `κ`.
pub fn weak_convergence(n: usize, draws: usize, seed: u64, workers: usize) -> Result<WeakConvergence> {
    let scenario = ScenarioSpec::cobb_douglas_q1(n, 3.0, 0);
    let at = single_output_point();
    let g0 = scenario.frontier(&at.x0).unwrap_or(0.0);
    let kappa = scenario.true_kappa(&at.x0)?;
    let stream = SeedStream::new(seed);
    let scale = (n as f64).powf(2.0 / 3.0);
    let errors = par_map(draws, workers, |j| {
        let sample = scenario.with_seed(stream.child("data", j as u64).seed()).generate()?;
        let g_hat = crs_score(&sample, &at)?.lambda_hat * at.y0[0];
        Ok::<f64, Error>(scale * (g_hat - g0))
    })
    .into_iter()
    .collect::<Result<Vec<f64>>>()?;
    let spec = RegionSpec::new(RegionKind::Paraboloid, 2, kappa, n)?;
    let z = simulate_replicates(&spec, draws, stream.child("limit", 0), workers)?;
    Ok(WeakConvergence { n, kappa, draws, comparison: ecdf_compare(&errors, &z.values)? })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateSummary {
    pub scenario: String,
    pub expected_slope: f64,
    pub result: RateResult,
}

/// Rate fits for the single-output (`p = 2`) and two-output (`p = q = 2`)
/// Cobb–Douglas scenarios.
pub fn rate_study(sizes: &[usize], reps: usize, seed: u64, workers: usize) -> Result<Vec<RateSummary>> {
    let q1 = ScenarioSpec::cobb_douglas_q1(1, 3.0, 0);
    let q2 = ScenarioSpec::cobb_douglas_q2(1, 0);
    Ok(vec![
        RateSummary {
            scenario: "cobb-douglas-q1".into(),
            expected_slope: -2.0 / 3.0,
            result: rate_experiment(&q1, &single_output_point(), sizes, reps, seed, workers)?,
        },
        RateSummary {
            scenario: "cobb-douglas-q2".into(),
            expected_slope: -0.5,
            result: rate_experiment(&q2, &two_output_point(), sizes, reps, seed, workers)?,
        },
    ])
}
