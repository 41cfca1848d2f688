//! Bias correction, confidence intervals, the CRS-vs-VRS statistic and the
//! Monte Carlo experiments built on them.

use std::cell::RefCell;
use std::collections::HashMap;

use nalgebra::DVector;
use rand::seq::index::sample as sample_indices;
use serde::Serialize;

use crate::dea::{crs_score, scores_at_observations, section_at, EvalPoint, ObservationSet};
use crate::error::{Error, Result};
use crate::kappa::{curvature_det, kappa_hat, local_quadratic_fit, matrix_rows, theta_hat, KappaEstimate, ThetaScaling};
use crate::limit::{simulate_replicates, LimitReplicates, RegionKind, RegionSpec};
use crate::rng::{par_map, SeedStream};
use crate::synthetic::ScenarioSpec;

pub const DEFAULT_REPLICATES: usize = 2000;
pub const DEFAULT_ALPHA: f64 = 0.05;
/// Subsample draws used for the `ρ_n` p-value.
pub const SUBSAMPLE_DRAWS: usize = 500;

/// `2/(d+1)`, the exponent in `n^{−2/(d+1)}`.
pub fn rate_exponent(p_eff: usize) -> f64 {
    2.0 / (p_eff as f64 + 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BiasCorrection {
    pub raw: f64,
    pub bias_corrected: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub alpha: f64,
    pub replicates: usize,
    pub rate_exponent_used: f64,
    pub mean_replicate: f64,
}

fn order_index(b: usize, x: f64) -> usize {
    (x.round() as usize).clamp(1, b)
}

/// Shift `raw` by the scaled mean of the replicates and form the
/// order-statistic interval. The interval is reported with
/// `ci_low ≤ ci_high`.
pub fn bias_correct(
    raw: f64,
    values: &[f64],
    n: usize,
    p_eff: usize,
    y0_norm: f64,
    alpha: f64,
) -> Result<BiasCorrection> {
    let b = values.len();
    if b < 2 {
        return Err(Error::InsufficientReplicates(b));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidSample("non-finite replicate value".into()));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidSample(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let rate = rate_exponent(p_eff);
    let scale = (n as f64).powf(-rate) / y0_norm;
    let mean = values.iter().sum::<f64>() / b as f64;
    let mut desc = values.to_vec();
    desc.sort_by(|a, b| b.total_cmp(a));
    let z = |j: usize| desc[j - 1];
    let e1 = raw - scale * z(order_index(b, b as f64 * (1.0 - alpha / 2.0)));
    let e2 = raw - scale * z(order_index(b, b as f64 * alpha / 2.0));
    Ok(BiasCorrection {
        raw,
        bias_corrected: raw - scale * mean,
        ci_low: e1.min(e2),
        ci_high: e1.max(e2),
        alpha,
        replicates: b,
        rate_exponent_used: rate,
        mean_replicate: mean,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InferConfig {
    pub epsilon: Option<f64>,
    pub delta: Option<f64>,
    pub replicates: usize,
    pub alpha: f64,
    pub theta_scaling: ThetaScaling,
    pub seed: u64,
    pub workers: usize,
}

impl Default for InferConfig {
    fn default() -> Self {
        InferConfig {
            epsilon: None,
            delta: None,
            replicates: DEFAULT_REPLICATES,
            alpha: DEFAULT_ALPHA,
            theta_scaling: ThetaScaling::Section,
            seed: 0,
            workers: 0,
        }
    }
}

/// `0.25·ĝ*(0)·n^{−1/(d+3)}`.
pub fn default_bandwidth(g_star_origin: f64, n: usize, p_eff: usize) -> f64 {
    0.25 * g_star_origin * (n as f64).powf(-1.0 / (p_eff as f64 + 3.0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InferenceResult {
    /// DEA-CRS `λ̂(x0, y0)`.
    pub raw: f64,
    pub bias_corrected: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub alpha: f64,
    #[serde(rename = "B")]
    pub replicates: usize,
    pub rate_exponent_used: f64,
    pub n: usize,
    pub p_eff: usize,
    pub y0_norm: f64,
    /// `ĝ*(0)` on the section (`‖y0‖·λ̂` when the origin is covered).
    pub g_star_origin: f64,
    pub kappa: KappaEstimate,
    /// `None` when `θ̂ = 0` and no simulation was run.
    pub region: Option<RegionKind>,
    pub region_scale: Option<f64>,
    pub invalid_count: usize,
    pub mean_replicate: f64,
    /// Why the rectangle region or the degenerate path was used, if it was.
    pub fallback: Option<String>,
    pub seed: u64,
}

/// `ĝ*` evaluator that memoises LP solves by the bit pattern of `z`.
struct CachedHeights<'a> {
    section: &'a crate::geometry::Section,
    cache: RefCell<HashMap<Vec<u64>, Result<f64>>>,
}

impl CachedHeights<'_> {
    fn at(&self, z: &DVector<f64>) -> Result<f64> {
        let key: Vec<u64> = z.iter().map(|v| v.to_bits()).collect();
        if let Some(v) = self.cache.borrow().get(&key) {
            return v.clone();
        }
        let v = self.section.height_at(z);
        self.cache.borrow_mut().insert(key, v.clone());
        v
    }
}

/// The full pipeline: raw score, `κ̂`, limit replicates, bias correction.
pub fn infer(sample: &ObservationSet, at: &EvalPoint, config: &InferConfig) -> Result<InferenceResult> {
    let raw = crs_score(sample, at)?.lambda_hat;
    let section = section_at(sample, at)?;
    let p_eff = section.dim();
    let n = sample.n();
    let y0_norm = at.y0_norm();
    let origin = DVector::zeros(p_eff - 1);
    let g_origin = match section.height_at(&origin) {
        Ok(v) => v,
        Err(Error::OutsideHull) => y0_norm * raw,
        Err(e) => return Err(e),
    };
    let heights = CachedHeights { section: &section, cache: RefCell::new(HashMap::new()) };
    heights.cache.borrow_mut().insert(origin.iter().map(|v| v.to_bits()).collect(), Ok(g_origin));

    let fallback_bw = default_bandwidth(g_origin, n, p_eff);
    let epsilon = config.epsilon.unwrap_or(fallback_bw);
    let delta = config.delta.unwrap_or(fallback_bw);
    let (theta, n_eps) =
        theta_hat(section.points(), section.anchor_norm(), epsilon, config.theta_scaling, |z| heights.at(z))?;

    let mut kappa = KappaEstimate {
        theta_hat: theta,
        n_eps,
        quad_matrix: None,
        det_term: None,
        kappa_hat: None,
        epsilon,
        delta,
        theta_scaling: config.theta_scaling,
    };
    let mut fallback = None;
    let mut region = RegionKind::Paraboloid;
    if p_eff == 1 {
        region = RegionKind::Rectangle;
    } else {
        match local_quadratic_fit(section.points(), delta, |z| heights.at(z)) {
            Ok(fit) => {
                kappa.quad_matrix = Some(matrix_rows(&fit.quad));
                kappa.det_term = Some(curvature_det(&fit.quad));
                match kappa_hat(theta, &fit.quad) {
                    Ok(k) => kappa.kappa_hat = Some(k),
                    Err(e @ Error::NotLocallyStrictlyConcave { .. }) => {
                        region = RegionKind::Rectangle;
                        fallback = Some(e.to_string());
                    }
                    Err(e) => return Err(e),
                }
            }
            Err(e @ Error::InsufficientLocalData { .. }) => {
                region = RegionKind::Rectangle;
                fallback = Some(e.to_string());
            }
            Err(e) => return Err(e),
        }
    }
    let scale = match region {
        RegionKind::Paraboloid => kappa.kappa_hat.unwrap_or(0.0),
        RegionKind::Rectangle => theta,
    };

    let seed = SeedStream::new(config.seed);
    let (values, region_used, invalid_count) = if scale > 0.0 {
        let spec = RegionSpec::new(region, p_eff, scale, n)?;
        let reps: LimitReplicates = simulate_replicates(&spec, config.replicates, seed.child("limit", 0), config.workers)?;
        (reps.values, Some(region), reps.invalid_count)
    } else {
        fallback = Some("no observations in the frontier neighbourhood; bias taken as zero".into());
        (vec![0.0; config.replicates], None, 0)
    };
    let bc = bias_correct(raw, &values, n, p_eff, y0_norm, config.alpha)?;
    Ok(InferenceResult {
        raw,
        bias_corrected: bc.bias_corrected,
        ci_low: bc.ci_low,
        ci_high: bc.ci_high,
        alpha: bc.alpha,
        replicates: bc.replicates,
        rate_exponent_used: bc.rate_exponent_used,
        n,
        p_eff,
        y0_norm,
        g_star_origin: g_origin,
        kappa,
        region: region_used,
        region_scale: region_used.map(|_| scale),
        invalid_count,
        mean_replicate: bc.mean_replicate,
        fallback,
        seed: config.seed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrsTestResult {
    pub rho_n: f64,
    pub per_unit_ratios: Vec<f64>,
    /// Experimental subsampling p-value.
    pub p_value: Option<f64>,
    pub subsample_size: Option<usize>,
}

/// `λ̂_CRS/λ̂_VRS` at each observation.
pub fn per_unit_ratios(sample: &ObservationSet) -> Result<Vec<f64>> {
    scores_at_observations(sample)?
        .into_iter()
        .map(|(crs, vrs)| {
            if vrs.feasible && vrs.lambda_hat > 0.0 {
                Ok(crs.lambda_hat / vrs.lambda_hat)
            } else {
                Err(Error::OutsideHull)
            }
        })
        .collect()
}

fn mean_excess(ratios: &[f64]) -> f64 {
    ratios.iter().map(|r| (r - 1.0).max(0.0)).sum::<f64>() / ratios.len() as f64
}

/// `ρ_n = mean(λ̂/λ̂_VRS − 1)` without a p-value.
pub fn rho_n(sample: &ObservationSet) -> Result<CrsTestResult> {
    let ratios = per_unit_ratios(sample)?;
    Ok(CrsTestResult { rho_n: mean_excess(&ratios), per_unit_ratios: ratios, p_value: None, subsample_size: None })
}

/// `ρ_n` with an m-out-of-n subsampling p-value, `m = ⌈n^{2/3}⌉`. The
/// p-value is the fraction of subsamples with
/// `τ_m(ρ*_m − ρ_n) ≥ τ_n ρ_n`, `τ_k = k^{2/(p+q+1)}`. Omitted when
/// `m ≥ n`.
pub fn rho_test(sample: &ObservationSet, draws: usize, seed: u64, workers: usize) -> Result<CrsTestResult> {
    let mut result = rho_n(sample)?;
    let n = sample.n();
    let m = (n as f64).powf(2.0 / 3.0).ceil() as usize;
    if m >= n || draws == 0 {
        return Ok(result);
    }
    let tau = |k: usize| (k as f64).powf(2.0 / (sample.p() + sample.q() + 1) as f64);
    let stream = SeedStream::new(seed);
    let stats = par_map(draws, workers, |b| {
        let mut rng = stream.child("subsample", b as u64).rng();
        let mut idx = sample_indices(&mut rng, n, m).into_vec();
        idx.sort_unstable();
        let sub = sample.subset(&idx)?;
        Ok::<f64, Error>(mean_excess(&per_unit_ratios(&sub)?))
    });
    let threshold = tau(n) * result.rho_n;
    let mut exceed = 0;
    for s in stats {
        let s: f64 = s?;
        if tau(m) * (s - result.rho_n) >= threshold {
            exceed += 1;
        }
    }
    result.p_value = Some(exceed as f64 / draws as f64);
    result.subsample_size = Some(m);
    Ok(result)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateResult {
    pub sizes: Vec<usize>,
    pub median_abs_errors: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
}

/// Least-squares line through `(x, y)`: `(slope, intercept)`.
pub fn fit_line(x: &[f64], y: &[f64]) -> (f64, f64) {
    let k = x.len() as f64;
    let mx = x.iter().sum::<f64>() / k;
    let my = y.iter().sum::<f64>() / k;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

/// Log-log slope of the median `|λ̂ − λ|` against `n`.
pub fn rate_experiment(
    scenario: &ScenarioSpec,
    at: &EvalPoint,
    n_grid: &[usize],
    reps: usize,
    seed: u64,
    workers: usize,
) -> Result<RateResult> {
    let mut sizes = n_grid.to_vec();
    sizes.sort_unstable();
    sizes.dedup();
    if sizes.len() < 3 || sizes[0] == 0 {
        return Err(Error::InvalidGrid(format!("need at least 3 distinct positive sizes, got {n_grid:?}")));
    }
    if reps == 0 {
        return Err(Error::InvalidGrid("need at least one repetition".into()));
    }
    let truth = scenario.true_lambda(at)?;
    let stream = SeedStream::new(seed);
    let mut medians = Vec::with_capacity(sizes.len());
    for &n in &sizes {
        let errors = par_map(reps, workers, |r| {
            let s = stream.child("rate", n as u64).child("rep", r as u64).seed();
            let sample = scenario.with_n(n).with_seed(s).generate()?;
            Ok::<f64, Error>((crs_score(&sample, at)?.lambda_hat - truth).abs())
        })
        .into_iter()
        .collect::<Result<Vec<f64>>>()?;
        medians.push(median(&errors));
    }
    let lx: Vec<f64> = sizes.iter().map(|&n| (n as f64).ln()).collect();
    let ly: Vec<f64> = medians.iter().map(|m| m.ln()).collect();
    let (slope, intercept) = fit_line(&lx, &ly);
    Ok(RateResult { sizes, median_abs_errors: medians, slope, intercept })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EcdfRow {
    pub x: f64,
    pub ecdf_a: f64,
    pub ecdf_b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EcdfComparison {
    pub ks_distance: f64,
    pub table: Vec<EcdfRow>,
}

fn ecdf_at(sorted: &[f64], x: f64) -> f64 {
    sorted.partition_point(|&v| v <= x) as f64 / sorted.len() as f64
}

/// Kolmogorov–Smirnov distance between two empirical CDFs, with both CDFs
/// tabulated on the pooled sample points.
pub fn ecdf_compare(a: &[f64], b: &[f64]) -> Result<EcdfComparison> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyInput);
    }
    let sort = |v: &[f64]| {
        let mut s = v.to_vec();
        s.sort_by(f64::total_cmp);
        s
    };
    let (sa, sb) = (sort(a), sort(b));
    let mut grid: Vec<f64> = sa.iter().chain(&sb).copied().collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let table: Vec<EcdfRow> =
        grid.into_iter().map(|x| EcdfRow { x, ecdf_a: ecdf_at(&sa, x), ecdf_b: ecdf_at(&sb, x) }).collect();
    let ks_distance = table.iter().map(|r| (r.ecdf_a - r.ecdf_b).abs()).fold(0.0, f64::max);
    Ok(EcdfComparison { ks_distance, table })
}

/// KS distance between the empirical CDF of `values` and a continuous `cdf`.
pub fn ks_against<F: Fn(f64) -> f64>(values: &[f64], cdf: F) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let k = v.len() as f64;
    Ok(v.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / k).abs().max((f - (i + 1) as f64 / k).abs())
        })
        .fold(0.0, f64::max))
}
