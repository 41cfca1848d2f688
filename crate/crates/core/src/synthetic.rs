//! Seeded data generators with known frontiers.
//!
//! Every scenario draws an efficient point on the frontier and shrinks its
//! output by `exp(−V/rate)` with `V ~ Exp(1)`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand_distr::Exp1;

use crate::dea::{EvalPoint, ObservationSet};
use crate::error::{Error, Result};
use crate::geometry::orthonormal_complement;
use crate::rng::SeedStream;

/// Single-output frontier supplied by the caller.
pub type FrontierFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Output angle range of the two-output Cobb–Douglas scenario.
pub const OMEGA_RANGE: (f64, f64) = (PI / 18.0, 4.0 * PI / 9.0);

#[derive(Clone)]
pub enum ScenarioKind {
    /// `p = 2, q = 1`, `g(x) = x1^0.4 x2^0.6`.
    CobbDouglasQ1,
    /// `p = q = 2`, outputs `(x1^0.4 x2^0.6 cos ω, x1^0.5 x2^0.5 sin ω)`.
    CobbDouglasQ2,
    /// `q = 1`, `g(x) = cᵀx`.
    LinearFrontier { slope: Vec<f64> },
    /// `q = 1`, arbitrary frontier on a `p`-dimensional input box.
    Custom { p: usize, frontier: FrontierFn },
}

impl fmt::Debug for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScenarioKind::CobbDouglasQ1 => write!(f, "CobbDouglasQ1"),
            ScenarioKind::CobbDouglasQ2 => write!(f, "CobbDouglasQ2"),
            ScenarioKind::LinearFrontier { slope } => write!(f, "LinearFrontier({slope:?})"),
            ScenarioKind::Custom { p, .. } => write!(f, "Custom(p = {p})"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ScenarioSpec {
    pub kind: ScenarioKind,
    pub n: usize,
    pub inefficiency_rate: f64,
    pub seed: u64,
    /// Inputs are uniform on `[lo, hi]^p`.
    pub bounds: (f64, f64),
}

impl ScenarioSpec {
    /// `g(x) = x1^0.4 x2^0.6` on `[0, 1]²`.
    pub fn cobb_douglas_q1(n: usize, rate: f64, seed: u64) -> Self {
        ScenarioSpec { kind: ScenarioKind::CobbDouglasQ1, n, inefficiency_rate: rate, seed, bounds: (0.0, 1.0) }
    }

    /// The two-output scenario on `[10, 20]²` with rate 3.
    pub fn cobb_douglas_q2(n: usize, seed: u64) -> Self {
        ScenarioSpec { kind: ScenarioKind::CobbDouglasQ2, n, inefficiency_rate: 3.0, seed, bounds: (10.0, 20.0) }
    }

    pub fn linear(slope: Vec<f64>, n: usize, rate: f64, seed: u64) -> Self {
        ScenarioSpec {
            kind: ScenarioKind::LinearFrontier { slope },
            n,
            inefficiency_rate: rate,
            seed,
            bounds: (0.0, 1.0),
        }
    }

    pub fn custom(p: usize, frontier: FrontierFn, bounds: (f64, f64), n: usize, rate: f64, seed: u64) -> Self {
        ScenarioSpec { kind: ScenarioKind::Custom { p, frontier }, n, inefficiency_rate: rate, seed, bounds }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        ScenarioSpec { seed, ..self.clone() }
    }

    pub fn with_n(&self, n: usize) -> Self {
        ScenarioSpec { n, ..self.clone() }
    }

    pub fn p(&self) -> usize {
        match &self.kind {
            ScenarioKind::CobbDouglasQ1 | ScenarioKind::CobbDouglasQ2 => 2,
            ScenarioKind::LinearFrontier { slope } => slope.len(),
            ScenarioKind::Custom { p, .. } => *p,
        }
    }

    pub fn q(&self) -> usize {
        match self.kind {
            ScenarioKind::CobbDouglasQ2 => 2,
            _ => 1,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidScenario("n must be at least 1".into()));
        }
        if !(self.inefficiency_rate > 0.0) || !self.inefficiency_rate.is_finite() {
            return Err(Error::InvalidScenario(format!(
                "inefficiency rate must be positive, got {}",
                self.inefficiency_rate
            )));
        }
        let (lo, hi) = self.bounds;
        if !(lo >= 0.0 && hi > lo && hi.is_finite()) {
            return Err(Error::InvalidScenario(format!("bad input bounds [{lo}, {hi}]")));
        }
        match &self.kind {
            ScenarioKind::LinearFrontier { slope } if slope.is_empty() || slope.iter().any(|c| !(*c > 0.0)) => {
                Err(Error::InvalidScenario("slope entries must be positive".into()))
            }
            ScenarioKind::Custom { p: 0, .. } => Err(Error::InvalidScenario("p must be at least 1".into())),
            _ => Ok(()),
        }
    }

    /// Single-output frontier `g(x)`; `None` for the two-output scenario.
    pub fn frontier(&self, x: &[f64]) -> Option<f64> {
        match &self.kind {
            ScenarioKind::CobbDouglasQ1 => Some(x[0].powf(0.4) * x[1].powf(0.6)),
            ScenarioKind::CobbDouglasQ2 => None,
            ScenarioKind::LinearFrontier { slope } => Some(slope.iter().zip(x).map(|(c, v)| c * v).sum()),
            ScenarioKind::Custom { frontier, .. } => Some(frontier(x)),
        }
    }

    fn in_support(&self, x: &[f64]) -> bool {
        let (lo, hi) = self.bounds;
        x.len() == self.p() && x.iter().all(|&v| v >= lo && v <= hi)
    }

    /// Ground-truth directional edge at `at`.
    pub fn true_lambda(&self, at: &EvalPoint) -> Result<f64> {
        if !self.in_support(&at.x0) || at.y0.len() != self.q() {
            return Err(Error::OutsideSupport);
        }
        match &self.kind {
            ScenarioKind::CobbDouglasQ2 => {
                let (x, y) = (&at.x0, &at.y0);
                let a = x[0].powf(0.4) * x[1].powf(0.6);
                let b = x[0].powf(0.5) * x[1].powf(0.5);
                let omega = (a * y[1]).atan2(b * y[0]);
                if omega < OMEGA_RANGE.0 || omega > OMEGA_RANGE.1 {
                    return Err(Error::OutsideSupport);
                }
                Ok(a * omega.cos() / y[0])
            }
            _ => Ok(self.frontier(&at.x0).ok_or(Error::OutsideSupport)? / at.y0[0]),
        }
    }

    /// Draw the sample.
    pub fn generate(&self) -> Result<ObservationSet> {
        self.validate()?;
        let mut rng = SeedStream::new(self.seed).child("sample", 0).rng();
        let (p, q) = (self.p(), self.q());
        let (lo, hi) = self.bounds;
        let mut inputs = Vec::with_capacity(self.n * p);
        let mut outputs = Vec::with_capacity(self.n * q);
        for _ in 0..self.n {
            let x: Vec<f64> = (0..p).map(|_| lo + (hi - lo) * rng.random::<f64>()).collect();
            let efficient = match &self.kind {
                ScenarioKind::CobbDouglasQ2 => {
                    let omega = rng.random_range(OMEGA_RANGE.0..OMEGA_RANGE.1);
                    let a = x[0].powf(0.4) * x[1].powf(0.6);
                    let b = x[0].powf(0.5) * x[1].powf(0.5);
                    vec![a * omega.cos(), b * omega.sin()]
                }
                _ => vec![self.frontier(&x).unwrap_or(0.0)],
            };
            let v: f64 = rng.sample(Exp1);
            let shrink = (-v / self.inefficiency_rate).exp();
            outputs.extend(efficient.iter().map(|e| e * shrink));
            inputs.extend(x);
        }
        ObservationSet::from_flat(p, q, inputs, outputs)
    }

    /// Exact `θ` at `x0` for the single-output Cobb–Douglas and linear
    /// scenarios on the unit box (uniform inputs, so the ray leaves the
    /// support at `u_max = 1/max_j x0_j`).
    pub fn true_theta(&self, x0: &[f64]) -> Result<f64> {
        if self.bounds != (0.0, 1.0) || !self.in_support(x0) {
            return Err(Error::OutsideSupport);
        }
        let g0 = match self.kind {
            ScenarioKind::CobbDouglasQ1 | ScenarioKind::LinearFrontier { .. } => self.frontier(x0).unwrap_or(0.0),
            _ => return Err(Error::NotApplicable("closed-form θ needs a single-output unit-box scenario")),
        };
        let p = self.p() as i32;
        let u_max = 1.0 / x0.iter().copied().fold(0.0, f64::max);
        let norm = x0.iter().map(|v| v * v).sum::<f64>().sqrt();
        Ok(norm * self.inefficiency_rate / g0 * u_max.powi(p) / p as f64)
    }

    /// `det(Λ)` with `Λ = −Qᵀg̈(x0)Q/2`, for the single-output Cobb–Douglas
    /// scenario (zero for a linear frontier).
    pub fn true_curvature_det(&self, x0: &[f64]) -> Result<f64> {
        let basis = orthonormal_complement(x0)?;
        let exps = match self.kind {
            ScenarioKind::CobbDouglasQ1 => [0.4, 0.6],
            ScenarioKind::LinearFrontier { .. } => return Ok(0.0),
            _ => return Err(Error::NotApplicable("closed-form curvature needs the Cobb-Douglas scenario")),
        };
        let g = self.frontier(x0).unwrap_or(0.0);
        let hess = nalgebra::DMatrix::from_fn(2, 2, |j, k| {
            let delta = if j == k { exps[j] } else { 0.0 };
            g * (exps[j] * exps[k] - delta) / (x0[j] * x0[k])
        });
        let q = basis.columns();
        Ok((-(q.transpose() * hess * q) / 2.0).determinant())
    }

    /// `κ = θ·det(Λ)^{−1/2}`.
    pub fn true_kappa(&self, x0: &[f64]) -> Result<f64> {
        Ok(self.true_theta(x0)? / self.true_curvature_det(x0)?.sqrt())
    }
}
