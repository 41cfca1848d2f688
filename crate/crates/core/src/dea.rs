//! Conical-hull (CRS) and convex-hull (VRS) directional-edge estimators.
//!
//! Three hull flavours appear here:
//!
//! * [`crs_score`]: the usual DEA-CRS program with free disposal,
//!   `max λ s.t. Σγ_iX_i ≤ x0, Σγ_iY_i ≥ λ·y0, γ ≥ 0`.
//! * [`vrs_score`]: the same with `Σγ_i = 1`.
//! * [`ray_hull_score`]: the plain convex hull of the rays `{γ(X_i, Y_i)}`,
//!   i.e. both constraint blocks as equalities. This is the estimator whose
//!   hyperplane section is the convex hull of the projected points, so it is
//!   the one used by the section machinery ([`g_hat`], [`g_star_hat`],
//!   [`ReducedProblem`]). It never exceeds `crs_score`, and the two agree
//!   whenever the free-disposal optimum leaves no slack.

use nalgebra::DVector;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{orthonormal_complement, transform_outputs, Basis, ProjectedPoint, Section};
use crate::lp::{solve, LinearProgram, LpStatus};

/// `n` observations of `p` inputs and `q` outputs, all nonnegative.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationSet {
    p: usize,
    q: usize,
    inputs: Vec<f64>,
    outputs: Vec<f64>,
}

impl ObservationSet {
    pub fn from_rows(inputs: Vec<Vec<f64>>, outputs: Vec<Vec<f64>>) -> Result<Self> {
        if inputs.is_empty() {
            return Err(Error::InvalidSample("no observations".into()));
        }
        if inputs.len() != outputs.len() {
            return Err(Error::InvalidSample(format!(
                "{} input rows but {} output rows",
                inputs.len(),
                outputs.len()
            )));
        }
        let p = inputs[0].len();
        let q = outputs[0].len();
        if inputs.iter().any(|r| r.len() != p) || outputs.iter().any(|r| r.len() != q) {
            return Err(Error::InvalidSample("ragged rows".into()));
        }
        Self::from_flat(p, q, inputs.concat(), outputs.concat())
    }

    /// Row-major `n×p` inputs and `n×q` outputs.
    pub fn from_flat(p: usize, q: usize, inputs: Vec<f64>, outputs: Vec<f64>) -> Result<Self> {
        if p == 0 || q == 0 {
            return Err(Error::InvalidSample("need at least one input and one output".into()));
        }
        if inputs.is_empty() || !inputs.len().is_multiple_of(p) || outputs.len() != inputs.len() / p * q {
            return Err(Error::InvalidSample("inconsistent matrix sizes".into()));
        }
        if let Some(v) = inputs.iter().chain(&outputs).find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidSample(format!("entries must be finite and nonnegative, found {v}")));
        }
        let set = ObservationSet { p, q, inputs, outputs };
        if let Some(i) = (0..set.n()).find(|&i| set.input(i).iter().all(|&v| v == 0.0)) {
            return Err(Error::InvalidSample(format!("observation {i} has an all-zero input vector")));
        }
        Ok(set)
    }

    pub fn n(&self) -> usize {
        self.inputs.len() / self.p
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn input(&self, i: usize) -> &[f64] {
        &self.inputs[i * self.p..(i + 1) * self.p]
    }

    pub fn output(&self, i: usize) -> &[f64] {
        &self.outputs[i * self.q..(i + 1) * self.q]
    }

    /// The observations listed in `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let inputs = indices.iter().flat_map(|&i| self.input(i).to_vec()).collect();
        let outputs = indices.iter().flat_map(|&i| self.output(i).to_vec()).collect();
        Self::from_flat(self.p, self.q, inputs, outputs)
    }

    /// This sample followed by `other`.
    pub fn concat(&self, other: &ObservationSet) -> Result<Self> {
        if other.p != self.p || other.q != self.q {
            return Err(Error::InvalidSample("dimension mismatch".into()));
        }
        let inputs = [self.inputs.as_slice(), &other.inputs].concat();
        let outputs = [self.outputs.as_slice(), &other.outputs].concat();
        Self::from_flat(self.p, self.q, inputs, outputs)
    }

    /// Observation `i` as an evaluation point (fails on zero entries).
    pub fn point(&self, i: usize) -> Result<EvalPoint> {
        EvalPoint::new(self.input(i).to_vec(), self.output(i).to_vec())
    }
}

/// The query point `(x0, y0)`; every entry strictly positive.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalPoint {
    pub x0: Vec<f64>,
    pub y0: Vec<f64>,
}

impl EvalPoint {
    pub fn new(x0: Vec<f64>, y0: Vec<f64>) -> Result<Self> {
        if x0.is_empty() || y0.is_empty() {
            return Err(Error::InvalidEvalPoint("empty vector".into()));
        }
        if let Some(v) = x0.iter().chain(&y0).find(|v| !(**v > 0.0) || !v.is_finite()) {
            return Err(Error::InvalidEvalPoint(format!("entries must be positive and finite, found {v}")));
        }
        Ok(EvalPoint { x0, y0 })
    }

    pub fn y0_norm(&self) -> f64 {
        self.y0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn scaled(&self, alpha: f64, beta: f64) -> Result<Self> {
        EvalPoint::new(
            self.x0.iter().map(|v| v * alpha).collect(),
            self.y0.iter().map(|v| v * beta).collect(),
        )
    }

    fn check_dims(&self, sample: &ObservationSet) -> Result<()> {
        if self.x0.len() != sample.p() || self.y0.len() != sample.q() {
            return Err(Error::InvalidSample(format!(
                "sample has (p, q) = ({}, {}), evaluation point has ({}, {})",
                sample.p(),
                sample.q(),
                self.x0.len(),
                self.y0.len()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Score {
    pub lambda_hat: f64,
    pub feasible: bool,
}

impl Score {
    fn from_lp(value: f64, status: LpStatus) -> Score {
        match status {
            LpStatus::Optimal => Score { lambda_hat: value, feasible: true },
            _ => Score { lambda_hat: f64::NAN, feasible: false },
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Hull {
    FreeDisposal,
    Convex,
    Rays,
}

/// Columns `γ_1..γ_n, λ`; maximise `λ`.
fn score_program(sample: &ObservationSet, at: &EvalPoint, hull: Hull) -> LinearProgram {
    let n = sample.n();
    let mut objective = vec![0.0; n + 1];
    objective[n] = 1.0;
    let mut lp = LinearProgram::maximize(objective);
    for k in 0..sample.p() {
        let mut row: Vec<f64> = (0..n).map(|i| sample.input(i)[k]).collect();
        row.push(0.0);
        lp = match hull {
            Hull::Rays => lp.eq(row, at.x0[k]),
            _ => lp.le(row, at.x0[k]),
        };
    }
    for j in 0..sample.q() {
        // λ·y0_j − Σγ_i Y_ij  (≤ 0, or = 0 for the ray hull)
        let mut row: Vec<f64> = (0..n).map(|i| -sample.output(i)[j]).collect();
        row.push(at.y0[j]);
        lp = match hull {
            Hull::Rays => lp.eq(row, 0.0),
            _ => lp.le(row, 0.0),
        };
    }
    if hull == Hull::Convex {
        let mut row = vec![1.0; n];
        row.push(0.0);
        lp = lp.eq(row, 1.0);
    }
    lp
}

fn score(sample: &ObservationSet, at: &EvalPoint, hull: Hull) -> Result<Score> {
    at.check_dims(sample)?;
    let sol = solve(&score_program(sample, at, hull))?;
    Ok(Score::from_lp(sol.value, sol.status))
}

/// Output-oriented DEA-CRS score at `at`. Always feasible (`γ = 0, λ = 0`).
pub fn crs_score(sample: &ObservationSet, at: &EvalPoint) -> Result<Score> {
    score(sample, at, Hull::FreeDisposal)
}

/// Output-oriented DEA-VRS score. Infeasible when no convex combination of
/// the observed inputs fits under `x0`.
pub fn vrs_score(sample: &ObservationSet, at: &EvalPoint) -> Result<Score> {
    score(sample, at, Hull::Convex)
}

/// `sup{λ : (x0, λ·y0) ∈ conv(rays)}`; infeasible when `x0` or `y0` lies
/// outside the cone generated by the observed inputs/outputs.
pub fn ray_hull_score(sample: &ObservationSet, at: &EvalPoint) -> Result<Score> {
    score(sample, at, Hull::Rays)
}

/// `ĝ(x0) = sup{y : (x0, y) ∈ conv(rays)}` for a single-output sample.
pub fn g_hat(sample: &ObservationSet, x0: &[f64]) -> Result<f64> {
    if sample.q() != 1 {
        return Err(Error::NotApplicable("boundary function needs a single output"));
    }
    let at = EvalPoint::new(x0.to_vec(), vec![1.0])?;
    let s = ray_hull_score(sample, &at)?;
    if s.feasible {
        Ok(s.lambda_hat)
    } else {
        Err(Error::OutsideHull)
    }
}

/// Roof of the convex hull of projected points above `z2`:
/// `max Σξ_iY'_i s.t. Σξ_iZ_2i = z2, Σξ_i = 1, ξ ≥ 0`.
pub fn g_star_hat(projected: &[ProjectedPoint], z2: &DVector<f64>) -> Result<f64> {
    if projected.is_empty() {
        return Err(Error::EmptyInput);
    }
    if projected.iter().any(|p| p.z2.len() != z2.len()) {
        return Err(Error::InvalidEvalPoint(format!("section point needs {} coordinates", projected[0].z2.len())));
    }
    let n = projected.len();
    let mut lp = LinearProgram::maximize(projected.iter().map(|p| p.yprime).collect());
    for k in 0..z2.len() {
        lp = lp.eq(projected.iter().map(|p| p.z2[k]).collect(), z2[k]);
    }
    lp = lp.eq(vec![1.0; n], 1.0);
    let sol = solve(&lp)?;
    match sol.status {
        LpStatus::Optimal => Ok(sol.value),
        _ => Err(Error::OutsideHull),
    }
}

/// The single-output problem obtained by rotating the output space about `y0`:
/// inputs `(X_i, U_i)` (the `U_i` are signed), output `Ω_i`, query input
/// `(x0, 0)`. Its boundary at the query equals `‖y0‖·λ(x0, y0)`.
#[derive(Debug, Clone)]
pub struct ReducedProblem {
    p: usize,
    q: usize,
    inputs: Vec<f64>,
    outputs: Vec<f64>,
    x0: Vec<f64>,
    y0_norm: f64,
    output_basis: Basis,
}

impl ReducedProblem {
    pub fn n(&self) -> usize {
        self.outputs.len()
    }

    /// `p + q − 1`.
    pub fn dim(&self) -> usize {
        self.p + self.q - 1
    }

    pub fn input(&self, i: usize) -> &[f64] {
        let d = self.dim();
        &self.inputs[i * d..(i + 1) * d]
    }

    pub fn output(&self, i: usize) -> f64 {
        self.outputs[i]
    }

    /// `(x0, 0_{q−1})`.
    pub fn query_input(&self) -> Vec<f64> {
        let mut v = self.x0.clone();
        v.resize(self.dim(), 0.0);
        v
    }

    pub fn y0_norm(&self) -> f64 {
        self.y0_norm
    }

    pub fn output_basis(&self) -> &Basis {
        &self.output_basis
    }

    /// Section through `(x0, 0)` with basis `[[Q, 0], [0, I]]`.
    pub fn section(&self) -> Result<Section> {
        let basis = orthonormal_complement(&self.x0)?.with_free_coordinates(self.q - 1);
        Section::from_rays(basis, (0..self.n()).map(|i| (self.input(i), self.output(i))))
    }

    /// `ĝ_T(x0, 0)`: the ray-hull boundary of the reduced problem at `(x0, 0)`
    /// (equality constraints on every input coordinate, including the signed
    /// `U` block).
    pub fn boundary_estimate(&self) -> Result<Score> {
        let n = self.n();
        let mut lp = LinearProgram::maximize(self.outputs.clone());
        for (k, target) in self.query_input().into_iter().enumerate() {
            lp = lp.eq((0..n).map(|i| self.input(i)[k]).collect(), target);
        }
        let sol = solve(&lp)?;
        Ok(Score::from_lp(sol.value, sol.status))
    }
}

/// Rotate a multi-output sample into the `(p+q−1)`-input, single-output form.
pub fn multivariate_reduce(sample: &ObservationSet, at: &EvalPoint) -> Result<ReducedProblem> {
    at.check_dims(sample)?;
    let (gamma, rotated) = transform_outputs(sample, &at.y0)?;
    let (p, q) = (sample.p(), sample.q());
    let mut inputs = Vec::with_capacity(sample.n() * (p + q - 1));
    for (i, t) in rotated.iter().enumerate() {
        inputs.extend_from_slice(sample.input(i));
        inputs.extend(t.u.iter());
    }
    Ok(ReducedProblem {
        p,
        q,
        inputs,
        outputs: rotated.iter().map(|t| t.omega).collect(),
        x0: at.x0.clone(),
        y0_norm: at.y0_norm(),
        output_basis: gamma,
    })
}

/// The section used for inference at `at`: the direct projection for a
/// single output, the rotated problem's section otherwise.
pub fn section_at(sample: &ObservationSet, at: &EvalPoint) -> Result<Section> {
    at.check_dims(sample)?;
    if sample.q() == 1 {
        crate::geometry::project_to_section(sample, &at.x0)
    } else {
        multivariate_reduce(sample, at)?.section()
    }
}

/// CRS and VRS scores of every observation at its own point (zero entries in
/// an observation's own vectors are nudged to `f64::MIN_POSITIVE`).
pub fn scores_at_observations(sample: &ObservationSet) -> Result<Vec<(Score, Score)>> {
    (0..sample.n())
        .map(|i| {
            let bump = |v: &[f64]| v.iter().map(|x| x.max(f64::MIN_POSITIVE)).collect::<Vec<_>>();
            let at = EvalPoint::new(bump(sample.input(i)), bump(sample.output(i)))?;
            Ok((crs_score(sample, &at)?, vrs_score(sample, &at)?))
        })
        .collect()
}
