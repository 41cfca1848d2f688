//! Plug-in estimates of the limit-law constants `θ` and `κ`.
//!
//! `θ̂` counts observations in the estimated frontier neighbourhood
//! `{‖Z_2i‖ ≤ ε, ĝ*(Z_2i) − ε ≤ Y'_i ≤ ĝ*(Z_2i)}`; the curvature term comes
//! from an unweighted quadratic least-squares fit of `ĝ*` on the section
//! points with `‖Z_2i‖ ≤ δ`, plus the origin.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::dea::{multivariate_reduce, EvalPoint, ObservationSet};
use crate::error::{Error, Result};
use crate::geometry::ProjectedPoint;

/// Volume of the unit ball in `R^r`.
pub fn unit_ball_volume(r: usize) -> f64 {
    match r {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * std::f64::consts::PI / r as f64 * unit_ball_volume(r - 2),
    }
}

/// How the neighbourhood count is turned into `θ̂`.
///
/// The section neighbourhood `{‖z‖ ≤ ε, ĝ* − ε ≤ y' ≤ ĝ*}` has volume
/// `c_{p−1}ε^p`, and the projected points have density exactly `θ` at the
/// frontier, so `count/(n·c_{p−1}·ε^p)` estimates `θ` itself
/// ([`ThetaScaling::Section`]). The form with an extra factor `‖x0‖`
/// ([`ThetaScaling::AnchorNorm`]) estimates `‖x0‖·θ`; it is kept because the
/// reference squared-error ratios of the two-output study are reproduced with it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThetaScaling {
    #[default]
    Section,
    AnchorNorm,
}

impl ThetaScaling {
    fn factor(self, x0_norm: f64) -> f64 {
        match self {
            ThetaScaling::Section => 1.0,
            ThetaScaling::AnchorNorm => x0_norm,
        }
    }
}

fn check_bandwidth(h: f64) -> Result<()> {
    if h > 0.0 && h.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidBandwidth(h))
    }
}

/// `θ̂` and the number of neighbourhood members. Points where `g_star_at`
/// reports `OutsideHull` are not members; other errors propagate.
pub fn theta_hat<F>(
    projected: &[ProjectedPoint],
    x0_norm: f64,
    epsilon: f64,
    scaling: ThetaScaling,
    g_star_at: F,
) -> Result<(f64, usize)>
where
    F: Fn(&DVector<f64>) -> Result<f64>,
{
    check_bandwidth(epsilon)?;
    if projected.is_empty() {
        return Err(Error::EmptyInput);
    }
    let p = projected[0].z2.len() + 1;
    let mut count = 0;
    for pt in projected {
        if pt.z2.norm() > epsilon {
            continue;
        }
        let top = match g_star_at(&pt.z2) {
            Ok(v) => v,
            Err(Error::OutsideHull) => continue,
            Err(e) => return Err(e),
        };
        // the point itself is in the hull, so Y' ≤ ĝ* up to LP round-off
        if pt.yprime >= top - epsilon && pt.yprime <= top + 1e-9 * (1.0 + top.abs()) {
            count += 1;
        }
    }
    let n = projected.len() as f64;
    let theta = scaling.factor(x0_norm) / unit_ball_volume(p - 1) / n / epsilon.powi(p as i32) * count as f64;
    Ok((theta, count))
}

/// `ğ₀ + ğ₁ᵀz + zᵀğ₂z` with `ğ₂` symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticFit {
    pub intercept: f64,
    pub gradient: DVector<f64>,
    pub quad: DMatrix<f64>,
    /// Regression points used, including the origin.
    pub points_used: usize,
}

/// Number of coefficients in a full quadratic in `d` variables.
pub fn quadratic_terms(d: usize) -> usize {
    1 + d + d * (d + 1) / 2
}

fn design_row(z: &DVector<f64>) -> Vec<f64> {
    let d = z.len();
    let mut row = Vec::with_capacity(quadratic_terms(d));
    row.push(1.0);
    row.extend(z.iter());
    for j in 0..d {
        for k in j..d {
            row.push(z[j] * z[k]);
        }
    }
    row
}

/// Fit from explicit `(z, height)` pairs.
pub fn fit_quadratic(points: &[(DVector<f64>, f64)]) -> Result<QuadraticFit> {
    let d = points.first().map(|p| p.0.len()).ok_or(Error::EmptyInput)?;
    let m = quadratic_terms(d);
    let found = points.len();
    if found < m {
        return Err(Error::InsufficientLocalData { needed: m, found });
    }
    let a = DMatrix::from_row_iterator(found, m, points.iter().flat_map(|(z, _)| design_row(z)));
    let b = DVector::from_iterator(found, points.iter().map(|p| p.1));
    let svd = a.svd(true, true);
    let smax = svd.singular_values.max();
    let rank = svd.singular_values.iter().filter(|&&s| s > 1e-10 * smax.max(f64::MIN_POSITIVE)).count();
    if rank < m {
        return Err(Error::InsufficientLocalData { needed: m, found: rank });
    }
    let coef = svd
        .solve(&b, 1e-12 * smax)
        .map_err(|_| Error::InsufficientLocalData { needed: m, found: rank })?;
    let gradient = DVector::from_iterator(d, coef.iter().skip(1).take(d).copied());
    let mut quad = DMatrix::zeros(d, d);
    let mut idx = 1 + d;
    for j in 0..d {
        for k in j..d {
            if j == k {
                quad[(j, j)] = coef[idx];
            } else {
                quad[(j, k)] = coef[idx] / 2.0;
                quad[(k, j)] = coef[idx] / 2.0;
            }
            idx += 1;
        }
    }
    Ok(QuadraticFit { intercept: coef[0], gradient, quad, points_used: found })
}

/// Quadratic regression of `ĝ*` on `{Z_2i : ‖Z_2i‖ ≤ δ} ∪ {0}`.
pub fn local_quadratic_fit<F>(projected: &[ProjectedPoint], delta: f64, g_star_at: F) -> Result<QuadraticFit>
where
    F: Fn(&DVector<f64>) -> Result<f64>,
{
    check_bandwidth(delta)?;
    let d = projected.first().map(|p| p.z2.len()).ok_or(Error::EmptyInput)?;
    let origin = DVector::zeros(d);
    let mut pts = vec![(origin.clone(), g_star_at(&origin)?)];
    for pt in projected.iter().filter(|p| p.z2.norm() <= delta) {
        match g_star_at(&pt.z2) {
            Ok(h) => pts.push((pt.z2.clone(), h)),
            Err(Error::OutsideHull) => {}
            Err(e) => return Err(e),
        }
    }
    fit_quadratic(&pts)
}

/// `det(−ğ₂)`; `1` for an empty (0×0) matrix.
pub fn curvature_det(quad: &DMatrix<f64>) -> f64 {
    (-quad).determinant()
}

/// `κ̂ = θ̂·det(−ğ₂)^{−1/2}`; requires `−ğ₂` positive definite.
pub fn kappa_hat(theta: f64, quad: &DMatrix<f64>) -> Result<f64> {
    let det = curvature_det(quad);
    if quad.nrows() > 0 && ((-quad).cholesky().is_none() || !(det > 0.0)) {
        return Err(Error::NotLocallyStrictlyConcave { det });
    }
    Ok(theta / det.sqrt())
}

/// Outcome of the κ estimation stage.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KappaEstimate {
    pub theta_hat: f64,
    pub n_eps: usize,
    /// Fitted `ğ₂`, row by row; absent when the fit failed.
    pub quad_matrix: Option<Vec<Vec<f64>>>,
    pub det_term: Option<f64>,
    pub kappa_hat: Option<f64>,
    pub epsilon: f64,
    pub delta: f64,
    pub theta_scaling: ThetaScaling,
}

pub fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

/// `θ̂_T` for a multi-output sample, computed on the rotated single-output
/// problem (orthonormal `Γ`, so no determinant factor).
pub fn theta_t(sample: &ObservationSet, at: &EvalPoint, epsilon: f64, scaling: ThetaScaling) -> Result<(f64, usize)> {
    let reduced = multivariate_reduce(sample, at)?;
    let section = reduced.section()?;
    theta_hat(section.points(), section.anchor_norm(), epsilon, scaling, |z| section.height_at(z))
}
