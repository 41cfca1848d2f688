//! Orthonormal complements, hyperplane sections and the output-space rotation.
//!
//! A conical hull through the origin is fully described by its section with
//! the hyperplane `{x : x0ᵀ(x − x0) = 0}`: every ray meets it once, at
//! `P_i = (‖x0‖² / x0ᵀX_i)·(X_i, Y_i)`. In coordinates `x = x0 + Q·z2` the
//! section points are `(z2_i, y'_i)` and the cone's roof above `x0` is the
//! convex-hull roof above `z2 = 0`.

use nalgebra::{DMatrix, DVector};

use crate::dea::{g_star_hat, ObservationSet};
use crate::error::{Error, Result};

/// Tolerance used by the orthogonality and reconstruction checks.
pub const GEOMETRY_TOL: f64 = 1e-9;

/// An anchor direction together with an orthonormal basis of its orthogonal
/// complement (`d × (d−1)`).
#[derive(Debug, Clone, PartialEq)]
pub struct Basis {
    anchor: DVector<f64>,
    columns: DMatrix<f64>,
}

impl Basis {
    pub fn anchor(&self) -> &DVector<f64> {
        &self.anchor
    }

    pub fn columns(&self) -> &DMatrix<f64> {
        &self.columns
    }

    /// Ambient dimension `d`.
    pub fn dim(&self) -> usize {
        self.anchor.len()
    }

    /// `Qᵀv`.
    pub fn coordinates(&self, v: &DVector<f64>) -> DVector<f64> {
        self.columns.tr_mul(v)
    }

    /// Block basis for the anchor `(a, 0_k)`: `[[Q, 0], [0, I_k]]`.
    ///
    /// The appended coordinates are free (signed) directions already
    /// orthogonal to the anchor.
    pub fn with_free_coordinates(&self, k: usize) -> Basis {
        let d = self.dim();
        let mut anchor = DVector::zeros(d + k);
        anchor.rows_mut(0, d).copy_from(&self.anchor);
        let mut columns = DMatrix::zeros(d + k, d - 1 + k);
        columns.view_mut((0, 0), (d, d - 1)).copy_from(&self.columns);
        for i in 0..k {
            columns[(d + i, d - 1 + i)] = 1.0;
        }
        Basis { anchor, columns }
    }

    /// Largest deviation of `QᵀQ` from the identity and of `anchorᵀQ` from 0
    /// (the latter relative to `‖anchor‖`).
    pub fn orthonormality_defect(&self) -> f64 {
        let k = self.columns.ncols();
        let gram = self.columns.tr_mul(&self.columns) - DMatrix::identity(k, k);
        let cross = self.columns.tr_mul(&self.anchor) / self.anchor.norm();
        gram.amax().max(cross.amax())
    }
}

/// Deterministic orthonormal basis for `anchor⊥`, built from the Householder
/// reflection that maps `e1` onto `anchor/‖anchor‖`.
///
/// Each column is signed so that its first nonzero entry is positive.
pub fn orthonormal_complement(anchor: &[f64]) -> Result<Basis> {
    if anchor.is_empty() {
        return Err(Error::InvalidAnchor("empty vector".into()));
    }
    if let Some(v) = anchor.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
        return Err(Error::InvalidAnchor(format!("entries must be positive and finite, found {v}")));
    }
    let a = DVector::from_column_slice(anchor);
    let d = a.len();
    let unit = &a / a.norm();
    // v = unit − e1; H = I − 2vvᵀ/(vᵀv) has H·e1 = unit, so H's columns 2..d span unit⊥.
    let mut v = unit.clone();
    v[0] -= 1.0;
    let vv = v.norm_squared();
    let mut columns = DMatrix::zeros(d, d - 1);
    for j in 1..d {
        let mut col = DVector::zeros(d);
        col[j] = 1.0;
        if vv > 1e-30 {
            let s = 2.0 * v[j] / vv;
            col -= &v * s;
        }
        if let Some(first) = col.iter().find(|x| x.abs() > 1e-12) {
            if *first < 0.0 {
                col.neg_mut();
            }
        }
        columns.set_column(j - 1, &col);
    }
    Ok(Basis { anchor: a, columns })
}

/// A ray's intersection with the section hyperplane, in hyperplane coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectedPoint {
    pub z2: DVector<f64>,
    pub yprime: f64,
}

/// The section of a conical hull through its anchor point.
#[derive(Debug, Clone)]
pub struct Section {
    basis: Basis,
    points: Vec<ProjectedPoint>,
}

impl Section {
    /// Project rays `(x_i, y_i)` (inputs may carry signed free coordinates)
    /// onto the hyperplane through `basis.anchor()`.
    pub fn from_rays<'a, I>(basis: Basis, rays: I) -> Result<Section>
    where
        I: IntoIterator<Item = (&'a [f64], f64)>,
    {
        let a = basis.anchor().clone();
        let a2 = a.norm_squared();
        let points = rays
            .into_iter()
            .enumerate()
            .map(|(i, (x, y))| {
                let x = DVector::from_column_slice(x);
                let inner = a.dot(&x);
                if !(inner > 0.0) {
                    return Err(Error::DegenerateRay(i));
                }
                let factor = a2 / inner;
                Ok(ProjectedPoint { z2: basis.coordinates(&x) * factor, yprime: y * factor })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Section { basis, points })
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn points(&self) -> &[ProjectedPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Effective input dimension (`p`, or `p+q−1` after the output rotation).
    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    /// Number of coordinates of a point on the section (`dim() − 1`).
    pub fn coordinate_dim(&self) -> usize {
        self.basis.columns().ncols()
    }

    pub fn anchor_norm(&self) -> f64 {
        self.basis.anchor().norm()
    }

    /// Roof of the section hull above `z2` (`ĝ*(z2)`).
    pub fn height_at(&self, z2: &DVector<f64>) -> Result<f64> {
        g_star_hat(&self.points, z2)
    }

    /// The projected point `P_i` back in the ambient coordinates:
    /// `(x0 + Q·z2, y')`.
    pub fn reconstruct(&self, i: usize) -> (DVector<f64>, f64) {
        let p = &self.points[i];
        (self.basis.anchor() + self.basis.columns() * &p.z2, p.yprime)
    }
}

/// Section of a single-output sample's conical hull through `x0`.
pub fn project_to_section(sample: &ObservationSet, x0: &[f64]) -> Result<Section> {
    if sample.q() != 1 {
        return Err(Error::NotApplicable("hyperplane projection needs a single output"));
    }
    if x0.len() != sample.p() {
        return Err(Error::InvalidEvalPoint(format!(
            "x0 has {} entries, sample has {} inputs",
            x0.len(),
            sample.p()
        )));
    }
    let basis = orthonormal_complement(x0)?;
    Section::from_rays(basis, (0..sample.n()).map(|i| (sample.input(i), sample.output(i)[0])))
}

/// `(u, ω) = (Γᵀy, y0ᵀy/‖y0‖)` for one observation.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformedOutputs {
    pub u: DVector<f64>,
    pub omega: f64,
}

/// Rotate every output vector into `(Γᵀy, y0ᵀy/‖y0‖)` with an orthonormal `Γ`.
pub fn transform_outputs(
    sample: &ObservationSet,
    y0: &[f64],
) -> Result<(Basis, Vec<TransformedOutputs>)> {
    if sample.q() < 2 {
        return Err(Error::NotApplicable("output rotation needs q >= 2"));
    }
    if y0.len() != sample.q() {
        return Err(Error::InvalidEvalPoint(format!(
            "y0 has {} entries, sample has {} outputs",
            y0.len(),
            sample.q()
        )));
    }
    let gamma = orthonormal_complement(y0)?;
    let dir = gamma.anchor() / gamma.anchor().norm();
    let out = (0..sample.n())
        .map(|i| {
            let y = DVector::from_column_slice(sample.output(i));
            TransformedOutputs { u: gamma.coordinates(&y), omega: dir.dot(&y) }
        })
        .collect();
    Ok((gamma, out))
}
