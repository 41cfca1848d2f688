//! Oracles shared by the integration tests.
#![allow(dead_code)]

use frontier_cone::dea::{EvalPoint, ObservationSet};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// CRS score by enumerating basic solutions of
/// `Σγ_i x_i + s = x0, Σγ_i y_i − λy0 − t = 0`: every vertex uses at most
/// `p + q` observations, so the optimum is the best of these finitely many
/// square systems.
pub fn caratheodory_crs(sample: &ObservationSet, at: &EvalPoint) -> f64 {
    let (n, p, q) = (sample.n(), sample.p(), sample.q());
    let m = p + q;
    let mut cols: Vec<DVector<f64>> = Vec::new();
    for i in 0..n {
        cols.push(DVector::from_iterator(m, sample.input(i).iter().chain(sample.output(i)).copied()));
    }
    let lambda_col = n;
    cols.push(DVector::from_iterator(m, std::iter::repeat_n(0.0, p).chain(at.y0.iter().map(|v| -v))));
    for k in 0..m {
        let mut e = DVector::zeros(m);
        e[k] = if k < p { 1.0 } else { -1.0 };
        cols.push(e);
    }
    let rhs = DVector::from_iterator(m, at.x0.iter().copied().chain(std::iter::repeat_n(0.0, q)));
    let mut best = f64::NEG_INFINITY;
    for basis in subsets(cols.len(), m) {
        let b = DMatrix::from_columns(&basis.iter().map(|&j| cols[j].clone()).collect::<Vec<_>>());
        let Some(sol) = b.lu().solve(&rhs) else { continue };
        if sol.iter().any(|v| !v.is_finite() || *v < -1e-10) {
            continue;
        }
        let lambda = basis.iter().position(|&j| j == lambda_col).map_or(0.0, |k| sol[k]);
        best = best.max(lambda);
    }
    best
}

pub fn random_sample(rng: &mut ChaCha8Rng, n: usize, p: usize, q: usize) -> ObservationSet {
    let draw = |rng: &mut ChaCha8Rng, k: usize| (0..k).map(|_| rng.random_range(0.5..5.0)).collect::<Vec<f64>>();
    let inputs = (0..n).map(|_| draw(rng, p)).collect();
    let outputs = (0..n).map(|_| draw(rng, q)).collect();
    ObservationSet::from_rows(inputs, outputs).unwrap()
}

/// Joint density of the generative model: inputs uniform on the unit box,
/// `Y = g(X)·exp(−V/r)` with `V ~ Exp(1)`.
pub fn density(g: &dyn Fn(&[f64]) -> f64, rate: f64, x: &[f64], y: f64) -> f64 {
    if x.iter().any(|&v| !(0.0..=1.0).contains(&v)) {
        return 0.0;
    }
    let gx = g(x);
    if !(y > 0.0 && y <= gx * (1.0 + 1e-12)) {
        return 0.0;
    }
    let s = (y / gx).min(1.0);
    rate * s.powf(rate - 1.0) / gx
}

/// `‖x0‖·∫ u^p f(u·x0, u·g(x0)) du` by composite Simpson up to the support
/// cutoff.
pub fn theta_quadrature(g: &dyn Fn(&[f64]) -> f64, rate: f64, x0: &[f64]) -> f64 {
    let p = x0.len() as i32;
    let norm = x0.iter().map(|v| v * v).sum::<f64>().sqrt();
    let upper = 1.0 / x0.iter().copied().fold(0.0, f64::max);
    let g0 = g(x0);
    let f = |u: f64| {
        let x: Vec<f64> = x0.iter().map(|v| u * v).collect();
        u.powi(p) * density(g, rate, &x, u * g0)
    };
    let m = 20_000;
    let h = upper / m as f64;
    let mut s = f(1e-300) + f(upper);
    for k in 1..m {
        s += f(k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    norm * s * h / 3.0
}

pub fn cobb_douglas(x: &[f64]) -> f64 {
    x[0].powf(0.4) * x[1].powf(0.6)
}

