//! Conical-hull DEA estimators of efficient boundaries, the simulated limit
//! law of the CRS estimator, curvature-based bias correction and
//! confidence intervals.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dea;
pub mod error;
pub mod geometry;
pub mod inference;
pub mod io;
pub mod kappa;
pub mod limit;
pub mod lp;
pub mod reproduce;
pub mod rng;
pub mod synthetic;
