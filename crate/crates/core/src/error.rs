use thiserror::Error;

use crate::lp::LpError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid anchor vector: {0}")]
    InvalidAnchor(String),
    #[error("observation {0} has a non-positive inner product with x0")]
    DegenerateRay(usize),
    #[error("not applicable: {0}")]
    NotApplicable(&'static str),
    #[error("invalid sample: {0}")]
    InvalidSample(String),
    #[error("invalid evaluation point: {0}")]
    InvalidEvalPoint(String),
    #[error("query point lies outside the convex hull of the section points")]
    OutsideHull,
    #[error("bandwidth must be positive, got {0}")]
    InvalidBandwidth(f64),
    #[error("local quadratic fit needs {needed} well-spread points, found {found}")]
    InsufficientLocalData { needed: usize, found: usize },
    #[error("fitted curvature is not negative definite (det(-g2) = {det})")]
    NotLocallyStrictlyConcave { det: f64 },
    #[error("origin not covered by the simulated hull after {retries} redraws")]
    DegenerateRegion { retries: usize },
    #[error("invalid region: {0}")]
    InvalidRegion(String),
    #[error("need at least 2 replicates, got {0}")]
    InsufficientReplicates(usize),
    #[error("empty input")]
    EmptyInput,
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("point lies outside the scenario support")]
    OutsideSupport,
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error(transparent)]
    Lp(#[from] LpError),
}

impl Error {
    /// Numerical degeneracies (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::OutsideHull
                | Error::DegenerateRegion { .. }
                | Error::InsufficientLocalData { .. }
                | Error::NotLocallyStrictlyConcave { .. }
                | Error::DegenerateRay(_)
                | Error::Lp(LpError::IterationLimit(_))
        )
    }
}
