use thiserror::Error;

use crate::invariants::{DivergenceEstimate, StepEstimate};

/// Everything that can go wrong in the toolkit.
///
/// Numerical non-convergence is a normal outcome for hard inputs; the
/// `*NotConverged` variants carry whatever partial result was computed.
#[derive(Debug, Error)]
pub enum Error {
    #[error("point too close to the boundary (norm {norm})")]
    BoundaryProximity { norm: f64 },

    #[error("point outside the domain: {0}")]
    OutsideDomain(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("iterate {step} left the domain (defining function {margin:e})")]
    DomainEscape { step: usize, margin: f64 },

    #[error("sequence does not approach the boundary point (tail distance {distance:e})")]
    NotConvergent { distance: f64 },

    #[error("{what} did not converge: {detail}")]
    NotConverged { what: &'static str, detail: String },

    #[error("divergence rate bracket too wide: [{:e}, {:e}]", .0.bracket.0, .0.bracket.1)]
    RateNotConverged(Box<DivergenceEstimate>),

    #[error("hyperbolic step tail not flat after {} terms", .0.values.len())]
    StepNotConverged(Box<StepEstimate>),

    #[error("inconclusive: {0}")]
    Inconclusive(String),

    #[error("monotonicity violated at index {index}: increase {increase:e}")]
    MonotonicityViolation { index: usize, increase: f64 },

    #[error("hypothesis {bound} failed at index {index} (value {value}, bound {limit})")]
    HypothesisFailed { bound: u8, index: usize, value: f64, limit: f64 },

    #[error("constraint {name} violated (margin {margin:e})")]
    ConstraintViolated { name: &'static str, margin: f64 },

    #[error("case (ii) of the parabolic dichotomy requires c = 0 (|c| = {norm:e})")]
    NonzeroCInCaseTwo { norm: f64 },

    #[error("consistency failure: {0}")]
    ConsistencyFailure(String),

    #[error("rejection sampling starved: accepted {accepted} of {requested}")]
    SamplingStarved { accepted: usize, requested: usize },

    #[error("map not declared univalent")]
    NotUnivalent,

    #[error("injectivity spot check failed: distinct points with equal images ({gap:e})")]
    InjectivityCollision { gap: f64 },

    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
