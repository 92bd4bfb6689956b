use thiserror::Error;

/// Errors raised by the numerical routines.
///
/// Every variant carries enough context to produce a one-line diagnostic
/// naming the operation that failed.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum OpucError {
    #[error("zero mass: {0}")]
    ZeroMass(String),
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("moment order {order} exceeds the resolution of a grid of {grid} points")]
    ResolutionExceeded { order: usize, grid: usize },
    #[error("measure is trivial at degree {degree}: squared norm {norm_sq:e} below threshold")]
    TrivialMeasure { degree: usize, norm_sq: f64 },
    #[error("numerical breakdown at step {step}: |alpha| = {modulus}")]
    NumericalBreakdown { step: usize, modulus: f64 },
    #[error("polynomial of degree {degree} does not fit in degree {n}")]
    DegreeMismatch { degree: usize, n: usize },
    #[error("rotation parameter is not unimodular: |lambda| = {0}")]
    NotUnimodular(f64),
    #[error("point {re} + {im}i is not strictly inside the unit disk")]
    BoundaryPoint { re: f64, im: f64 },
    #[error("degenerate Caratheodory value: |F + 1| = {0:e}")]
    DegenerateF(f64),
    #[error("invalid Verblunsky coefficient at index {index}: |alpha| = {modulus}")]
    InvalidAlpha { index: usize, modulus: f64 },
    #[error("radial extrapolation unstable: successive estimates differ by {0:e}")]
    ExtrapolationUnstable(f64),
    #[error("invalid radial ladder: {0}")]
    InvalidLadder(String),
    #[error("Szego condition fails: log integral diverges")]
    SzegoConditionFails,
    #[error("log integral diverges: weight vanishes on the grid")]
    LogDivergence,
    #[error("weight vanishes at theta = {0}")]
    ZeroWeight(f64),
    #[error("ill-conditioned least squares: {0}")]
    IllConditioned(String),
    #[error("zero denominator at index {index}")]
    ZeroDenominator { index: usize },
    #[error("degenerate denominator in Green's function: |1 - z f+ f-| = {0:e}")]
    DegenerateDenominator(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, OpucError>;
