use thiserror::Error;

/// Errors raised by chain construction and the numerical routines built on it.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("kernel is not row-stochastic: {0}")]
    NotStochastic(String),
    #[error("chain is reducible: {0} closed classes")]
    Reducible(usize),
    #[error("stationary distribution is not strictly positive (min {0:e})")]
    NonPositiveStationary(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("negative time {0}")]
    NegativeTime(f64),
    #[error("discrete-time chain evaluated at non-integer time {0}")]
    NonIntegerDiscreteTime(f64),
    #[error("product state space of {states} exceeds dense limit {limit}")]
    StateExplosion { states: usize, limit: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("{0} is not a TV-type divergence")]
    NotTVType(String),
    #[error("{0} is not an f-divergence")]
    NotFDivergence(String),
    #[error("convexity check failed near x = {0}")]
    NonConvexDetected(f64),
    #[error("sandwich ratio unbounded: {0}")]
    RatioUnbounded(String),
    #[error("eigensolver failed: {0}")]
    EigenSolveFailure(String),
    #[error("spectrum is degenerate: |beta_1| = 1")]
    DegenerateSpectrum,
    #[error("operator is not self-adjoint in L2(pi): asymmetry {0:e}")]
    NotSelfAdjoint(f64),
    #[error("b = {0} must be < 1")]
    BNotLessThanOne(f64),
    #[error("optimizer diverged: {0}")]
    OptimizerDiverged(String),
    #[error("chain has {states} states; optimizer cap is {cap}")]
    StateCapExceeded { states: usize, cap: usize },
    #[error("curve stayed above {epsilon:e} up to horizon {horizon} (last value {last:e})")]
    HorizonExceeded { epsilon: f64, horizon: f64, last: f64 },
    #[error("cutoff diagnosis needs at least 4 indices, got {0}")]
    InsufficientIndices(usize),
    #[error("c = {0} outside (0, 1)")]
    COutOfRange(f64),
    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
