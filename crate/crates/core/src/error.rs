use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("field length {got} does not match grid node count {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("non-finite value at node {index}")]
    NonFinite { index: usize },

    #[error("operation not supported on this grid: {0}")]
    Unsupported(&'static str),

    #[error("expected {expected} axis components, got {got}")]
    AxisMismatch { expected: usize, got: usize },

    #[error("singular system: {0}")]
    Singular(String),

    #[error("Newton iteration for LGL node {index} did not converge")]
    LglNewton { index: usize },

    #[error("invalid bounds: need b > a, got a = {a}, b = {b}")]
    InvalidBounds { a: f64, b: f64 },

    #[error("target mass {target} is outside the feasible range [{lo}, {hi}]")]
    InfeasibleMass { target: f64, lo: f64, hi: f64 },

    #[error("root finding failed: {0}")]
    RootFinding(String),

    #[error("iterative solver stalled after {iterations} iterations (relative residual {residual:e})")]
    KrylovNoConvergence { iterations: usize, residual: f64 },

    #[error("logarithm argument left (0, inf) at node {index} (u = {value})")]
    LogDomain { index: usize, value: f64 },

    #[error("initial data violates the bounds by {excess:e}")]
    InitialOutOfBounds { excess: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("solution diverged at t = {t}: {reason}")]
    Diverged { t: f64, reason: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
