use thiserror::Error;

/// Errors raised by the analytic formulas, the numerical oracles and the
/// sweep machinery.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("closed form requires resonance (omega = {omega}, Omega = {big_omega})")]
    NotResonant { omega: f64, big_omega: f64 },

    #[error("coupling ratio g/g_c = {ratio} is at or beyond the threshold guard band")]
    BeyondThreshold { ratio: f64 },

    #[error("finite-difference estimates disagree: {coarse} vs {fine}")]
    StepTooSmall { coarse: f64, fine: f64 },

    #[error("Hilbert-space dimension {dim} exceeds the cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("cutoff convergence failed: {0}")]
    ConvergenceError(String),

    #[error("eigensolver failure: {0}")]
    SolverFailure(String),

    #[error("operator is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("drift matrix is singular")]
    SingularDrift,

    #[error("state is not a valid Gaussian state: {0}")]
    InvalidState(String),

    #[error("no root in bracket [{lo}, {hi}]")]
    NoRootInBracket { lo: f64, hi: f64 },

    #[error("grid too coarse for regression: {0}")]
    GridTooCoarse(String),

    #[error("invalid sweep spec: {0}")]
    InvalidSpec(String),

    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
