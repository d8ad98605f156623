use thiserror::Error;

/// Errors raised by model construction, assembly and the eigensolvers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("delta must exceed 1 (got {0})")]
    DeltaNotAboveOne(f64),

    #[error("empty window [{a}, {b}]")]
    EmptyWindow { a: i64, b: i64 },

    #[error("{0}")]
    InvalidParameter(String),

    #[error("site {site} outside window [{a}, {b}]")]
    SiteOutOfRange { site: i64, a: i64, b: i64 },

    #[error("magnetization 2M = {m2} not admissible (|2M| <= {max}, parity of {max})")]
    MagnetizationOutOfRange { m2: i64, max: i64 },

    #[error("space dimension {dim} exceeds cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("basis mismatch: {0}")]
    BasisMismatch(String),

    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("{0}")]
    Untestable(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
