use thiserror::Error;

/// Errors raised by the operator, rotation, exponential and evolution routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("operator is not Hermitian: |H[{row},{col}] - conj(H[{col},{row}])| = {deviation:e} exceeds {tolerance:e}")]
    HermiticityViolation {
        row: usize,
        col: usize,
        deviation: f64,
        tolerance: f64,
    },

    #[error("index ({row}, {col}) out of range for dimension {dim}")]
    IndexOutOfRange { row: usize, col: usize, dim: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid operator: {0}")]
    InvalidOperator(String),

    #[error("coupling ({i}, {j}) is zero, nothing to rotate")]
    ZeroCoupling { i: usize, j: usize },

    #[error("pairs overlap at index {index}")]
    OverlappingPairs { index: usize },

    #[error("accumulated unitary drifted: ||W W^H - I||_F = {defect:e}")]
    UnitaryDrift { defect: f64 },

    #[error("non-finite value in matrix{}", .item.map(|i| format!(" (batch item {i})")).unwrap_or_default())]
    NonFinite { item: Option<usize> },

    #[error("{intervals} Magnus intervals do not divide {steps} sample steps")]
    GridMismatch { intervals: usize, steps: usize },

    #[error("invalid control grid: {0}")]
    InvalidGrid(String),

    #[error("state norm drifted to {norm} at interval {interval}")]
    NormDrift { interval: usize, norm: f64 },

    #[error("cavity truncation n_max = {n_max} too small for polariton block {needed}")]
    TruncationTooSmall { n_max: usize, needed: usize },

    #[error("chain of length {length} exceeds the configured limit {limit}")]
    ChainTooLarge { length: usize, limit: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("allocation failed for size {size}")]
    OutOfMemory { size: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
