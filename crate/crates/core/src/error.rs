use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("trace is not 1 (got {0})")]
    InvalidTrace(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("non-finite entry in matrix")]
    NonFinite,

    #[error("invalid layout: {0}")]
    InvalidLayout(String),

    #[error("factor index {index} out of range for {count} factors")]
    FactorOutOfRange { index: usize, count: usize },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("invalid bipartition: {0}")]
    InvalidBipartition(String),

    #[error("parameter out of domain: {0}")]
    Domain(String),

    #[error("dimension {dim} exceeds cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("semidefinite solver failed: {0}")]
    Solver(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
