use thiserror::Error;

/// Errors produced by the sparse kernels, factorization and solvers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix market: line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("invalid CSR structure: {0}")]
    InvalidStructure(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("row {0} has no diagonal entry")]
    MissingDiagonal(usize),

    #[error("zero pivot at row {0}")]
    ZeroPivot(usize),

    #[error("segmented-rows lower stage requires levels computed on lower(A+A^T)")]
    SrRequiresSymmetrizedLevels,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("breakdown in {method} at iteration {iteration}")]
    Breakdown {
        method: &'static str,
        iteration: usize,
    },

    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
