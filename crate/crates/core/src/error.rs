use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid weight: {0}")]
    InvalidWeight(String),

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("not a basis: {0}")]
    NotABasis(String),

    #[error("biorthogonality violated at (n={n}, k={k}): x_n*(x_k) = {value}, deviation {deviation:.3e}")]
    Biorthogonality { n: usize, k: usize, value: f64, deviation: f64 },

    #[error("duals required: vector matrix is {rows}x{cols} and cannot be inverted")]
    DualsRequired { rows: usize, cols: usize },

    #[error("schema violation: {0}")]
    Schema(String),

    #[error("value not exactly representable: {0}")]
    Inexact(&'static str),

    #[error("exact enumeration needs {count} evaluations (limit {limit}); use random mode")]
    Combinatorial { count: u128, limit: u128 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
