use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("negative off-diagonal entry ({i}, {j}) = {value}")]
    NegativeOffDiagonal { i: usize, j: usize, value: f64 },

    #[error("asymmetric entries at ({i}, {j}): |a_ij - a_ji| = {delta}")]
    Asymmetric { i: usize, j: usize, delta: f64 },

    #[error("non-finite entry at ({i}, {j})")]
    NonFinite { i: usize, j: usize },

    #[error("index ({i}, {j}) out of range for dimension {n}")]
    IndexOutOfRange { i: usize, j: usize, n: usize },

    #[error("duplicate entry ({i}, {j})")]
    DuplicateEntry { i: usize, j: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("epsilon must lie in (0, 1), got {0}")]
    InvalidEpsilon(f64),

    #[error("oversampling constant must be positive, got {0}")]
    InvalidConstant(f64),

    #[error("dimension {n} exceeds the dense limit {limit}")]
    DenseLimitExceeded { n: usize, limit: usize },

    #[error("iterative eigensolver converged on only {k_achieved} eigenpairs")]
    ConvergenceFailure { k_achieved: usize },

    #[error("not a correlation matrix: diagonal entry {index} is {value}")]
    NotCorrelation { index: usize, value: f64 },

    #[error("column {0} has zero variance")]
    ZeroVarianceColumn(usize),

    #[error("correlation matrix is not off-diagonal nonnegative ({} negative pairs)", .0.len())]
    NotOdn(Vec<(usize, usize, f64)>),

    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
