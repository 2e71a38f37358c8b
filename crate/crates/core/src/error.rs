use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix has a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not Hermitian (max |A - A^dagger| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("operator is not positive (min eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("operator exceeds identity (max eigenvalue {max_eigenvalue})")]
    ExceedsIdentity { max_eigenvalue: f64 },

    #[error("{what} does not sum to identity (deviation {deviation:e})")]
    NotComplete { what: &'static str, deviation: f64 },

    #[error("{what} is not normalized (deviation {deviation:e})")]
    NotNormalized { what: &'static str, deviation: f64 },

    #[error("invalid probability distribution: {0}")]
    InvalidDistribution(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("parameter out of range: {0}")]
    ParamOutOfRange(String),

    #[error("observable is degenerate but a nondegenerate one is required")]
    DegenerateObservable,

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("objective returned a non-finite value ({value})")]
    ObjectiveNaN { value: f64 },

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
