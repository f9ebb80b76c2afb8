use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NcgError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("interior subspace with margin {margin} is empty at this cutoff")]
    EmptyInterior { margin: usize },
    #[error("operator is not Hermitian (deviation {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("missing prerequisite: {0}")]
    MissingPrerequisite(String),
    #[error("structural error: {0}")]
    Structural(String),
}

pub type Result<T> = std::result::Result<T, NcgError>;
