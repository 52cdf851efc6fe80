//! Error type shared by every module of the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is not Hermitian: max deviation {0:.3e}")]
    NotHermitian(f64),
    #[error("trace deviates from 1 by {0:.3e}")]
    InvalidTrace(f64),
    #[error("state is not positive semi-definite: eigenvalue {0:.3e}")]
    NotPsd(f64),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("singular rate function: {0}")]
    Singularity(String),
    #[error("generator is singular on the traceless subspace")]
    DegenerateGenerator,
    #[error("accuracy failure: {0}")]
    Accuracy(String),
    #[error("invalid protocol: {0}")]
    InvalidProtocol(String),
    #[error("cycle construction failed: {0}")]
    CycleConstruction(String),
    #[error("LAPACK routine {routine} failed with info={info}")]
    Lapack { routine: &'static str, info: i32 },
}

pub type Result<T> = std::result::Result<T, Error>;
