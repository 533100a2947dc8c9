use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("matrix polynomial is singular (det P(λ) vanishes identically)")]
    NotRegular,

    #[error("point is not an eigenvalue: smallest singular value {sigma_min:e} exceeds {threshold:e}")]
    NotAnEigenvalue { sigma_min: f64, threshold: f64 },

    #[error("eigenvalue is not simple")]
    NotSimple,

    #[error("the absolute condition number is undefined for an infinite eigenvalue")]
    UndefinedForInfinite,

    #[error("the relative condition number is undefined for zero or infinite eigenvalues")]
    UndefinedForZeroOrInfinite,

    #[error("quantity undefined at this point: {0}")]
    UndefinedForPoint(&'static str),

    #[error("operation requires a pencil (grade 1), got grade {0}")]
    PencilOnly(usize),

    #[error("ambiguous eigenvalue match: nearest {nearest:e}, runner-up {runner_up:e}")]
    AmbiguousMatch { nearest: f64, runner_up: f64 },

    #[error("non-finite result: {0}")]
    NonFinite(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),
}

pub type Result<T> = std::result::Result<T, Error>;
