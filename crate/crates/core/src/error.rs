use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max |m - m^dagger| = {0:e})")]
    NotHermitian(f64),
    #[error("matrix is not symmetric (max |m - m^T| = {0:e})")]
    NotSymmetric(f64),
    #[error("matrix is not positive semidefinite (smallest eigenvalue {0:e})")]
    NotPsd(f64),
    #[error("matrix is numerically singular")]
    SingularInput,
    #[error("{0} did not converge")]
    ConvergenceFailure(&'static str),
    #[error("normalization {0:e} below the degeneracy threshold")]
    DegenerateNormalization(f64),
    #[error("argument outside the function domain: {0}")]
    DomainError(String),
    #[error("eigenvalues must be sorted in descending order")]
    OrderViolation,
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("invalid argument `{field}`: {reason}")]
    InvalidArgument { field: &'static str, reason: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
