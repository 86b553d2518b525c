use thiserror::Error;

/// Errors raised by the bound, state and oracle routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A closed-form expression hit a (near) zero denominator.
    #[error("singular denominator in {formula}: {denominator:e}")]
    Singular {
        formula: &'static str,
        denominator: f64,
    },

    /// A matrix that must be Hermitian is not, beyond tolerance.
    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),

    /// Kraus operators violate completeness beyond tolerance.
    #[error("Kraus family is not complete (deviation {0:e})")]
    Incomplete(f64),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
