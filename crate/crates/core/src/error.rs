use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A call violated an operation's preconditions (wrong representation,
    /// out-of-range argument, ...).
    #[error("usage error: {0}")]
    Usage(String),
    /// Input data failed a structural check (Hermitian symmetry, divergence).
    #[error("validation error: {0}")]
    Validation(String),
    /// The time integrator produced non-finite values.
    #[error("blow-up signal at t = {t}: {reason}")]
    BlowUp { t: f64, reason: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn usage(msg: impl Into<String>) -> Error {
    Error::Usage(msg.into())
}

pub(crate) fn validation(msg: impl Into<String>) -> Error {
    Error::Validation(msg.into())
}
