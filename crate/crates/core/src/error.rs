use thiserror::Error;

/// Failure modes shared by every computation in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A numerical procedure stopped before reaching its tolerance.
    #[error("accuracy error in {what}: estimate {estimate:e}, achieved error bound {bound:e}")]
    Accuracy {
        what: &'static str,
        estimate: f64,
        bound: f64,
    },

    /// A condition that should be unreachable for valid inputs.
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
