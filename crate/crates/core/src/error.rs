use thiserror::Error;

/// Failures reported by the codec and analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A caller-supplied value violates a precondition.
    #[error("invalid argument: {0}")]
    Argument(String),
    /// The request exceeds an enumeration guard or other capability limit.
    #[error("capability exceeded: {0}")]
    Capability(String),
    /// A numeric routine failed to converge or bracket a root.
    #[error("numeric failure: {0}")]
    Numeric(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn arg<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Argument(msg.into()))
}
