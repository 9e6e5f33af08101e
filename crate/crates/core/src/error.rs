use thiserror::Error;

/// Errors raised by the workbench.
///
/// `Refused` is distinct from the other variants: the inputs were valid but a
/// certificate (ratio bound, enclosure width, size budget) could not be
/// obtained, so the operation declined instead of guessing.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),

    #[error("refused: {reason}{}", hint.as_ref().map(|h| format!(" (hint: {h})")).unwrap_or_default())]
    Refused { reason: String, hint: Option<String> },

    #[error("table lookup out of range: index {index}, table length {len}")]
    TableOutOfRange { index: u64, len: usize },

    #[error("operand too large: {0}")]
    TooLarge(String),

    #[error("invalid config at `{path}`: {message}")]
    Config { path: String, message: String },
}

impl Error {
    pub(crate) fn refused(reason: impl Into<String>) -> Self {
        Error::Refused { reason: reason.into(), hint: None }
    }

    pub(crate) fn refused_with_hint(reason: impl Into<String>, hint: impl Into<String>) -> Self {
        Error::Refused { reason: reason.into(), hint: Some(hint.into()) }
    }

    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config { path: path.into(), message: message.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
