use thiserror::Error;

/// Errors raised by constructors and operations across the lab.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or inconsistent input: bad dimensions, unknown names,
    /// out-of-range values, invalid geometry.
    #[error("invalid input: {0}")]
    Input(String),

    /// Conditioning on an event of probability zero. Distinct from
    /// [`Error::Input`]: the table is well-formed, the event is just null.
    #[error("conditioning on zero-probability event: {0}")]
    ZeroProbability(String),

    /// A factorization precondition failed; `check` names the failing check.
    #[error("{check} check failed: {detail}")]
    Refused {
        check: &'static str,
        detail: String,
    },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// A file or document did not match its declared format.
    #[error("malformed file: {0}")]
    Format(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
