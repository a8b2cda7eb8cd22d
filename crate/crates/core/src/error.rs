use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// An argument refers to something outside the setting, or has the wrong shape.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    /// A reduction step was requested where it does not apply.
    #[error("{step} is not applicable: {reason}")]
    Reduction { step: &'static str, reason: String },

    /// An enumeration hit its configured cap. Never a silent truncation.
    #[error("resource limit exceeded while {what} (cap {cap})")]
    Resource { what: &'static str, cap: u64 },

    #[error("invalid decomposition: {0}")]
    Validation(String),

    #[error("parse error at {line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("generation failed: {0}")]
    Generation(String),

    /// Two routes that must agree did not.
    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn reduction(step: &'static str, reason: impl Into<String>) -> Self {
        Error::Reduction {
            step,
            reason: reason.into(),
        }
    }
}
