use thiserror::Error;

/// Errors produced anywhere in the solver stack.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    /// A special-function evaluation could not certify its accuracy.
    #[error("accuracy error: {0}")]
    Accuracy(String),

    /// Two inputs that must share a shape do not.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// The time stepper produced a non-finite value or one above the bound.
    #[error("instability at time index {step}: {message}")]
    Instability { step: usize, message: String },

    /// The positivity guard removed more mass than allowed.
    #[error("positivity guard at time index {step}: clipped mass {clipped:.6e} exceeds limit {limit:.6e}")]
    Positivity { step: usize, clipped: f64, limit: f64 },

    /// A configuration document could not be parsed.
    #[error("config parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    /// A configuration value violates an invariant.
    #[error("invalid config `{field}`: {message}")]
    Validation { field: String, message: String },

    /// Filesystem or serialization failure while writing artifacts.
    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// Short machine-readable tag used in CLI error documents.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Accuracy(_) => "accuracy",
            Error::Dimension(_) => "dimension",
            Error::Instability { .. } => "instability",
            Error::Positivity { .. } => "positivity",
            Error::Parse { .. } => "parse",
            Error::Validation { .. } => "validation",
            Error::Io(_) => "io",
        }
    }

    pub(crate) fn validation(field: &str, message: impl Into<String>) -> Self {
        Error::Validation {
            field: field.to_string(),
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
