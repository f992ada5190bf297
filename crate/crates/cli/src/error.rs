use hybridlink_core::HybridError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Parse(String),
    #[error("{field}: {message}")]
    Validation { field: String, message: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Numeric(#[from] HybridError),
    #[error("{0}")]
    Check(String),
}

impl CliError {
    pub fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self::Validation {
            field: field.into(),
            message: message.into(),
        }
    }

    /// Stable machine-readable category, printed as `error[<category>]`.
    pub fn category(&self) -> &'static str {
        match self {
            Self::Usage(_) => "usage",
            Self::Parse(_) => "parse",
            Self::Validation { .. } => "validation",
            Self::Io { .. } => "io",
            Self::Numeric(_) => "numeric",
            Self::Check(_) => "check",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => 2,
            Self::Parse(_) => 3,
            Self::Validation { .. } => 4,
            Self::Io { .. } => 5,
            Self::Numeric(_) => 6,
            Self::Check(_) => 7,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
