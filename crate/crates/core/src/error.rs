use thiserror::Error;

/// Errors raised by the model, the solvers and the CLI front end.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid {field}: {reason}")]
    Validation { field: String, reason: String },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("no finite crossover: {0}")]
    NoCrossover(String),

    #[error("thermal iteration did not converge after {iterations} iterations (current {current} A)")]
    Divergence { iterations: usize, current: f64 },

    #[error("cable library has no entry for {area} mm2")]
    MissingCable { area: f64 },

    #[error("{path}: line {line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

/// Machine-readable error class, also used to pick the process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Validation,
    Infeasible,
    Io,
}

impl ErrorCategory {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorCategory::Validation => 2,
            ErrorCategory::Infeasible => 3,
            ErrorCategory::Io => 4,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ErrorCategory::Validation => "validation",
            ErrorCategory::Infeasible => "infeasible",
            ErrorCategory::Io => "io",
        }
    }
}

impl Error {
    pub(crate) fn validation(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::Validation { .. } | Error::Parse { .. } | Error::MissingCable { .. } => {
                ErrorCategory::Validation
            }
            Error::Infeasible(_) | Error::NoCrossover(_) | Error::Divergence { .. } => {
                ErrorCategory::Infeasible
            }
            Error::Io { .. } => ErrorCategory::Io,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
