use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },

    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        source: std::io::Error,
    },

    #[error("invalid input: {0}")]
    Schema(String),

    #[error("invalid option: {0}")]
    Usage(String),

    #[error(transparent)]
    Library(#[from] scalekit::Error),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        use scalekit::Error as E;
        match self {
            CliError::Read { .. } | CliError::Write { .. } => "io",
            CliError::Schema(_) => "schema",
            CliError::Usage(_) => "usage",
            CliError::Library(E::Shape(_) | E::InvalidEntry(_)) => "schema",
            CliError::Library(E::SizeLimit(_) | E::DimensionTooLarge { .. }) => "size-limit",
            CliError::Library(E::PreconditionViolated(_) | E::NotGeneralPosition(_)) => {
                "precondition"
            }
            CliError::Library(_) => "computation",
        }
    }

    /// `{"status": "error", "error": {"kind", "message"}}`.
    pub fn to_json(&self) -> Value {
        error_object(self.kind(), &self.to_string())
    }
}

pub fn error_object(kind: &str, message: &str) -> Value {
    json!({
        "status": "error",
        "error": { "kind": kind, "message": message },
    })
}
