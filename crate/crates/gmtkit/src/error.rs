use std::path::PathBuf;

use serde_json::{json, Value};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {message}", path.display())]
    Parse { path: PathBuf, message: String },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] gmtkit_core::Error),
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn parse(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        CliError::Parse { path: path.into(), message: message.into() }
    }

    /// 2 when a numerical limit did not settle, 1 for everything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_non_convergence() => 2,
            _ => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Io { .. } => "io",
            CliError::Parse { .. } => "parse",
            CliError::Usage(_) => "usage",
            CliError::Core(e) if e.is_non_convergence() => "non-convergence",
            CliError::Core(_) => "validation",
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema": crate::report::SCHEMA,
            "error": {
                "kind": self.kind(),
                "message": self.to_string(),
                "exit_code": self.exit_code(),
            }
        })
    }
}
