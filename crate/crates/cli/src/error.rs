use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{path}: {source}")]
    Input { path: String, source: glfr_stress::Error },
    #[error(transparent)]
    Estimation(#[from] glfr_stress::Error),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Io { .. } => "io",
            CliError::Input { .. } => "input",
            CliError::Estimation(glfr_stress::Error::InvalidConfig { .. }) => "config",
            CliError::Estimation(_) => "estimation",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }

    /// Machine-readable form written to stderr.
    pub fn to_json(&self) -> Value {
        let mut body = json!({ "kind": self.kind(), "message": self.to_string() });
        match self {
            CliError::Estimation(glfr_stress::Error::InvalidConfig { field, .. }) => {
                body["field"] = json!(field);
            }
            CliError::Io { path, .. } => body["path"] = json!(path),
            CliError::Input { path, source } => {
                body["path"] = json!(path);
                if let glfr_stress::Error::Parse { line, column, .. } = source {
                    body["line"] = json!(line);
                    body["column"] = json!(column);
                }
                if let glfr_stress::Error::NonPositive { line, .. } = source {
                    body["line"] = json!(line);
                }
            }
            _ => {}
        }
        json!({ "error": body })
    }
}
