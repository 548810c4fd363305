use std::path::{Path, PathBuf};

use serde_json::json;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Schema violation or a value rejected by the owning type.
    #[error("config error at `{key_path}`: {message}")]
    Config { key_path: String, message: String },

    #[error("numerical failure: {0}")]
    Numerical(#[from] superatom::Error),

    #[error("I/O failure on {}: {message}", path.display())]
    Io { path: PathBuf, message: String },
}

impl CliError {
    pub fn config(key_path: impl Into<String>, message: impl ToString) -> Self {
        Self::Config { key_path: key_path.into(), message: message.to_string() }
    }

    pub fn io(path: &Path, err: impl ToString) -> Self {
        Self::Io { path: path.to_path_buf(), message: err.to_string() }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config { .. } => 2,
            Self::Numerical(_) => 3,
            Self::Io { .. } => 4,
        }
    }

    pub fn class(&self) -> &'static str {
        match self {
            Self::Config { .. } => "config",
            Self::Numerical(_) => "numerical",
            Self::Io { .. } => "io",
        }
    }

    /// One-line JSON record for stderr.
    pub fn to_json(&self) -> serde_json::Value {
        let mut v = json!({
            "error": self.class(),
            "exit_code": self.exit_code(),
            "message": self.to_string(),
        });
        match self {
            Self::Config { key_path, .. } => v["key_path"] = json!(key_path),
            Self::Numerical(e) => v["kind"] = json!(numerical_kind(e)),
            Self::Io { path, .. } => v["path"] = json!(path.display().to_string()),
        }
        v
    }
}

fn numerical_kind(e: &superatom::Error) -> &'static str {
    use superatom::Error::*;
    match e {
        InvalidInput(_) => "invalid_input",
        Stiffness { .. } => "stiffness",
        Resolution(_) => "resolution",
        Geometry(_) => "geometry",
        Undefined(_) => "undefined",
    }
}

pub type CliResult<T> = Result<T, CliError>;
