use std::path::PathBuf;

use thiserror::Error;

/// Failures while reading or validating a scenario configuration.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("cannot parse configuration: {0}")]
    Syntax(String),
    #[error("{key}: {message}")]
    Invalid { key: String, message: String },
    #[error("`{key}` is required for kind {kind}")]
    Missing { key: &'static str, kind: &'static str },
    #[error("`{key}` is not used by kind {kind}")]
    Unused { key: &'static str, kind: &'static str },
    #[error("dimension mismatch: `{left_key}` has dimension {left} but `{right_key}` has dimension {right}")]
    Dimension {
        left_key: String,
        left: usize,
        right_key: String,
        right: usize,
    },
}

impl ConfigError {
    pub fn invalid(key: impl Into<String>, message: impl ToString) -> Self {
        Self::Invalid {
            key: key.into(),
            message: message.to_string(),
        }
    }
}

#[derive(Debug, Error)]
pub enum OutputError {
    #[error("no result rows to emit")]
    Empty,
    #[error("row {index} has columns [{found}], expected [{expected}]")]
    Columns {
        index: usize,
        expected: String,
        found: String,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("serialization failed: {0}")]
    Serialize(String),
}

/// Anything that stops a run, grouped by the exit status it maps to.
#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Domain(#[from] potent_core::Error),
    #[error("{failed} of {total} rows exceed their residual tolerance")]
    Residual { failed: usize, total: usize },
    #[error(transparent)]
    Output(#[from] OutputError),
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// 1 validation, 2 oracle residual, 3 I/O.
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Config(_) | Self::Domain(_) => 1,
            Self::Output(OutputError::Empty | OutputError::Columns { .. }) => 1,
            Self::Residual { .. } => 2,
            Self::Output(_) | Self::Read { .. } => 3,
        }
    }
}
