use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("shape mismatch: expected {expected} samples, found {found}")]
    Shape { expected: usize, found: usize },

    #[error("non-positive {field} = {value} at node {node}")]
    Positivity {
        field: &'static str,
        node: usize,
        value: f64,
    },

    #[error("blow-up at t = {t}, node {node}: {reason}")]
    BlowUp { t: f64, node: usize, reason: String },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("insufficient data: need at least {needed}, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("config line {line}: {msg}")]
    ConfigSyntax { line: usize, msg: String },

    #[error("config line {line}: unknown key `{key}` in section [{section}]")]
    UnknownKey {
        line: usize,
        section: String,
        key: String,
    },

    #[error("config value out of range for `{key}`: {msg}")]
    Range { key: String, msg: String },

    #[error("{path}: line {line}: {msg}")]
    Format {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for the failures a run reports as a blow-up (exit code 3).
    pub fn is_blow_up(&self) -> bool {
        matches!(self, Error::BlowUp { .. } | Error::Positivity { .. })
    }

    /// True for configuration and usage errors (exit code 2).
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::ConfigSyntax { .. }
                | Error::UnknownKey { .. }
                | Error::Range { .. }
                | Error::Domain(_)
        )
    }
}
