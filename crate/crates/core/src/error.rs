use std::path::PathBuf;

use thiserror::Error;

/// Errors raised while validating inputs or running experiments.
#[derive(Debug, Error)]
pub enum SimError {
    /// A configuration value violates its contract. `key` is the dotted
    /// config path of the offending field.
    #[error("invalid config value for `{key}`: {reason}")]
    InvalidConfig { key: String, reason: String },

    #[error("failed to parse config file {path}: {message}")]
    ConfigParse { path: PathBuf, message: String },

    #[error("threshold denominator is non-positive ({denominator}) for p = {probability}, round {round}")]
    DegenerateThreshold {
        probability: f64,
        round: u64,
        denominator: f64,
    },

    #[error("round reports out of order: expected round {expected}, got {found}")]
    ReportOrder { expected: u64, found: u64 },

    #[error("comparison configs differ in more than the protocol: {0}")]
    ComparisonMismatch(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error on {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl SimError {
    pub(crate) fn invalid(key: impl Into<String>, reason: impl Into<String>) -> Self {
        SimError::InvalidConfig {
            key: key.into(),
            reason: reason.into(),
        }
    }

    /// True for errors caused by bad configuration rather than the environment.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            SimError::InvalidConfig { .. }
                | SimError::ConfigParse { .. }
                | SimError::ComparisonMismatch(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, SimError>;
