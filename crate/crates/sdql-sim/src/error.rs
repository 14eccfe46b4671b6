//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by scenario generation, the learner, metrics, and I/O.
#[derive(Debug, Error)]
pub enum SimError {
    /// A physical quantity was outside its domain (negative watts, zero distance, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// UE association failed to form a bijection onto the activated RRHs.
    #[error("association is not a bijection onto the activated RRHs after {retries} redraws")]
    AssociationConflict { retries: u32 },

    /// A configuration field failed validation.
    #[error("invalid config: {field}: {message}")]
    InvalidConfig { field: String, message: String },

    /// A metric or CDF was requested over an empty sample vector.
    #[error("empty sample vector")]
    EmptySamples,

    /// A loaded artifact (scenario, Q-table dump, trial report) is internally inconsistent.
    #[error("invalid artifact: {0}")]
    InvalidArtifact(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("toml: {0}")]
    Toml(#[from] toml::de::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl SimError {
    /// Shorthand for an invalid-config error with a field path.
    pub fn invalid_config(field: &str, message: impl Into<String>) -> Self {
        SimError::InvalidConfig {
            field: field.to_string(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, SimError>;
