use std::path::PathBuf;

use thiserror::Error;

/// Every failure the simulator can report.
///
/// [`Error::class_name`] gives a stable identifier that the CLI prints on
/// failure so scripts can branch on the error class.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("degenerate drop: {0}")]
    DegenerateDrop(String),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("power control did not converge: {0}")]
    Convergence(String),

    #[error("insufficient samples: need at least {required}, got {got}")]
    InsufficientSamples { required: usize, got: usize },

    #[error("empty sample set")]
    EmptySamples,

    #[error("campaign aborted: {0}")]
    Campaign(String),

    #[error("I/O error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn class_name(&self) -> &'static str {
        match self {
            Error::Config(_) => "ConfigError",
            Error::Domain(_) => "DomainError",
            Error::Numeric(_) => "NumericError",
            Error::Dimension(_) => "DimensionError",
            Error::DegenerateDrop(_) => "DegenerateDropError",
            Error::Unsupported(_) => "UnsupportedConfigurationError",
            Error::Convergence(_) => "ConvergenceError",
            Error::InsufficientSamples { .. } => "InsufficientSamplesError",
            Error::EmptySamples => "EmptySamplesError",
            Error::Campaign(_) => "CampaignError",
            Error::Io { .. } => "IoError",
            Error::Json(_) => "ConfigError",
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
