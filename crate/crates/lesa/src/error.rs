use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(#[from] crate::config::ConfigError),
    #[error("usage: {0}")]
    Usage(String),
    #[error("{0}")]
    Numeric(#[from] lesa_core::Error),
    #[error("no point of the power sweep converged")]
    NoConvergence,
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// 1 for configuration, usage and file problems, 2 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numeric(_) | CliError::NoConvergence => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
