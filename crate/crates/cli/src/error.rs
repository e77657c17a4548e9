use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    /// Invalid parameter combinations rejected by the library.
    #[error(transparent)]
    Model(#[from] seqdisc::Error),

    #[error("{0}")]
    Io(#[from] std::io::Error),

    #[error("serialization: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Model(_) => 2,
            CliError::Io(_) | CliError::Json(_) => 1,
        }
    }
}
