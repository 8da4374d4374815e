use thiserror::Error;

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed invocation: bad flags or argument values.
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Scheme(#[from] ipfefr_core::Error),
    /// Keystore state does not satisfy the command's preconditions.
    #[error("{detail}")]
    Store { name: &'static str, detail: String },
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn store(name: &'static str, detail: impl Into<String>) -> Self {
        CliError::Store { name, detail: detail.into() }
    }

    /// Machine-readable name printed on standard error.
    pub fn name(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Scheme(e) => e.name(),
            CliError::Store { name, .. } => name,
            CliError::Io(_) => "io-error",
            CliError::Json(_) => "manifest-corrupt",
        }
    }

    /// 1 for usage errors, 2 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            _ => 2,
        }
    }
}
