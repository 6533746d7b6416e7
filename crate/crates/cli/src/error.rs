use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Core(#[from] decohere::Error),
    #[error("{0}")]
    Schema(String),
    #[error("check failed: {0}")]
    CheckFailed(String),
}

impl CliError {
    /// 1 for usage, config and I/O problems, 2 for budget overruns, 3 for
    /// failed checks.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(decohere::Error::Budget { .. }) => 2,
            CliError::CheckFailed(_) => 3,
            _ => 1,
        }
    }

    pub fn io(path: &std::path::Path, err: impl std::fmt::Display) -> Self {
        CliError::Io(format!("{}: {err}", path.display()))
    }
}
