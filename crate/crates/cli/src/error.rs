use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] hpsym_core::Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 2 for usage and invalid parameters, 3 for numerical guards, 1 for I/O.
    pub fn exit_code(&self) -> i32 {
        use hpsym_core::Error as E;
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(E::NumericalGuard(_)) => 3,
            CliError::Core(E::Io(_)) | CliError::Io(_) => 1,
            CliError::Core(_) => 2,
        }
    }
}
