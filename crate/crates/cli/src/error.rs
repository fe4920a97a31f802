use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("solver failure: {0}")]
    Solver(#[from] shapeshift::Error),

    #[error("{0}")]
    Partial(String),

    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 1 validation, 2 config, 3 solver or I/O.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Config(_) => 2,
            CliError::Solver(_) | CliError::Partial(_) | CliError::Io(_) => 3,
        }
    }
}
