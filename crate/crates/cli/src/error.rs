use thiserror::Error;
use yamabe_core::Error as CoreError;

#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed spec, schema violation or parameter outside its domain.
    #[error("input error: {0}")]
    Input(String),

    /// A numerical stage failed after the input was accepted.
    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numeric(_) | CliError::Io(_) => 1,
        }
    }

    /// Errors raised while building the problem are all caused by its
    /// parameters.
    pub fn setup(e: CoreError) -> Self {
        CliError::Input(e.to_string())
    }

    pub fn run(e: CoreError) -> Self {
        if e.is_input() {
            CliError::Input(e.to_string())
        } else {
            CliError::Numeric(e.to_string())
        }
    }
}
