use thiserror::Error;

/// Failures of a command, split by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags or parameter values; exit code 1.
    #[error("{0}")]
    Usage(String),
    /// Unreadable or invalid input data; exit code 2.
    #[error("{0}")]
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub(crate) fn usage<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Usage(msg.into()))
}

pub(crate) fn data<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Data(msg.into()))
}
