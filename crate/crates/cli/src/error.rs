use thiserror::Error;

/// Failure of a CLI invocation, carrying its exit status.
#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable or invalid configuration (exit 2).
    #[error("config error: {0}")]
    Config(String),
    /// A scenario precondition does not hold (exit 1).
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Precondition(_) | CliError::Io(_) => 1,
        }
    }
}

impl From<qrel_core::Error> for CliError {
    fn from(e: qrel_core::Error) -> Self {
        use qrel_core::Error as E;
        match e {
            E::InvalidParameter { .. } | E::UnknownFrame(_) | E::DuplicateFrame(_) | E::NonFinite(_) => {
                CliError::Config(e.to_string())
            }
            other => CliError::Precondition(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
