use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable or invalid input: exit code 2.
    #[error("config error: {0}")]
    Config(String),
    /// A computation could not certify its answer: exit code 1.
    #[error("check failed: {0}")]
    Check(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Check(_) => 1,
        }
    }
}

pub fn config<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Config(e.to_string())
}

impl From<zink_core::BtError> for CliError {
    fn from(e: zink_core::BtError) -> Self {
        match e {
            zink_core::BtError::NoStabilization { .. } => CliError::Check(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}
