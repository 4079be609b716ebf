//! Command-line error type and its exit-code mapping:
//! 1 model-level failure, 2 input or configuration error, 3 corrupt data.

use cueball_core::Error as CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Core(#[from] CoreError),

    #[error("{0}")]
    Config(String),

    #[error("{0}")]
    Input(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Input(_) => 2,
            CliError::Core(e) => match e {
                CoreError::WeightFormat(_)
                | CoreError::WeightCorruption(_)
                | CoreError::KindMismatch { .. }
                | CoreError::IdxFormat(_)
                | CoreError::IdxLength { .. } => 3,
                CoreError::NonConvergence { .. } => 1,
                _ => 2,
            },
        }
    }
}
