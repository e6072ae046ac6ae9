use std::process::ExitCode;

use rookstat_core::Error;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid {field}: {reason}")]
    Config { field: &'static str, reason: String },

    #[error(transparent)]
    Core(#[from] Error),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("{0} invariant(s) failed")]
    VerifyFailed(usize),
}

impl CliError {
    pub fn config(field: &'static str, reason: impl Into<String>) -> Self {
        CliError::Config {
            field,
            reason: reason.into(),
        }
    }

    /// 2 for bad configuration, 1 for everything that failed while running.
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Config { .. } | CliError::Core(Error::Domain { .. } | Error::Parse { .. }) => ExitCode::from(2),
            CliError::Core(_) | CliError::Io(_) | CliError::VerifyFailed(_) => ExitCode::from(1),
        }
    }
}
