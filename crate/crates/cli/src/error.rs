use std::process::ExitCode;

use rejscore::hwsim::SimError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Unsupported(String),
    #[error("{0}")]
    Capacity(String),
    #[error("{0}")]
    Mismatch(String),
    #[error("{context}: {source}")]
    Io { context: String, source: std::io::Error },
    #[error("{0}")]
    Sim(SimError),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Usage(_) => 2,
            CliError::Unsupported(_) => 3,
            CliError::Capacity(_) => 4,
            CliError::Mismatch(_) => 5,
            CliError::Io { .. } | CliError::Sim(_) => 1,
        })
    }

    pub fn io(context: impl Into<String>) -> impl FnOnce(std::io::Error) -> CliError {
        let context = context.into();
        move |source| CliError::Io { context, source }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Capacity { .. } => CliError::Capacity(e.to_string()),
            SimError::UnsupportedLevel(_) => CliError::Unsupported(e.to_string()),
            SimError::Decode(_) | SimError::Program { .. } | SimError::Timing(_) | SimError::Placement { .. } => {
                CliError::Usage(e.to_string())
            }
            other => CliError::Sim(other),
        }
    }
}
