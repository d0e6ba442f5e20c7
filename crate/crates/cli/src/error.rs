use std::process::ExitCode;

use etpa_core::{ConfigError, ModelError};

#[derive(Debug)]
pub enum CliError {
    /// Unreadable or invalid input.
    Input(String),
    /// A model computation failed.
    Compute(String),
    /// Results could not be written.
    Output(String),
    /// Results were written but fall outside the requested tolerance.
    Tolerance(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Input(_) | CliError::Output(_) => 1,
            CliError::Compute(_) => 2,
            CliError::Tolerance(_) => 3,
        })
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Compute(m) | CliError::Output(m) | CliError::Tolerance(m) => m,
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::Config(c) => c.into(),
            other => CliError::Compute(other.to_string()),
        }
    }
}
