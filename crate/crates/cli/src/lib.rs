//! Scenario-driven experiment runner around the core simulator. The binary
//! is a thin shell over this library so the runner can be exercised from
//! integration tests without spawning processes.

pub mod outputs;
pub mod runner;
pub mod scenario;

use std::fmt;

/// Runner-level error, split by exit code: configuration problems exit
/// with 2, numeric or I/O failures during a run exit with 3.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Runtime(m) => write!(f, "runtime error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<isacsim_core::Error> for CliError {
    fn from(e: isacsim_core::Error) -> Self {
        match e {
            isacsim_core::Error::Config(m) => CliError::Config(m),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
