use std::process::ExitCode;

use thiserror::Error;
use vps_core::VpsError;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, config keys, fixture names or parameters.
    #[error("usage: {0}")]
    Usage(String),

    /// A solver or transform failed on valid input.
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            Self::Usage(_) => ExitCode::from(2),
            Self::Numerical(_) => ExitCode::from(3),
            Self::Io(_) => ExitCode::from(1),
        }
    }

    /// Domain errors raised while resolving inputs are the caller's fault.
    pub fn from_setup(e: VpsError) -> Self {
        match e {
            VpsError::Domain(msg) | VpsError::InvalidDensity(msg) => Self::Usage(msg),
            other => Self::Numerical(other.to_string()),
        }
    }

    pub fn numerical(e: VpsError) -> Self {
        match e {
            VpsError::NonInvertible(msg) => Self::Numerical(format!(
                "input cannot be inverted: {msg}. The Abel transform of the input (of g' for Eddington \
                 inversion, which also needs g(0) = 0) must tend to 0 at the origin; 1/sqrt(x) violates this"
            )),
            other => Self::Numerical(other.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
