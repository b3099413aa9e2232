use std::fmt;

use squeezed_readout::ReadoutError;

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_STABILITY: i32 = 3;
pub const EXIT_SOLVER: i32 = 4;
pub const EXIT_ORACLE: i32 = 5;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io(String),
    Readout(ReadoutError),
    /// Oracle and analytic moments disagree beyond the acceptance threshold.
    OracleMismatch(String),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => EXIT_CONFIG,
            CliError::OracleMismatch(_) => EXIT_ORACLE,
            CliError::Readout(e) => match e {
                ReadoutError::InvalidParameter { .. } | ReadoutError::ZeroSignal => EXIT_CONFIG,
                ReadoutError::Unstable(_) | ReadoutError::SteadyStateUndefined(_) | ReadoutError::Resonance => {
                    EXIT_STABILITY
                }
                ReadoutError::NoBracket { .. }
                | ReadoutError::InvalidBracket { .. }
                | ReadoutError::DegenerateNoise(_)
                | ReadoutError::IndefiniteCovariance(_)
                | ReadoutError::SingularCovariance => EXIT_SOLVER,
                ReadoutError::NonConvergence { .. } => EXIT_ORACLE,
            },
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Readout(e) => write!(f, "{e}"),
            CliError::OracleMismatch(m) => write!(f, "oracle check failed: {m}"),
        }
    }
}

impl From<ReadoutError> for CliError {
    fn from(e: ReadoutError) -> Self {
        CliError::Readout(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;
