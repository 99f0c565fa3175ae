use std::fmt;

use spinforge::compiler::CompileError;
use spinforge::encodings::EncodingError;
use spinforge::parity::ParityError;
use spinforge::problems::ProblemError;
use spinforge::solve::SolveError;

pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_VERIFICATION: u8 = 2;
pub const EXIT_INPUT: u8 = 3;
pub const EXIT_SIZE: u8 = 4;

/// Error carrying its process exit code.
#[derive(Debug)]
pub enum Failure {
    Input(String),
    Size(String),
    Verification(String),
    Output(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => EXIT_INPUT,
            Failure::Size(_) => EXIT_SIZE,
            Failure::Verification(_) => EXIT_VERIFICATION,
            Failure::Output(_) => EXIT_FAILURE,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Input(m) | Failure::Size(m) | Failure::Verification(m) | Failure::Output(m) => {
                f.write_str(m)
            }
        }
    }
}

impl From<CompileError> for Failure {
    fn from(e: CompileError) -> Self {
        match e {
            CompileError::Encoding(EncodingError::RegisterTooLarge(_)) => Failure::Size(e.to_string()),
            other => Failure::Input(other.to_string()),
        }
    }
}

impl From<ProblemError> for Failure {
    fn from(e: ProblemError) -> Self {
        match e {
            ProblemError::TooLarge { .. } => Failure::Size(e.to_string()),
            other => Failure::Input(other.to_string()),
        }
    }
}

impl From<SolveError> for Failure {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::TooManySpins { .. } => Failure::Size(format!("{e}; raise SPINFORGE_MAX_SPINS to search anyway")),
            other => Failure::Input(other.to_string()),
        }
    }
}

impl From<ParityError> for Failure {
    fn from(e: ParityError) -> Self {
        match e {
            ParityError::TooLarge { .. } => Failure::Size(e.to_string()),
            other => Failure::Input(other.to_string()),
        }
    }
}
