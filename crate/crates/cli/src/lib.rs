//! Command-line front end for the `lostchance` engine.

pub mod casefile;
pub mod commands;
pub mod format;

use std::fmt;

/// Environment variable naming the default directory for sweep output.
pub const OUT_DIR_ENV: &str = "LOSTCHANCE_OUT_DIR";

/// Why a command did not succeed, and the exit code it maps to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    /// Bad input: unreadable or invalid case file, unknown id, unwritable path.
    Input(String),
    /// The computation finished but raised a flag the caller asked to treat
    /// as failure.
    Flagged(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Flagged(_) => 1,
            CliError::Input(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "error: {m}"),
            CliError::Flagged(m) => write!(f, "flagged: {m}"),
        }
    }
}

impl From<lostchance::Error> for CliError {
    fn from(e: lostchance::Error) -> Self {
        CliError::Input(e.to_string())
    }
}
