use std::fmt;
use std::path::Path;

use resnet_core::Error;

/// Exit code for bad input, configuration or usage.
pub const INPUT: u8 = 2;
/// Exit code for failures inside the computation or while writing output.
pub const INTERNAL: u8 = 1;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        Self {
            code: INPUT,
            message: message.into(),
        }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self {
            code: INTERNAL,
            message: message.into(),
        }
    }

    /// Prefixes the message with the file it concerns.
    pub fn in_file(self, path: &Path) -> Self {
        Self {
            code: self.code,
            message: format!("{}: {}", path.display(), self.message),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidInput(_)
            | Error::Config(_)
            | Error::Parse { .. }
            | Error::EmptyNetwork
            | Error::UnsupportedDyad(..)
            | Error::Csv(_)
            | Error::Json(_) => INPUT,
            Error::Undefined(_) | Error::NoConvergence(_) | Error::Io(_) => INTERNAL,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
