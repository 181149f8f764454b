//! Library side of the `nestdisc` command: argument definitions, the three
//! subcommands and their output formats.

pub mod angle;
pub mod args;
pub mod commands;
pub mod sweep;

use std::fmt;

use nestdisc::Error;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const INTERNAL: i32 = 1;
    pub const PARSE: i32 = 2;
    pub const UNSUPPORTED: i32 = 3;
    pub const IO: i32 = 4;
}

#[derive(Debug)]
pub enum CliError {
    /// Malformed or invalid input.
    Parse(String),
    /// Well-formed input outside what the solvers handle.
    Unsupported(String),
    Io(String),
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => exit::PARSE,
            CliError::Unsupported(_) => exit::UNSUPPORTED,
            CliError::Io(_) => exit::IO,
            CliError::Internal(_) => exit::INTERNAL,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Parse(m) => write!(f, "invalid input: {m}"),
            CliError::Unsupported(m) => write!(f, "unsupported input: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::UnsupportedN(_) | Error::UnsupportedDimension(_) => CliError::Unsupported(msg),
            Error::Parse(_)
            | Error::NonHermitianInput { .. }
            | Error::NotPsd { .. }
            | Error::NotSubIdentity { .. }
            | Error::WrongDimension { .. }
            | Error::SizeMismatch(_)
            | Error::InvalidPovm(_)
            | Error::InvalidNestedPovm(_)
            | Error::InvalidEnsemble(_)
            | Error::InvalidPermutation(_) => CliError::Parse(msg),
            _ => CliError::Internal(msg),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

pub fn read_file(path: &std::path::Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}
