use std::fmt;

use gaborlike::io::FormatError;

/// Exit code 2 for bad input, 1 for everything else.
#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Internal(_) => 1,
        }
    }

    pub fn invalid(msg: impl Into<String>) -> Self {
        CliError::Validation(msg.into())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "{m}"),
            CliError::Internal(m) => write!(f, "internal: {m}"),
        }
    }
}

impl From<gaborlike::Error> for CliError {
    fn from(e: gaborlike::Error) -> Self {
        match e {
            gaborlike::Error::DegenerateFilter { .. } => CliError::Internal(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        match e {
            FormatError::Io(_) => CliError::Internal(e.to_string()),
            FormatError::Grid(inner) => inner.into(),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Internal(e.to_string())
    }
}

/// Errors reading user-supplied inputs are validation errors.
pub fn input<T>(path: &std::path::Path, r: Result<T, FormatError>) -> Result<T, CliError> {
    r.map_err(|e| match e {
        FormatError::Io(io) => CliError::invalid(format!("{}: {io}", path.display())),
        other => CliError::from(other),
    })
}
