use std::fmt;

use serde::Serialize;

/// Failure of one command, carrying its exit code.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CliError {
    pub kind: ErrorKind,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub column: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorKind {
    Usage,
    Parse,
    Validation,
    Io,
    CheckFailed,
    Refused,
}

impl CliError {
    pub fn new(kind: ErrorKind, message: impl Into<String>) -> Self {
        CliError { kind, message: message.into(), line: None, column: None }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Self::new(ErrorKind::Usage, message)
    }

    pub fn validation(message: impl Into<String>) -> Self {
        Self::new(ErrorKind::Validation, message)
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind {
            ErrorKind::Refused => 2,
            _ => 1,
        }
    }

    /// `{"error": {...}}` as written to standard error.
    pub fn to_json(&self) -> String {
        serde_json::json!({ "error": self, "exit_code": self.exit_code() }).to_string()
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl std::error::Error for CliError {}

impl From<ifslab::Error> for CliError {
    fn from(e: ifslab::Error) -> Self {
        match e {
            ifslab::Error::Refused(m) => CliError::new(ErrorKind::Refused, m),
            other => CliError::validation(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::new(ErrorKind::Io, e.to_string())
    }
}
