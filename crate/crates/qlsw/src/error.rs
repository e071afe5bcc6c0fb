use std::fmt;

use serde::Serialize;

/// Error reported by the CLI as `{"error": code, "message": ...}` on stderr.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CliError {
    #[serde(rename = "error")]
    pub code: String,
    pub message: String,
    #[serde(skip)]
    pub internal: bool,
}

impl CliError {
    pub fn new(code: &str, message: impl Into<String>) -> Self {
        Self {
            code: code.to_string(),
            message: message.into(),
            internal: false,
        }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self {
            code: "invariant".into(),
            message: message.into(),
            internal: true,
        }
    }

    /// 2 for bad input, 3 for violated internal invariants.
    pub fn exit_code(&self) -> i32 {
        if self.internal {
            3
        } else {
            2
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).unwrap_or_else(|_| format!("{{\"error\":\"{}\"}}", self.code))
    }

    pub fn context(mut self, what: &str) -> Self {
        self.message = format!("{what}: {}", self.message);
        self
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.code, self.message)
    }
}

impl std::error::Error for CliError {}

impl From<qlsw_core::Error> for CliError {
    fn from(e: qlsw_core::Error) -> Self {
        Self {
            code: e.code().to_string(),
            message: e.to_string(),
            internal: e.is_internal(),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        Self::new("parse", e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::new("io", e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        Self::new("io", e.to_string())
    }
}
