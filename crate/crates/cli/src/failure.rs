//! Errors surfaced on stderr as one JSON object.

use std::fmt;
use std::path::Path;

use replicator_core::Error;
use serde::Serialize;
use serde_json::json;

#[derive(Debug)]
pub enum Failure {
    Core(Error),
    Io { path: String, message: String },
    Parse { path: String, message: String },
    Usage { message: String },
}

impl Failure {
    pub fn io(path: &Path, e: impl fmt::Display) -> Self {
        Failure::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }
    }

    pub fn parse(path: &Path, e: impl fmt::Display) -> Self {
        Failure::Parse {
            path: path.display().to_string(),
            message: e.to_string(),
        }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Failure::Usage {
            message: message.into(),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let detail = match self {
            Failure::Core(e) => serde_json::to_value(e).unwrap_or(json!({ "kind": "engine" })),
            Failure::Io { path, .. } => json!({ "kind": "io", "path": path }),
            Failure::Parse { path, .. } => json!({ "kind": "parse", "path": path }),
            Failure::Usage { .. } => json!({ "kind": "usage" }),
        };
        json!({ "error": detail, "message": self.to_string() })
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Core(e) => write!(f, "{e}"),
            Failure::Io { path, message } => write!(f, "{path}: {message}"),
            Failure::Parse { path, message } => write!(f, "{path}: {message}"),
            Failure::Usage { message } => f.write_str(message),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Io {
            path: String::new(),
            message: e.to_string(),
        }
    }
}

/// Serializes `value` as pretty JSON with a trailing newline.
pub fn to_json_text<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}
