//! Non-fatal findings reported by pipeline stages.

use std::fmt;

/// A note about something suspicious that did not stop processing.
///
/// Lines refer to the file the stage was reading: the flat input for
/// ingest/extraction, the structured document for later stages.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: u32,
    pub message: String,
}

impl Diagnostic {
    pub fn new(line: u32, message: impl Into<String>) -> Self {
        Diagnostic {
            line,
            message: message.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}
