use crate::position::{Position, Range};
use serde::Serialize;
use std::fmt;

/// Pipeline stage that reported a diagnostic. The declaration order is the
/// tie-break order used when sorting diagnostics.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Lexer,
    Parser,
    Typer,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Diagnostic {
    pub phase: Phase,
    pub range: Range,
    pub message: String,
}

impl Diagnostic {
    pub fn new(phase: Phase, range: Range, message: impl Into<String>) -> Self {
        Diagnostic { phase, range, message: message.into() }
    }

    pub fn at(phase: Phase, pos: Position, message: impl Into<String>) -> Self {
        Diagnostic::new(phase, Range::point(pos), message)
    }

    pub fn sort_key(&self) -> (usize, usize, Phase) {
        (self.range.start.offset, self.range.end.offset, self.phase)
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{} {:?}: {}", self.range.start, self.range.end, self.phase, self.message)
    }
}
