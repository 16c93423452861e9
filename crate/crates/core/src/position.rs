use serde::{Deserialize, Serialize};
use std::fmt;

/// A point in a buffer. `line` is 1-based, `col` and `offset` are 0-based
/// byte counts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Position {
    pub line: u32,
    pub col: u32,
    pub offset: usize,
}

impl Position {
    pub const START: Position = Position { line: 1, col: 0, offset: 0 };

    pub fn new(line: u32, col: u32, offset: usize) -> Self {
        Position { line, col, offset }
    }

    /// Advance over `bytes`, tracking newlines.
    pub fn advance(mut self, bytes: &[u8]) -> Self {
        for &b in bytes {
            self.offset += 1;
            if b == b'\n' {
                self.line += 1;
                self.col = 0;
            } else {
                self.col += 1;
            }
        }
        self
    }

    /// Position of byte `offset` in `text`.
    pub fn of_offset(text: &str, offset: usize) -> Self {
        Position::START.advance(&text.as_bytes()[..offset.min(text.len())])
    }

    /// Byte offset of `line:col` in `text`, clamped to the end of that line.
    /// Returns `None` when the line does not exist.
    pub fn resolve(text: &str, line: u32, col: u32) -> Option<Position> {
        if line == 0 {
            return None;
        }
        let mut offset = 0;
        for (idx, l) in text.split('\n').enumerate() {
            if idx as u32 + 1 == line {
                let c = (col as usize).min(l.len());
                return Some(Position::new(line, c as u32, offset + c));
            }
            offset += l.len() + 1;
        }
        None
    }

    /// Express `self` relative to `base` (both in the same buffer, `base <= self`).
    pub fn relative_to(self, base: Position) -> RelPos {
        let dline = self.line - base.line;
        RelPos {
            dline,
            col: if dline == 0 { self.col - base.col } else { self.col },
            doffset: self.offset - base.offset,
        }
    }
}

impl PartialOrd for Position {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Position {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.offset.cmp(&other.offset)
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// A position relative to some anchor, invariant under moving the text
/// that contains both.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RelPos {
    pub dline: u32,
    pub col: u32,
    pub doffset: usize,
}

impl RelPos {
    pub fn at(self, base: Position) -> Position {
        Position {
            line: base.line + self.dline,
            col: if self.dline == 0 { base.col + self.col } else { self.col },
            offset: base.offset + self.doffset,
        }
    }
}

/// Half-open in bytes; `start <= end`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Range {
    pub start: Position,
    pub end: Position,
}

impl Range {
    pub fn new(start: Position, end: Position) -> Self {
        Range { start, end }
    }

    pub fn point(p: Position) -> Self {
        Range { start: p, end: p }
    }

    pub fn is_empty(&self) -> bool {
        self.start.offset == self.end.offset
    }

    /// Inclusive containment of a cursor.
    pub fn contains(&self, p: Position) -> bool {
        self.start.offset <= p.offset && p.offset <= self.end.offset
    }

    pub fn contains_range(&self, other: &Range) -> bool {
        self.start.offset <= other.start.offset && other.end.offset <= self.end.offset
    }

    pub fn relocate(self, from: Position, to: Position) -> Range {
        Range {
            start: self.start.relative_to(from).at(to),
            end: self.end.relative_to(from).at(to),
        }
    }
}
