//! Pull-based MiniML lexer.
//!
//! [`lex_step`] is a pure function from a lexer state and a window of input
//! to an outcome. The caller owns the buffer: when a window ends inside a
//! lexeme the step answers [`LexOutcome::NeedRefill`] with a state that can
//! be resumed on a longer window starting at the state's position.
//!
//! [`lex_all`] drives the step over a whole buffer and records a checkpoint
//! at every token boundary; [`relex`] restarts from those checkpoints after
//! an edit and splices the unaffected tail of the old token stream back in.

use crate::diagnostic::{Diagnostic, Phase};
use crate::grammar::Literal;
use crate::position::{Position, Range};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    Let,
    Rec,
    In,
    Fun,
    If,
    Then,
    Else,
    Match,
    With,
    Type,
    Of,
    Module,
    Struct,
    End,
    True,
    False,
    Ident,
    Uident,
    Tyvar,
    Int,
    String,
    Plus,
    Minus,
    Star,
    Less,
    Equal,
    Arrow,
    Bar,
    Colon,
    LParen,
    RParen,
    SemiSemi,
    Dot,
}

impl Kind {
    pub const ALL: [Kind; 33] = [
        Kind::Let,
        Kind::Rec,
        Kind::In,
        Kind::Fun,
        Kind::If,
        Kind::Then,
        Kind::Else,
        Kind::Match,
        Kind::With,
        Kind::Type,
        Kind::Of,
        Kind::Module,
        Kind::Struct,
        Kind::End,
        Kind::True,
        Kind::False,
        Kind::Ident,
        Kind::Uident,
        Kind::Tyvar,
        Kind::Int,
        Kind::String,
        Kind::Plus,
        Kind::Minus,
        Kind::Star,
        Kind::Less,
        Kind::Equal,
        Kind::Arrow,
        Kind::Bar,
        Kind::Colon,
        Kind::LParen,
        Kind::RParen,
        Kind::SemiSemi,
        Kind::Dot,
    ];

    /// Terminal name in the MiniML grammar.
    pub fn terminal_name(self) -> &'static str {
        match self {
            Kind::Let => "LET",
            Kind::Rec => "REC",
            Kind::In => "IN",
            Kind::Fun => "FUN",
            Kind::If => "IF",
            Kind::Then => "THEN",
            Kind::Else => "ELSE",
            Kind::Match => "MATCH",
            Kind::With => "WITH",
            Kind::Type => "TYPE",
            Kind::Of => "OF",
            Kind::Module => "MODULE",
            Kind::Struct => "STRUCT",
            Kind::End => "END",
            Kind::True => "TRUE",
            Kind::False => "FALSE",
            Kind::Ident => "IDENT",
            Kind::Uident => "UIDENT",
            Kind::Tyvar => "TYVAR",
            Kind::Int => "INT",
            Kind::String => "STRING",
            Kind::Plus => "PLUS",
            Kind::Minus => "MINUS",
            Kind::Star => "STAR",
            Kind::Less => "LESS",
            Kind::Equal => "EQUAL",
            Kind::Arrow => "ARROW",
            Kind::Bar => "BAR",
            Kind::Colon => "COLON",
            Kind::LParen => "LPAREN",
            Kind::RParen => "RPAREN",
            Kind::SemiSemi => "SEMISEMI",
            Kind::Dot => "DOT",
        }
    }

    fn keyword(word: &[u8]) -> Option<Kind> {
        Some(match word {
            b"let" => Kind::Let,
            b"rec" => Kind::Rec,
            b"in" => Kind::In,
            b"fun" => Kind::Fun,
            b"if" => Kind::If,
            b"then" => Kind::Then,
            b"else" => Kind::Else,
            b"match" => Kind::Match,
            b"with" => Kind::With,
            b"type" => Kind::Type,
            b"of" => Kind::Of,
            b"module" => Kind::Module,
            b"struct" => Kind::Struct,
            b"end" => Kind::End,
            b"true" => Kind::True,
            b"false" => Kind::False,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Lexeme {
    pub kind: Kind,
    pub payload: Option<Literal>,
    pub start: Position,
    pub end: Position,
}

impl Lexeme {
    pub fn range(&self) -> Range {
        Range::new(self.start, self.end)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Default,
    /// Inside a string literal; holds the unescaped bytes read so far.
    InString(Vec<u8>),
    InComment { depth: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LexState {
    pub mode: Mode,
    /// Where the next window must start.
    pub pos: Position,
    /// Start of the lexeme (string or comment) being read, or `pos`.
    pub lexeme_start: Position,
}

impl LexState {
    pub fn new() -> Self {
        LexState::at(Position::START)
    }

    pub fn at(pos: Position) -> Self {
        LexState { mode: Mode::Default, pos, lexeme_start: pos }
    }
}

impl Default for LexState {
    fn default() -> Self {
        LexState::new()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LexOutcome {
    Produced(Lexeme, LexState),
    NeedRefill(LexState),
    Failed(Diagnostic, LexState),
    EndOfInput,
}

enum Peek {
    Byte(u8),
    Eof,
    Refill,
}

struct Cursor<'a> {
    w: &'a [u8],
    at_eof: bool,
    /// Bytes of the window examined, plus one when end of input was seen.
    examined: usize,
}

impl Cursor<'_> {
    fn peek(&mut self, i: usize) -> Peek {
        if i < self.w.len() {
            self.examined = self.examined.max(i + 1);
            Peek::Byte(self.w[i])
        } else if self.at_eof {
            self.examined = self.examined.max(i + 1);
            Peek::Eof
        } else {
            Peek::Refill
        }
    }
}

fn is_ident_char(b: u8) -> bool {
    b.is_ascii_alphanumeric() || b == b'_' || b == b'\''
}

fn utf8_len(lead: u8) -> usize {
    match lead {
        0xC0..=0xDF => 2,
        0xE0..=0xEF => 3,
        0xF0..=0xF7 => 4,
        _ => 1,
    }
}

/// One lexing step. `window` must start at `s.pos`.
pub fn lex_step(s: &LexState, window: &[u8], at_eof: bool) -> LexOutcome {
    lex_step_traced(s, window, at_eof).0
}

/// Like [`lex_step`], also returning how many bytes of the window were
/// examined (one past the window when end of input was observed).
pub fn lex_step_traced(s: &LexState, window: &[u8], at_eof: bool) -> (LexOutcome, usize) {
    let mut c = Cursor { w: window, at_eof, examined: 0 };
    let out = step(s, &mut c);
    (out, c.examined)
}

fn step(s: &LexState, c: &mut Cursor) -> LexOutcome {
    let mut i = 0;
    let mut mode = s.mode.clone();
    let mut lexeme_start = s.lexeme_start;
    let at = |i: usize| s.pos.advance(&c.w[..i]);
    loop {
        match mode {
            Mode::InComment { depth } => match comment(c, &mut i, depth) {
                Ok(()) => mode = Mode::Default,
                Err(Some(depth)) => {
                    return LexOutcome::NeedRefill(LexState { mode: Mode::InComment { depth }, pos: at(i), lexeme_start })
                }
                Err(None) => {
                    let end = at(i);
                    return LexOutcome::Failed(
                        Diagnostic::new(Phase::Lexer, Range::new(lexeme_start, end), "unterminated comment"),
                        LexState::at(end),
                    );
                }
            },
            Mode::InString(buf) => return string(s, c, i, buf, lexeme_start),
            Mode::Default => {
                // Skip trivia.
                loop {
                    match c.peek(i) {
                        Peek::Byte(b' ' | b'\t' | b'\n' | b'\r') => i += 1,
                        Peek::Byte(b'(') => match c.peek(i + 1) {
                            Peek::Byte(b'*') => {
                                lexeme_start = at(i);
                                i += 2;
                                mode = Mode::InComment { depth: 1 };
                                break;
                            }
                            Peek::Refill => return LexOutcome::NeedRefill(LexState::at(at(i))),
                            _ => break,
                        },
                        Peek::Byte(_) => break,
                        Peek::Eof => return LexOutcome::EndOfInput,
                        Peek::Refill => return LexOutcome::NeedRefill(LexState::at(at(i))),
                    }
                }
                if matches!(mode, Mode::InComment { .. }) {
                    continue;
                }
                return token(s, c, i);
            }
        }
    }
}

/// Scans a comment body. `Err(Some(depth))` asks for a refill, `Err(None)`
/// means end of input inside the comment.
fn comment(c: &mut Cursor, i: &mut usize, mut depth: u32) -> Result<(), Option<u32>> {
    loop {
        match c.peek(*i) {
            Peek::Byte(b @ (b'(' | b'*')) => {
                let want = if b == b'(' { b'*' } else { b')' };
                match c.peek(*i + 1) {
                    Peek::Byte(n) if n == want => {
                        *i += 2;
                        if b == b'(' {
                            depth += 1;
                        } else {
                            depth -= 1;
                            if depth == 0 {
                                return Ok(());
                            }
                        }
                    }
                    Peek::Refill => return Err(Some(depth)),
                    _ => *i += 1,
                }
            }
            Peek::Byte(_) => *i += 1,
            Peek::Eof => return Err(None),
            Peek::Refill => return Err(Some(depth)),
        }
    }
}

fn string(s: &LexState, c: &mut Cursor, mut i: usize, mut buf: Vec<u8>, start: Position) -> LexOutcome {
    loop {
        match c.peek(i) {
            Peek::Byte(b'"') => {
                let end = s.pos.advance(&c.w[..i + 1]);
                let text = String::from_utf8_lossy(&buf).into_owned();
                return LexOutcome::Produced(
                    Lexeme { kind: Kind::String, payload: Some(Literal::Text(text)), start, end },
                    LexState::at(end),
                );
            }
            Peek::Byte(b'\\') => match c.peek(i + 1) {
                Peek::Byte(e @ (b'\\' | b'"')) => {
                    buf.push(e);
                    i += 2;
                }
                Peek::Refill => {
                    return LexOutcome::NeedRefill(LexState {
                        mode: Mode::InString(buf),
                        pos: s.pos.advance(&c.w[..i]),
                        lexeme_start: start,
                    })
                }
                _ => {
                    buf.push(b'\\');
                    i += 1;
                }
            },
            Peek::Byte(b) => {
                buf.push(b);
                i += 1;
            }
            Peek::Refill => {
                return LexOutcome::NeedRefill(LexState {
                    mode: Mode::InString(buf),
                    pos: s.pos.advance(&c.w[..i]),
                    lexeme_start: start,
                })
            }
            Peek::Eof => {
                let end = s.pos.advance(&c.w[..i]);
                let resume = start.advance(b"\"");
                return LexOutcome::Failed(
                    Diagnostic::new(Phase::Lexer, Range::new(start, end), "unterminated string"),
                    LexState::at(resume),
                );
            }
        }
    }
}

fn token(s: &LexState, c: &mut Cursor, i: usize) -> LexOutcome {
    let at = |j: usize, c: &Cursor| s.pos.advance(&c.w[..j]);
    let start = at(i, c);
    let Peek::Byte(b) = c.peek(i) else { unreachable!("trivia loop stops on a byte") };
    let simple = |kind: Kind, len: usize, c: &Cursor| {
        let end = at(i + len, c);
        LexOutcome::Produced(Lexeme { kind, payload: None, start, end }, LexState::at(end))
    };
    let out = match b {
        b'a'..=b'z' | b'_' | b'A'..=b'Z' | b'0'..=b'9' => {
            let mut j = i + 1;
            loop {
                match c.peek(j) {
                    Peek::Byte(n) if is_ident_char(n) && (!b.is_ascii_digit() || n.is_ascii_digit()) => j += 1,
                    Peek::Refill => return LexOutcome::NeedRefill(LexState::at(start)),
                    _ => break,
                }
            }
            let word = &c.w[i..j];
            let end = at(j, c);
            let (kind, payload) = if b.is_ascii_digit() {
                let n = std::str::from_utf8(word).unwrap().parse::<i64>().unwrap_or(i64::MAX);
                (Kind::Int, Some(Literal::Int(n)))
            } else if b.is_ascii_uppercase() {
                (Kind::Uident, Some(Literal::Text(String::from_utf8(word.to_vec()).unwrap())))
            } else if let Some(k) = Kind::keyword(word) {
                (k, None)
            } else {
                (Kind::Ident, Some(Literal::Text(String::from_utf8(word.to_vec()).unwrap())))
            };
            LexOutcome::Produced(Lexeme { kind, payload, start, end }, LexState::at(end))
        }
        b'\'' => match c.peek(i + 1) {
            Peek::Byte(b'a'..=b'z') => {
                let mut j = i + 2;
                loop {
                    match c.peek(j) {
                        Peek::Byte(b'a'..=b'z') => j += 1,
                        Peek::Refill => return LexOutcome::NeedRefill(LexState::at(start)),
                        _ => break,
                    }
                }
                let end = at(j, c);
                let name = String::from_utf8(c.w[i..j].to_vec()).unwrap();
                LexOutcome::Produced(
                    Lexeme { kind: Kind::Tyvar, payload: Some(Literal::Text(name)), start, end },
                    LexState::at(end),
                )
            }
            Peek::Refill => return LexOutcome::NeedRefill(LexState::at(start)),
            _ => illegal(c, i, start, 1),
        },
        b'"' => {
            let st = LexState { mode: Mode::InString(Vec::new()), pos: start.advance(b"\""), lexeme_start: start };
            let rest = Cursor { w: &c.w[i + 1..], at_eof: c.at_eof, examined: 0 };
            let mut rest = rest;
            let out = string(&st, &mut rest, 0, Vec::new(), start);
            c.examined = c.examined.max(i + 1 + rest.examined);
            out
        }
        b'+' => simple(Kind::Plus, 1, c),
        b'*' => simple(Kind::Star, 1, c),
        b'<' => simple(Kind::Less, 1, c),
        b'=' => simple(Kind::Equal, 1, c),
        b'|' => simple(Kind::Bar, 1, c),
        b':' => simple(Kind::Colon, 1, c),
        b'(' => simple(Kind::LParen, 1, c),
        b')' => simple(Kind::RParen, 1, c),
        b'.' => simple(Kind::Dot, 1, c),
        b'-' => match c.peek(i + 1) {
            Peek::Byte(b'>') => simple(Kind::Arrow, 2, c),
            Peek::Refill => return LexOutcome::NeedRefill(LexState::at(start)),
            _ => simple(Kind::Minus, 1, c),
        },
        b';' => match c.peek(i + 1) {
            Peek::Byte(b';') => simple(Kind::SemiSemi, 2, c),
            Peek::Refill => return LexOutcome::NeedRefill(LexState::at(start)),
            _ => illegal(c, i, start, 1),
        },
        _ => {
            let len = utf8_len(b);
            if i + len > c.w.len() && !c.at_eof {
                return LexOutcome::NeedRefill(LexState::at(start));
            }
            illegal(c, i, start, len.min(c.w.len() - i))
        }
    };
    if let LexOutcome::Produced(tok, _) = &out {
        debug_assert!(
            c.examined <= tok.end.offset - s.pos.offset + 1,
            "lexer looked more than one byte past a token"
        );
    }
    out
}

fn illegal(c: &mut Cursor, i: usize, start: Position, len: usize) -> LexOutcome {
    c.examined = c.examined.max(i + len);
    let bytes = &c.w[i..i + len];
    let end = start.advance(bytes);
    let shown = String::from_utf8_lossy(bytes);
    LexOutcome::Failed(
        Diagnostic::new(Phase::Lexer, Range::new(start, end), format!("illegal character '{shown}'")),
        LexState::at(end),
    )
}

/// Lexer state at a token boundary, recorded for restarts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LexCheckpoint {
    pub state: LexState,
    pub tokens_before: usize,
    pub diagnostics_before: usize,
    /// Absolute offset one past the furthest byte examined by the steps
    /// since the previous checkpoint.
    pub horizon: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LexResult {
    pub tokens: Vec<Lexeme>,
    /// Checkpoint 0 is the initial state; checkpoint `i + 1` follows token `i`.
    pub checkpoints: Vec<LexCheckpoint>,
    pub diagnostics: Vec<Diagnostic>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RelexStats {
    pub reused: usize,
    pub relexed: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Edit {
    pub offset: usize,
    pub removed_len: usize,
    pub inserted_len: usize,
}

impl Edit {
    pub fn is_identity(&self) -> bool {
        self.removed_len == 0 && self.inserted_len == 0
    }

    /// Smallest edit turning `old` into `new`, by common prefix and suffix.
    pub fn between(old: &str, new: &str) -> Edit {
        let (a, b) = (old.as_bytes(), new.as_bytes());
        let prefix = a.iter().zip(b).take_while(|(x, y)| x == y).count();
        let max_suffix = a.len().min(b.len()) - prefix;
        let suffix = a.iter().rev().zip(b.iter().rev()).take(max_suffix).take_while(|(x, y)| x == y).count();
        Edit { offset: prefix, removed_len: a.len() - prefix - suffix, inserted_len: b.len() - prefix - suffix }
    }
}

struct Driver<'a> {
    buf: &'a [u8],
    out: LexResult,
    horizon: usize,
}

impl Driver<'_> {
    /// Runs one step from `s`; returns the next state, or `None` at end.
    fn advance(&mut self, s: &LexState) -> Option<LexState> {
        let off = s.pos.offset;
        let (outcome, examined) = lex_step_traced(s, &self.buf[off..], true);
        self.horizon = self.horizon.max(off + examined);
        match outcome {
            LexOutcome::Produced(tok, next) => {
                self.out.tokens.push(tok);
                self.out.checkpoints.push(LexCheckpoint {
                    state: next.clone(),
                    tokens_before: self.out.tokens.len(),
                    diagnostics_before: self.out.diagnostics.len(),
                    horizon: std::mem::take(&mut self.horizon),
                });
                Some(next)
            }
            LexOutcome::Failed(d, next) => {
                self.out.diagnostics.push(d);
                Some(next)
            }
            LexOutcome::NeedRefill(_) => unreachable!("whole-buffer window is at end of input"),
            LexOutcome::EndOfInput => None,
        }
    }
}

pub fn lex_all(buffer: &str) -> LexResult {
    let mut d = Driver {
        buf: buffer.as_bytes(),
        out: LexResult {
            tokens: Vec::new(),
            checkpoints: vec![LexCheckpoint { state: LexState::new(), tokens_before: 0, diagnostics_before: 0, horizon: 0 }],
            diagnostics: Vec::new(),
        },
        horizon: 0,
    };
    let mut s = LexState::new();
    while let Some(next) = d.advance(&s) {
        s = next;
    }
    d.out
}

fn shift_pos(p: Position, from: Position, to: Position) -> Position {
    p.relative_to(from).at(to)
}

/// Relexes `new_buffer` reusing `old` outside the edited region.
pub fn relex(old: &LexResult, new_buffer: &str, edit: Edit) -> (LexResult, RelexStats) {
    if edit.is_identity() {
        return (old.clone(), RelexStats { reused: old.tokens.len(), relexed: 0 });
    }
    // Last checkpoint whose whole history stayed left of the edit.
    let mut restart = 0;
    let mut seen = 0;
    for (i, cp) in old.checkpoints.iter().enumerate() {
        seen = seen.max(cp.horizon);
        if seen > edit.offset {
            break;
        }
        restart = i;
    }
    let cp = &old.checkpoints[restart];
    let mut d = Driver {
        buf: new_buffer.as_bytes(),
        out: LexResult {
            tokens: old.tokens[..cp.tokens_before].to_vec(),
            checkpoints: old.checkpoints[..=restart].to_vec(),
            diagnostics: old.diagnostics[..cp.diagnostics_before].to_vec(),
        },
        horizon: 0,
    };
    let delta = edit.inserted_len as isize - edit.removed_len as isize;
    let old_index: std::collections::HashMap<usize, usize> =
        old.checkpoints.iter().enumerate().skip(restart + 1).map(|(i, c)| (c.state.pos.offset, i)).collect();
    let mut s = cp.state.clone();
    let mut relexed = 0;
    loop {
        let before = d.out.tokens.len();
        let Some(next) = d.advance(&s) else { break };
        if d.out.tokens.len() == before {
            s = next;
            continue;
        }
        relexed += 1;
        let off = next.pos.offset;
        if off >= edit.offset + edit.inserted_len {
            let old_off = (off as isize - delta) as usize;
            if let Some(&oi) = old_index.get(&old_off).filter(|_| old_off >= edit.offset + edit.removed_len) {
                splice_tail(&mut d.out, old, oi, next.pos);
                let reused = cp.tokens_before + (old.tokens.len() - old.checkpoints[oi].tokens_before);
                return (d.out, RelexStats { reused, relexed });
            }
        }
        s = next;
    }
    (d.out, RelexStats { reused: cp.tokens_before, relexed })
}

/// Appends old tokens, diagnostics and checkpoints after old checkpoint `oi`,
/// moved so that its position lands on `to`.
fn splice_tail(out: &mut LexResult, old: &LexResult, oi: usize, to: Position) {
    let cp = &old.checkpoints[oi];
    let from = cp.state.pos;
    let (tb, db) = (out.tokens.len() as isize - cp.tokens_before as isize, out.diagnostics.len() as isize - cp.diagnostics_before as isize);
    for t in &old.tokens[cp.tokens_before..] {
        out.tokens.push(Lexeme { start: shift_pos(t.start, from, to), end: shift_pos(t.end, from, to), ..t.clone() });
    }
    for dg in &old.diagnostics[cp.diagnostics_before..] {
        out.diagnostics.push(Diagnostic { range: dg.range.relocate(from, to), ..dg.clone() });
    }
    let delta = to.offset as isize - from.offset as isize;
    for c in &old.checkpoints[oi + 1..] {
        let pos = shift_pos(c.state.pos, from, to);
        out.checkpoints.push(LexCheckpoint {
            state: LexState { mode: c.state.mode.clone(), pos, lexeme_start: shift_pos(c.state.lexeme_start, from, to) },
            tokens_before: (c.tokens_before as isize + tb) as usize,
            diagnostics_before: (c.diagnostics_before as isize + db) as usize,
            horizon: (c.horizon as isize + delta) as usize,
        });
    }
}
