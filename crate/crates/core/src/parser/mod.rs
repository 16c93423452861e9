//! Table-driven incremental LR runtime.
//!
//! A [`ParserEnv`] is an immutable parser configuration: feeding it a token
//! with [`step`] returns a new [`Checkpoint`] and leaves the input usable.
//! [`parse_prefix`] records the environment reached after every token in a
//! [`ParseCache`], and [`resume`] restarts from it after an edit.

mod stack;
mod tree;

use crate::grammar::{Literal, Symbol, TerminalId};
use crate::position::{Position, Range};
use crate::tables::{Action, StateId, Tables};
use std::collections::HashSet;
use std::sync::Arc;
use thiserror::Error;

pub use stack::{Stack, StackElement};
pub use tree::{Sexp, Tree};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Token {
    pub terminal: TerminalId,
    pub payload: Option<Literal>,
    pub start: Position,
    pub end: Position,
}

impl Token {
    pub fn new(terminal: TerminalId, payload: Option<Literal>, start: Position, end: Position) -> Self {
        Token { terminal, payload, start, end }
    }

    pub fn eof(t: &Tables, at: Position) -> Self {
        Token { terminal: t.eof(), payload: None, start: at, end: at }
    }

    pub fn range(&self) -> Range {
        Range::new(self.start, self.end)
    }
}

#[derive(Clone, Debug)]
pub struct ParserEnv {
    pub tables: Arc<Tables>,
    pub start_state: StateId,
    pub stack: Stack,
}

impl PartialEq for ParserEnv {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.tables, &other.tables) || self.tables == other.tables)
            && self.start_state == other.start_state
            && self.stack == other.stack
    }
}

impl Eq for ParserEnv {}

impl ParserEnv {
    pub fn new(tables: Arc<Tables>, start_state: StateId) -> Self {
        ParserEnv { tables, start_state, stack: Stack::new() }
    }

    pub fn state(&self) -> StateId {
        self.stack.top().map_or(self.start_state, |e| e.state)
    }

    /// State below the `k` topmost elements.
    pub fn state_below(&self, k: usize) -> StateId {
        self.stack.iter().nth(k).map_or(self.start_state, |e| e.state)
    }

    pub fn push(&self, elem: StackElement) -> ParserEnv {
        ParserEnv { tables: self.tables.clone(), start_state: self.start_state, stack: self.stack.push(elem) }
    }

    /// Pushes `tree` and moves along the automaton transition on its symbol.
    pub fn shift_tree(&self, tree: Arc<Tree>) -> Option<ParserEnv> {
        let state = self.tables.transition(self.state(), tree.symbol)?;
        Some(self.push(StackElement { symbol: tree.symbol, range: tree.range, tree, state }))
    }

    /// Reduces production `prod`, anchoring an empty right-hand side at `at`.
    pub fn reduce(&self, prod: u32, at: Position) -> ParserEnv {
        let t = &self.tables;
        let p = &t.productions[prod as usize];
        let n = p.rhs.len();
        let mut stack = self.stack.clone();
        let mut children = Vec::with_capacity(n);
        for _ in 0..n {
            children.push(stack.top().expect("stack holds the right-hand side").tree.clone());
            stack = stack.pop().unwrap();
        }
        children.reverse();
        let range = match (children.first(), children.last()) {
            (Some(a), Some(b)) => Range::new(a.range.start, b.range.end),
            _ => Range::point(at),
        };
        let below = stack.top().map_or(self.start_state, |e| e.state);
        let sym = Symbol::N(p.lhs);
        let state = t.goto[below as usize][p.lhs as usize].expect("goto defined after reduction");
        let tree = Arc::new(Tree { symbol: sym, children, payload: None, range, synthesized: false });
        ParserEnv { tables: t.clone(), start_state: self.start_state, stack: stack.push(StackElement { symbol: sym, tree, state, range }) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Checkpoint {
    Intermediate(ParserEnv),
    Result(Arc<Tree>),
    SyntaxError { pos: Position, state: StateId, expected: Vec<TerminalId> },
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown entry symbol `{0}`")]
pub struct UnknownEntry(pub String);

pub fn start(t: &Arc<Tables>, entry: &str) -> Result<Checkpoint, UnknownEntry> {
    start_env(t, entry).map(Checkpoint::Intermediate)
}

pub fn start_env(t: &Arc<Tables>, entry: &str) -> Result<ParserEnv, UnknownEntry> {
    let s = t.start_state(entry).ok_or_else(|| UnknownEntry(entry.to_string()))?;
    Ok(ParserEnv::new(t.clone(), s))
}

/// Performs every reduction the lookahead `tok` enables, then shifts it.
pub fn step(env: &ParserEnv, tok: &Token) -> Checkpoint {
    let t = env.tables.clone();
    let mut env = env.clone();
    loop {
        let s = env.state();
        match t.action[s as usize][tok.terminal as usize] {
            Action::Shift(next) => {
                let sym = Symbol::T(tok.terminal);
                let tree = Arc::new(Tree::leaf(sym, tok.payload.clone(), tok.range()));
                return Checkpoint::Intermediate(env.push(StackElement { symbol: sym, tree, state: next, range: tok.range() }));
            }
            Action::Reduce(p) => env = env.reduce(p, tok.start),
            Action::Accept => {
                let top = env.stack.top().expect("accept with the start symbol on top");
                return Checkpoint::Result(top.tree.clone());
            }
            Action::Error => {
                return Checkpoint::SyntaxError { pos: tok.start, state: s, expected: t.expected(s) };
            }
        }
    }
}

/// Top element (if any) and current state.
pub fn inspect(env: &ParserEnv) -> (Option<&StackElement>, StateId) {
    (env.stack.top(), env.state())
}

pub fn pop(env: &ParserEnv) -> Option<ParserEnv> {
    env.stack.pop().map(|stack| ParserEnv { tables: env.tables.clone(), start_state: env.start_state, stack })
}

/// Environments after each fed token, plus the run's outcome.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseCache {
    pub start: ParserEnv,
    /// `envs[i]` is the environment after feeding tokens `0..=i`.
    pub envs: Vec<ParserEnv>,
    pub tokens: Vec<Token>,
    pub last: Checkpoint,
}

impl ParseCache {
    pub fn len(&self) -> usize {
        self.envs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.envs.is_empty()
    }

    /// Environment after feeding the first `i` tokens.
    pub fn env_at(&self, i: usize) -> &ParserEnv {
        if i == 0 {
            &self.start
        } else {
            &self.envs[i - 1]
        }
    }

    /// Index of the token that caused the final non-intermediate checkpoint.
    pub fn stop_index(&self) -> usize {
        self.envs.len()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ResumeStats {
    pub reused: usize,
    pub refed: usize,
}

fn feed(mut cache: ParseCache, from: usize) -> (ParseCache, usize) {
    let mut env = cache.env_at(from).clone();
    cache.envs.truncate(from);
    let mut fed = 0;
    let mut last = Checkpoint::Intermediate(env.clone());
    for tok in &cache.tokens[from..] {
        fed += 1;
        last = step(&env, tok);
        match &last {
            Checkpoint::Intermediate(next) => {
                env = next.clone();
                cache.envs.push(env.clone());
            }
            _ => break,
        }
    }
    cache.last = last;
    (cache, fed)
}

/// Folds [`step`] over `tokens` from `env`, stopping at the first result or
/// syntax error.
pub fn parse_prefix_from(env: &ParserEnv, tokens: &[Token]) -> (Checkpoint, ParseCache) {
    let cache = ParseCache {
        start: env.clone(),
        envs: Vec::new(),
        tokens: tokens.to_vec(),
        last: Checkpoint::Intermediate(env.clone()),
    };
    let (cache, _) = feed(cache, 0);
    (cache.last.clone(), cache)
}

pub fn parse_prefix(t: &Arc<Tables>, entry: &str, tokens: &[Token]) -> Result<(Checkpoint, ParseCache), UnknownEntry> {
    Ok(parse_prefix_from(&start_env(t, entry)?, tokens))
}

/// Reparses `new_tokens` starting from the cached environment closest to
/// (and not after) `first_changed`.
pub fn resume(cache: &ParseCache, new_tokens: &[Token], first_changed: usize) -> (Checkpoint, ParseCache, ResumeStats) {
    if new_tokens == cache.tokens.as_slice() {
        return (cache.last.clone(), cache.clone(), ResumeStats { reused: cache.envs.len(), refed: 0 });
    }
    let from = first_changed.min(cache.envs.len());
    let c = ParseCache {
        start: cache.start.clone(),
        envs: cache.envs[..from].to_vec(),
        tokens: new_tokens.to_vec(),
        last: cache.last.clone(),
    };
    let (c, refed) = feed(c, from);
    (c.last.clone(), c, ResumeStats { reused: from, refed })
}

/// Index of the first token that differs between two streams.
pub fn first_difference(a: &[Token], b: &[Token]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

/// Number of stack frames of `b` physically shared with `a`.
pub fn shared_frames(a: &ParserEnv, b: &ParserEnv) -> usize {
    let mine: HashSet<*const stack::Frame> = a.stack.frames().map(Arc::as_ptr).collect();
    b.stack.frames().filter(|f| mine.contains(&Arc::as_ptr(f))).count()
}
