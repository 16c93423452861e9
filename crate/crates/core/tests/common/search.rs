//! Token helpers and an exhaustive search for cheapest completions.

use minimerlin::parser::{step, Checkpoint, ParserEnv, Token};
use minimerlin::position::Position;
use minimerlin::tables::Tables;
use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet};

/// Tokens for space-separated terminal names, end-marker appended.
pub fn word_tokens(t: &Tables, words: &[&str]) -> Vec<Token> {
    let text = words.join(" ");
    let mut out = Vec::new();
    let mut off = 0;
    for w in words {
        let start = Position::of_offset(&text, off);
        off += w.len();
        let term = t.terminal(w).unwrap_or_else(|| panic!("no terminal {w}"));
        let payload = (*w == "INT").then_some(minimerlin::grammar::Literal::Int(1));
        out.push(Token::new(term, payload, start, Position::of_offset(&text, off)));
        off += 1;
    }
    out.push(Token::eof(t, Position::of_offset(&text, text.len())));
    out
}

fn key(env: &ParserEnv) -> Vec<u32> {
    env.stack.iter().map(|e| e.state).collect()
}

/// Least total cost of a terminal sequence of at most `depth` tokens that
/// leads `env` to acceptance, by uniform-cost search.
pub fn min_completion(env: &ParserEnv, terminals: &[(&str, u64)], depth: usize) -> Option<u64> {
    let t = env.tables.clone();
    let at = Position::START;
    let eof = Token::eof(&t, at);
    let mut heap = BinaryHeap::new();
    let mut envs = vec![env.clone()];
    heap.push(Reverse((0u64, 0usize, 0usize)));
    let mut seen = HashSet::new();
    while let Some(Reverse((cost, len, i))) = heap.pop() {
        let e = envs[i].clone();
        if !seen.insert((key(&e), len)) {
            continue;
        }
        if let Checkpoint::Result(_) = step(&e, &eof) {
            return Some(cost);
        }
        if len == depth {
            continue;
        }
        for (name, c) in terminals {
            let term = t.terminal(name).unwrap();
            let payload = (*name == "INT").then_some(minimerlin::grammar::Literal::Int(0));
            if let Checkpoint::Intermediate(next) = step(&e, &Token::new(term, payload, at, at)) {
                envs.push(next);
                heap.push(Reverse((cost + c, len + 1, envs.len() - 1)));
            }
        }
    }
    None
}
