//! Lowering, inference and phrase-level memoization for MiniML.

pub mod ast;
pub mod env;
pub mod exhaust;
pub mod infer;
pub mod lower;
pub mod types;

pub use ast::{Ast, NodeId, Phrase};
pub use env::{prelude, DefSite, TypeEnv};
pub use exhaust::{missing_cases, ExhaustError, Pat};
pub use infer::{infer_expr, infer_phrase, NodeType, PhraseNodes, PhraseTyping};
pub use lower::{lower, lower_expr};
pub use types::{print_type, unify, Mismatch, Printer, Scheme, Subst, Type};

use crate::diagnostic::Diagnostic;
use crate::position::Position;
use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

/// Typed side tables, one per toplevel phrase.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TypedTree {
    pub phrases: Vec<Arc<PhraseNodes>>,
}

impl TypedTree {
    pub fn node(&self, phrase: usize, id: NodeId) -> Option<&NodeType> {
        self.phrases.get(phrase)?.get(id as usize)?.as_ref()
    }

    pub fn fake_count(&self) -> usize {
        self.phrases.iter().flat_map(|p| p.iter()).flatten().filter(|n| n.fake).count()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct CacheEntry {
    fingerprint: u64,
    nodes: Arc<PhraseNodes>,
    /// Relative to the phrase start.
    diagnostics: Arc<Vec<Diagnostic>>,
    env_after: TypeEnv,
}

/// Per-phrase memo of a previous run.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PhraseCache {
    entries: Vec<CacheEntry>,
}

impl PhraseCache {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CheckStats {
    pub reused: usize,
    pub inferred: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Checked {
    pub typed: TypedTree,
    pub diagnostics: Vec<Diagnostic>,
    /// `env_before[i]` is the environment phrase `i` was typed in.
    pub env_before: Vec<TypeEnv>,
    pub global_env: TypeEnv,
}

/// Hash of a phrase with positions taken relative to its start, so that
/// moving a phrase does not change it.
pub fn fingerprint(p: &Phrase) -> u64 {
    let mut q = p.clone();
    let start = p.range.start;
    ast::map_phrase_ranges(&mut q, &|r| r.relocate(start, Position::START));
    let mut h = DefaultHasher::new();
    q.hash(&mut h);
    h.finish()
}

/// Types every phrase, reusing the longest prefix of `old` whose
/// fingerprints still match.
pub fn check_buffer(prelude: &TypeEnv, ast: &Ast, old: &PhraseCache) -> (Checked, PhraseCache, CheckStats) {
    let mut env = prelude.clone();
    let mut typed = TypedTree::default();
    let mut diagnostics = Vec::new();
    let mut env_before = Vec::with_capacity(ast.phrases.len());
    let mut entries = Vec::with_capacity(ast.phrases.len());
    let mut stats = CheckStats::default();
    let mut reusing = true;
    for (i, p) in ast.phrases.iter().enumerate() {
        let fp = fingerprint(p);
        let start = p.range.start;
        env_before.push(env.clone());
        let entry = match old.entries.get(i) {
            Some(e) if reusing && e.fingerprint == fp => {
                stats.reused += 1;
                e.clone()
            }
            _ => {
                reusing = false;
                stats.inferred += 1;
                let t = infer_phrase(&env, p, i);
                let rel = t
                    .diagnostics
                    .into_iter()
                    .map(|mut d| {
                        d.range = d.range.relocate(start, Position::START);
                        d
                    })
                    .collect();
                CacheEntry { fingerprint: fp, nodes: Arc::new(t.nodes), diagnostics: Arc::new(rel), env_after: t.env_after }
            }
        };
        diagnostics.extend(entry.diagnostics.iter().map(|d| {
            let mut d = d.clone();
            d.range = d.range.relocate(Position::START, start);
            d
        }));
        typed.phrases.push(entry.nodes.clone());
        env = entry.env_after.clone();
        entries.push(entry);
    }
    (Checked { typed, diagnostics, env_before, global_env: env }, PhraseCache { entries }, stats)
}
