use super::{locals_at, scope_at, Analysis};
use crate::lexer::lex_all;
use crate::miniml::{miniml, tokens_of};
use crate::parser::{parse_prefix, Checkpoint};
use crate::position::{Position, Range};
use crate::typer::ast::{walk_phrase, ExprKind, NodeRef};
use crate::typer::{infer_expr, lower_expr, unify, Printer, Scheme, Subst, Type, TypeEnv};
use std::collections::BTreeMap;
use thiserror::Error;

/// Identifier spliced at the cursor to learn the expected type.
pub const CURSOR_IDENT: &str = "__cursor__";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EntryKind {
    Value,
    Constructor,
    Module,
}

impl EntryKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EntryKind::Value => "value",
            EntryKind::Constructor => "constructor",
            EntryKind::Module => "module",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompletionEntry {
    pub name: String,
    pub ty: String,
    pub kind: EntryKind,
    /// 0 when the type fits the expected type, 1 otherwise.
    pub rank: u32,
}

fn instantiate_above(s: &Scheme, base: u32) -> Type {
    let closed = Scheme::close(&s.ty);
    let mut fresh = base;
    closed.instantiate(&mut fresh)
}

/// Type expected at `pos`, found by typing the buffer with a dummy
/// identifier spliced there.
fn expected_type(a: &Analysis, pos: Position, prefix: &str) -> Option<Type> {
    let off = pos.offset.min(a.buffer.len());
    let mut cut = off;
    if a.buffer.is_char_boundary(off) && a.buffer[..off].ends_with(prefix) {
        cut -= prefix.len();
    }
    let mut text = String::with_capacity(a.buffer.len() + CURSOR_IDENT.len() + 2);
    text.push_str(&a.buffer[..cut]);
    text.push(' ');
    text.push_str(CURSOR_IDENT);
    text.push(' ');
    text.push_str(&a.buffer[off..]);
    let b = Analysis::of_buffer(&text);
    let mut found = None;
    for (i, p) in b.ast.phrases.iter().enumerate() {
        walk_phrase(p, &mut |n| {
            if let NodeRef::Expr(e) = n {
                if matches!(&e.kind, ExprKind::Var(x) if x == CURSOR_IDENT) && found.is_none() {
                    found = Some((i, e.id));
                }
            }
        });
    }
    let (i, id) = found?;
    b.node_type(i, id).map(|n| n.ty.clone())
}

fn fits(expected: &Option<Type>, s: &Scheme) -> bool {
    match expected {
        None => true,
        Some(e) => {
            let e = instantiate_above(&Scheme::close(e), 0);
            let t = instantiate_above(s, 1 << 20);
            unify(&e, &t, &Subst::new()).is_ok()
        }
    }
}

/// Names in scope at `pos` starting with `prefix`, those fitting the
/// expected type first, then alphabetical.
pub fn complete_prefix(a: &Analysis, pos: Position, prefix: &str) -> Vec<CompletionEntry> {
    let env = a.env_at(pos);
    let upper = prefix.starts_with(|c: char| c.is_ascii_uppercase());
    let mut cands: BTreeMap<(String, EntryKind), Scheme> = BTreeMap::new();
    if upper {
        for (name, c) in env.constructors.iter().filter(|(n, _)| n.starts_with(prefix)) {
            cands.insert((name.clone(), EntryKind::Constructor), c.scheme(env));
        }
        for name in env.modules.keys().filter(|n| n.starts_with(prefix)) {
            cands.insert((name.clone(), EntryKind::Module), Scheme::mono(Type::Var(0)));
        }
    } else {
        for (name, v) in env.values.iter().filter(|(n, _)| n.starts_with(prefix) && !n.starts_with('(')) {
            cands.insert((name.clone(), EntryKind::Value), v.scheme.clone());
        }
        for l in locals_at(a, pos).into_iter().filter(|l| l.name.starts_with(prefix)) {
            cands.insert((l.name, EntryKind::Value), l.scheme);
        }
    }
    if cands.is_empty() {
        return Vec::new();
    }
    let expected = expected_type(a, pos, prefix);
    let mut out: Vec<CompletionEntry> = cands
        .into_iter()
        .map(|((name, kind), s)| {
            let ty = if kind == EntryKind::Module { String::new() } else { Printer::new().print(&s.ty) };
            let rank = if kind == EntryKind::Module || fits(&expected, &s) { 0 } else { 1 };
            CompletionEntry { name, ty, kind, rank }
        })
        .collect();
    out.sort_by(|x, y| (x.rank, &x.name, x.kind).cmp(&(y.rank, &y.name, y.kind)));
    out
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum TypeExprError {
    #[error("{message}")]
    Parse { range: Range, message: String },
}

fn parse_error(range: Range, message: impl Into<String>) -> TypeExprError {
    TypeExprError::Parse { range, message: message.into() }
}

/// Type of `text` in the scope at `pos`, printed.
pub fn type_expression(a: &Analysis, text: &str, pos: Position) -> Result<String, TypeExprError> {
    let m = miniml();
    let lexed = lex_all(text);
    if let Some(d) = lexed.diagnostics.first() {
        return Err(parse_error(d.range, d.message.clone()));
    }
    let toks = tokens_of(&lexed, text);
    let (cp, _) = parse_prefix(&m.tables, "expr", &toks).expect("expr entry point");
    let tree = match cp {
        Checkpoint::Result(t) => t,
        Checkpoint::SyntaxError { pos, .. } => {
            let tok = toks.iter().find(|t| t.start == pos).map(|t| m.tables.terminal_name(t.terminal));
            let what = match tok {
                Some(n) if n != "$end" => n.to_string(),
                _ => "end of input".to_string(),
            };
            return Err(parse_error(Range::point(pos), format!("syntax error: unexpected {what}")));
        }
        Checkpoint::Intermediate(_) => unreachable!("the end marker always stops the parser"),
    };
    let (e, count) = lower_expr(&tree, &m.tables);
    let env: TypeEnv = scope_at(a, pos);
    let start = env
        .values
        .values()
        .flat_map(|v| v.scheme.free_vars())
        .max()
        .map_or(0, |v| v.saturating_add(1));
    let (t, _) = infer_expr(&env, &e, count, start);
    Ok(Printer::new().print(&t))
}
