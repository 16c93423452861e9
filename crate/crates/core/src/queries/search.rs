use super::{Analysis, CompletionEntry, EntryKind};
use crate::typer::{Printer, Scheme, Type};
use thiserror::Error;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum SearchError {
    #[error("empty query")]
    Empty,
    #[error("malformed query term `{0}`: expected -name or +name")]
    BadTerm(String),
    #[error("unknown type {0}")]
    UnknownType(String),
}

/// Heads occurring in `t`, with their polarity (`true` for positive).
fn occurrences(t: &Type, positive: bool, out: &mut Vec<(String, bool)>) {
    match t {
        Type::Arrow(a, b) => {
            occurrences(a, !positive, out);
            occurrences(b, positive, out);
        }
        Type::Named(n, args) => {
            out.push((n.clone(), positive));
            args.iter().for_each(|x| occurrences(x, positive, out));
        }
        Type::Var(_) => {}
        t => out.push((t.head().unwrap().to_string(), positive)),
    }
}

/// Values and constructors whose type mentions each queried head at the
/// requested polarity, sorted by name.
pub fn polarity_search(a: &Analysis, query: &str) -> Result<Vec<CompletionEntry>, SearchError> {
    let env = &a.global_env;
    let mut terms = Vec::new();
    for term in query.split_whitespace() {
        let (positive, name) = match term.split_at(1) {
            ("+", n) if !n.is_empty() => (true, n),
            ("-", n) if !n.is_empty() => (false, n),
            _ => return Err(SearchError::BadTerm(term.to_string())),
        };
        if !env.types.contains_key(name) {
            return Err(SearchError::UnknownType(name.to_string()));
        }
        terms.push((name.to_string(), positive));
    }
    if terms.is_empty() {
        return Err(SearchError::Empty);
    }
    let matches = |s: &Scheme| {
        let mut occ = Vec::new();
        occurrences(&s.ty, true, &mut occ);
        terms.iter().all(|t| occ.contains(t))
    };
    let mut out = Vec::new();
    for (name, v) in env.values.iter().filter(|(n, _)| !n.starts_with('(')) {
        if matches(&v.scheme) {
            out.push(CompletionEntry { name: name.clone(), ty: Printer::new().print(&v.scheme.ty), kind: EntryKind::Value, rank: 0 });
        }
    }
    for (name, c) in env.constructors.iter() {
        let s = c.scheme(env);
        if matches(&s) {
            out.push(CompletionEntry { name: name.clone(), ty: Printer::new().print(&s.ty), kind: EntryKind::Constructor, rank: 0 });
        }
    }
    out.sort_by(|x, y| x.name.cmp(&y.name));
    Ok(out)
}
