use super::Analysis;
use crate::position::{Position, Range};
use crate::typer::ast::*;
use crate::typer::exhaust::{signature, useful};
use crate::typer::{missing_cases, print_type, ExhaustError, Pat, Type};
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TextEdit {
    pub range: Range,
    pub text: String,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum DestructError {
    #[error("nothing to destruct here")]
    NoNode,
    #[error("destruct is not supported on {0}")]
    Unsupported(&'static str),
    #[error("the type {0} is not a variant type")]
    NotEnumerable(String),
    #[error("nothing to do: the match is already exhaustive")]
    NothingToDo,
}

impl From<ExhaustError> for DestructError {
    fn from(e: ExhaustError) -> Self {
        match e {
            ExhaustError::CannotEnumerate(t) => DestructError::NotEnumerable(t),
        }
    }
}

fn wildcards(c: &str, arity: usize, ty: &Type) -> Pat {
    match ty {
        Type::Bool => Pat::Bool(c == "true"),
        _ => Pat::Constr(c.to_string(), vec![Pat::Wild; arity]),
    }
}

/// Constructors of `ty` as depth-one patterns.
fn cases_of(a: &Analysis, ty: &Type) -> Result<Vec<Pat>, DestructError> {
    match signature(ty, &a.global_env) {
        Some(sig) if !sig.is_empty() => Ok(sig.iter().map(|(c, args)| wildcards(c, args.len(), ty)).collect()),
        _ => Err(DestructError::NotEnumerable(print_type(ty))),
    }
}

fn clause_text(p: &str, body: &str) -> String {
    format!("| {p} -> {body}")
}

fn slice(a: &Analysis, r: Range) -> &str {
    a.buffer.get(r.start.offset..r.end.offset).unwrap_or("")
}

/// Prints `p` with the node `target` replaced by `with`.
fn render(p: &Pattern, target: NodeId, with: &Pat, arg: bool) -> String {
    let paren = |s: String, needed: bool| if needed && arg { format!("({s})") } else { s };
    if p.id == target {
        let nested = matches!(with, Pat::Constr(_, xs) if !xs.is_empty());
        return paren(with.to_string(), nested);
    }
    match &p.kind {
        PatternKind::Wildcard => "_".into(),
        PatternKind::Var(x) => x.clone(),
        PatternKind::Int(n) => paren(n.to_string(), *n < 0),
        PatternKind::Bool(b) => b.to_string(),
        PatternKind::Constr(c, args) => {
            let mut s = c.text.clone();
            for x in args {
                s.push(' ');
                s.push_str(&render(x, target, with, true));
            }
            paren(s, !args.is_empty())
        }
    }
}

fn replace_pat(p: &Pattern, target: NodeId, with: &Pat) -> Pat {
    if p.id == target {
        return with.clone();
    }
    match &p.kind {
        PatternKind::Constr(c, args) => {
            Pat::Constr(c.text.clone(), args.iter().map(|x| replace_pat(x, target, with)).collect())
        }
        _ => Pat::of_pattern(p),
    }
}

fn contains_pattern(p: &Pattern, id: NodeId) -> bool {
    let mut found = false;
    walk_pattern(p, &mut |n| found |= n.id() == id);
    found
}

/// Match expression and clause index owning pattern `id`.
fn owner<'a>(phrase: &'a Phrase, id: NodeId) -> Option<(&'a Expr, usize)> {
    let mut out = None;
    walk_phrase(phrase, &mut |n| {
        if let NodeRef::Expr(e) = n {
            if let ExprKind::Match(_, clauses) = &e.kind {
                if let Some(k) = clauses.iter().position(|c| contains_pattern(&c.pattern, id)) {
                    out = Some((e, k));
                }
            }
        }
    });
    out
}

fn is_phrase_body(p: &Phrase, id: NodeId) -> bool {
    match &p.kind {
        PhraseKind::LetDef { body, .. } => body.id == id,
        PhraseKind::ExprPhrase(e) => e.id == id,
        PhraseKind::ModuleDef { phrases, .. } => phrases.iter().any(|q| is_phrase_body(q, id)),
        PhraseKind::TypeDef { .. } => false,
    }
}

/// Case analysis on the node selected by `[start, end]`.
pub fn destruct(a: &Analysis, start: Position, end: Position) -> Result<TextEdit, DestructError> {
    let phrase_idx = a.phrase_at(start).ok_or(DestructError::NoNode)?;
    let phrase = &a.ast.phrases[phrase_idx];
    let sel = Range::new(start, end.max(start));
    let mut innermost = None;
    walk_phrase(phrase, &mut |n| {
        if n.range().contains_range(&sel) {
            innermost = Some(n);
        }
    });
    let node = innermost.ok_or(DestructError::NoNode)?;
    let ty_of = |id: NodeId| a.node_type(phrase_idx, id).map(|t| t.ty.clone());
    match node {
        NodeRef::Binder(_) => Err(DestructError::Unsupported("a binding name")),
        NodeRef::Pattern(p) => {
            if !matches!(p.kind, PatternKind::Wildcard | PatternKind::Var(_)) {
                return Err(DestructError::Unsupported("a constructor pattern"));
            }
            let (m, k) = owner(phrase, p.id).ok_or(DestructError::NoNode)?;
            let ExprKind::Match(s, clauses) = &m.kind else { unreachable!() };
            let ty = ty_of(p.id).ok_or(DestructError::NoNode)?;
            let cases = cases_of(a, &ty)?;
            let clause = &clauses[k];
            let scrut = ty_of(s.id).unwrap_or(Type::Var(0));
            let rows: Vec<Vec<Pat>> = clauses[..k].iter().map(|c| vec![Pat::of_pattern(&c.pattern)]).collect();
            let body = match slice(a, clause.body.range).trim() {
                "" => "_hole",
                b => b,
            };
            let parts: Vec<String> = cases
                .iter()
                .filter(|c| {
                    let q = replace_pat(&clause.pattern, p.id, c);
                    useful(&rows, &[q], std::slice::from_ref(&scrut), &a.global_env)
                })
                .map(|c| render(&clause.pattern, p.id, c, false))
                .collect();
            if parts.is_empty() {
                return Err(DestructError::NothingToDo);
            }
            let text = parts.iter().map(|q| format!("{q} -> {body}")).collect::<Vec<_>>().join(" | ");
            Ok(TextEdit { range: Range::new(clause.pattern.range.start, clause.body.range.end), text })
        }
        NodeRef::Expr(e) => match &e.kind {
            ExprKind::Match(s, clauses) => {
                let ty = ty_of(s.id).ok_or(DestructError::NoNode)?;
                let pats: Vec<Pat> = clauses.iter().map(|c| Pat::of_pattern(&c.pattern)).collect();
                let missing = missing_cases(&pats, &ty, &a.global_env)?;
                if missing.is_empty() {
                    return Err(DestructError::NothingToDo);
                }
                let text: Vec<String> = missing.iter().map(|m| clause_text(&m.to_string(), "_hole")).collect();
                Ok(TextEdit { range: Range::point(e.range.end), text: format!(" {}", text.join(" ")) })
            }
            _ => {
                let ty = ty_of(e.id).ok_or(DestructError::NoNode)?;
                if let Type::Var(_) = ty {
                    return Err(DestructError::NotEnumerable(print_type(&ty)));
                }
                let cases = cases_of(a, &ty)?;
                let arms: Vec<String> = cases.iter().map(|c| clause_text(&c.to_string(), "_hole")).collect();
                let src = slice(a, e.range).trim();
                let src = if src.is_empty() { "_hole" } else { src };
                let text = format!("match {src} with {}", arms.join(" "));
                let text = if is_phrase_body(phrase, e.id) { text } else { format!("({text})") };
                Ok(TextEdit { range: e.range, text })
            }
        },
    }
}
