use super::{nodes_at, Analysis};
use crate::position::{Position, Range};
use crate::typer::ast::{ExprKind, NodeRef, PatternKind, PhraseKind};
use crate::typer::env::DefSite;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Located {
    At(Range),
    Builtin(String),
    NotFound,
}

fn resolve(a: &Analysis, def: &DefSite, name: &str) -> Located {
    match def.resolve(&a.phrase_starts()) {
        Some(r) => Located::At(r),
        None if *def == DefSite::Builtin => Located::Builtin(name.to_string()),
        None => Located::NotFound,
    }
}

/// Definition site of the name under `pos`.
pub fn locate(a: &Analysis, pos: Position) -> Located {
    let Some(phrase) = a.phrase_at(pos) else {
        return Located::NotFound;
    };
    // Binding occurrences of toplevel names and type declarations.
    let mut decls = vec![];
    collect_decls(&a.ast.phrases[phrase].kind, &mut decls);
    if let Some(r) = decls.into_iter().find(|r| r.contains(pos)) {
        return Located::At(r);
    }
    let env = a.env_at(pos);
    for n in nodes_at(a, phrase, pos).into_iter().rev() {
        let def = a.node_type(phrase, n.id()).and_then(|t| t.def.clone());
        match n {
            NodeRef::Binder(b) => return Located::At(b.range),
            NodeRef::Expr(e) => match &e.kind {
                ExprKind::Var(x) => return def.map_or(Located::NotFound, |d| resolve(a, &d, x)),
                ExprKind::Qualified(m, x) => {
                    if m.range.contains(pos) {
                        return env.modules.get(&m.text).map_or(Located::NotFound, |mi| resolve(a, &mi.def, &m.text));
                    }
                    return def.map_or(Located::NotFound, |d| resolve(a, &d, &x.text));
                }
                ExprKind::Constr(c, _) if c.range.contains(pos) => {
                    return def.map_or(Located::NotFound, |d| resolve(a, &d, &c.text))
                }
                _ => {}
            },
            NodeRef::Pattern(p) => match &p.kind {
                PatternKind::Var(_) => return Located::At(p.range),
                PatternKind::Constr(c, _) if c.range.contains(pos) => {
                    return def.map_or(Located::NotFound, |d| resolve(a, &d, &c.text))
                }
                _ => {}
            },
        }
    }
    Located::NotFound
}

fn collect_decls(k: &PhraseKind, out: &mut Vec<Range>) {
    match k {
        PhraseKind::TypeDef { name, constructors, .. } => {
            out.push(name.range);
            out.extend(constructors.iter().map(|c| c.name.range));
        }
        PhraseKind::ModuleDef { name, phrases } => {
            out.push(name.range);
            phrases.iter().for_each(|p| collect_decls(&p.kind, out));
        }
        _ => {}
    }
}
