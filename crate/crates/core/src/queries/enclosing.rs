use super::{nodes_at, Analysis};
use crate::position::{Position, Range};
use crate::typer::{NodeType, Printer, Type, TypeEnv};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enclosing {
    pub range: Range,
    pub ty: String,
    /// Closed type, reported for fake or unconstrained nodes.
    pub generalized: Option<String>,
    pub tail: &'static str,
}

pub(crate) fn print_at_verbosity(t: &Type, env: &TypeEnv, verbosity: u32) -> String {
    if verbosity >= 1 {
        if let Type::Named(n, _) = t {
            if let Some(def) = env.print_typedef(n) {
                return def;
            }
        }
    }
    Printer::new().print(t)
}

fn describe(n: &NodeType, env: &TypeEnv, verbosity: u32) -> (String, Option<String>) {
    let ty = print_at_verbosity(&n.ty, env, verbosity);
    let generalized = n.generalized.as_ref().map(|s| print_at_verbosity(&s.ty, env, verbosity));
    (ty, generalized)
}

/// Innermost-to-outermost typed nodes around `pos`, starting at `index`.
pub fn type_enclosing(a: &Analysis, pos: Position, index: usize, verbosity: u32) -> Vec<Enclosing> {
    let Some(phrase) = a.phrase_at(pos) else {
        return Vec::new();
    };
    let env = &a.global_env;
    let mut chain: Vec<Enclosing> = Vec::new();
    for n in nodes_at(a, phrase, pos).into_iter().rev() {
        let Some(t) = a.node_type(phrase, n.id()) else { continue };
        let range = n.range();
        if let Some(last) = chain.last() {
            // Keep only strictly larger ranges; the innermost node wins ties.
            if !(range.contains_range(&last.range) && range != last.range) {
                continue;
            }
        }
        let (ty, generalized) = describe(t, env, verbosity);
        chain.push(Enclosing { range, ty, generalized, tail: "no" });
    }
    chain.into_iter().skip(index).collect()
}
