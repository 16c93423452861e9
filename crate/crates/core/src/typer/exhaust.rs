//! Pattern usefulness and depth-one exhaustiveness witnesses.

use super::ast::{Pattern, PatternKind};
use super::env::TypeEnv;
use super::types::Type;
use std::fmt;
use thiserror::Error;

/// A pattern stripped of positions and variable names.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Pat {
    Wild,
    Int(i64),
    Bool(bool),
    Constr(String, Vec<Pat>),
}

impl Pat {
    pub fn of_pattern(p: &Pattern) -> Pat {
        match &p.kind {
            PatternKind::Wildcard | PatternKind::Var(_) => Pat::Wild,
            PatternKind::Int(n) => Pat::Int(*n),
            PatternKind::Bool(b) => Pat::Bool(*b),
            PatternKind::Constr(c, args) => Pat::Constr(c.text.clone(), args.iter().map(Pat::of_pattern).collect()),
        }
    }

    /// Whether `self` matches the closed value `v` (a pattern without
    /// wildcards stands for a value).
    pub fn matches(&self, v: &Pat) -> bool {
        match (self, v) {
            (Pat::Wild, _) => true,
            (Pat::Int(a), Pat::Int(b)) => a == b,
            (Pat::Bool(a), Pat::Bool(b)) => a == b,
            (Pat::Constr(c, xs), Pat::Constr(d, ys)) => {
                c == d && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| x.matches(y))
            }
            _ => false,
        }
    }
}

impl fmt::Display for Pat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pat::Wild => write!(f, "_"),
            Pat::Int(n) => write!(f, "{n}"),
            Pat::Bool(b) => write!(f, "{b}"),
            Pat::Constr(c, args) => {
                write!(f, "{c}")?;
                for a in args {
                    match a {
                        Pat::Constr(_, xs) if !xs.is_empty() => write!(f, " ({a})")?,
                        Pat::Int(n) if *n < 0 => write!(f, " ({a})")?,
                        _ => write!(f, " {a}")?,
                    }
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExhaustError {
    #[error("cannot enumerate the cases of type {0}")]
    CannotEnumerate(String),
}

/// Finite signature of a type: constructor names with their argument
/// types, or `None` when the values are not enumerable.
pub fn signature(ty: &Type, env: &TypeEnv) -> Option<Vec<(String, Vec<Type>)>> {
    match ty {
        Type::Bool => Some(vec![("true".into(), vec![]), ("false".into(), vec![])]),
        Type::Named(n, targs) => {
            let info = env.types.get(n)?;
            Some(
                info.constructors
                    .iter()
                    .filter_map(|c| env.constructors.get(c).map(|ci| (c, ci)))
                    .map(|(c, ci)| {
                        let args = ci
                            .args
                            .iter()
                            .map(|a| a.map_vars(&|v| targs.get(v as usize).cloned().or(Some(Type::Var(u32::MAX)))))
                            .collect();
                        (c.clone(), args)
                    })
                    .collect(),
            )
        }
        _ => None,
    }
}

fn head_of(p: &Pat) -> Option<(String, usize)> {
    match p {
        Pat::Constr(c, a) => Some((c.clone(), a.len())),
        Pat::Bool(b) => Some((b.to_string(), 0)),
        _ => None,
    }
}

fn specialize(row: &[Pat], c: &str, arity: usize) -> Option<Vec<Pat>> {
    let (first, rest) = row.split_first()?;
    let mut out = match first {
        Pat::Wild => vec![Pat::Wild; arity],
        Pat::Constr(d, args) if d == c && args.len() == arity => args.clone(),
        Pat::Bool(b) if b.to_string() == c => vec![],
        _ => return None,
    };
    out.extend_from_slice(rest);
    Some(out)
}

/// Maranget's usefulness: is there a value matched by `v` and by no row of
/// `rows`? `tys` are the column types.
pub fn useful(rows: &[Vec<Pat>], v: &[Pat], tys: &[Type], env: &TypeEnv) -> bool {
    let Some((first, rest)) = v.split_first() else {
        return rows.is_empty();
    };
    let ty = &tys[0];
    let sig = signature(ty, env);
    let specialize_rows = |c: &str, arity: usize, arg_tys: &[Type]| -> (Vec<Vec<Pat>>, Vec<Type>) {
        let rs = rows.iter().filter_map(|r| specialize(r, c, arity)).collect();
        let mut ts = arg_tys.to_vec();
        ts.extend_from_slice(&tys[1..]);
        (rs, ts)
    };
    match first {
        Pat::Constr(..) | Pat::Bool(_) => {
            let (c, arity) = head_of(first).unwrap();
            let arg_tys: Vec<Type> = sig
                .as_ref()
                .and_then(|s| s.iter().find(|(d, _)| *d == c).map(|(_, a)| a.clone()))
                .unwrap_or_else(|| vec![Type::Var(u32::MAX); arity]);
            let (rs, ts) = specialize_rows(&c, arity, &arg_tys);
            let vv = specialize(v, &c, arity).unwrap();
            useful(&rs, &vv, &ts, env)
        }
        Pat::Int(n) => {
            let rs: Vec<Vec<Pat>> = rows
                .iter()
                .filter(|r| matches!(&r[0], Pat::Wild) || r[0] == Pat::Int(*n))
                .map(|r| r[1..].to_vec())
                .collect();
            useful(&rs, rest, &tys[1..], env)
        }
        Pat::Wild => {
            let complete = sig.as_ref().filter(|s| {
                !s.is_empty() && s.iter().all(|(c, _)| rows.iter().any(|r| head_of(&r[0]).is_some_and(|(d, _)| d == *c)))
            });
            match complete {
                Some(s) => s.iter().any(|(c, arg_tys)| {
                    let (rs, ts) = specialize_rows(c, arg_tys.len(), arg_tys);
                    let mut vv = vec![Pat::Wild; arg_tys.len()];
                    vv.extend_from_slice(rest);
                    useful(&rs, &vv, &ts, env)
                }),
                None => {
                    let rs: Vec<Vec<Pat>> =
                        rows.iter().filter(|r| matches!(r[0], Pat::Wild)).map(|r| r[1..].to_vec()).collect();
                    useful(&rs, rest, &tys[1..], env)
                }
            }
        }
    }
}

/// Depth-one patterns not covered by `clauses` over a scrutinee of type
/// `ty`. Empty iff the match is exhaustive.
pub fn missing_cases(clauses: &[Pat], ty: &Type, env: &TypeEnv) -> Result<Vec<Pat>, ExhaustError> {
    let rows: Vec<Vec<Pat>> = clauses.iter().map(|p| vec![p.clone()]).collect();
    let tys = [ty.clone()];
    if let Type::Var(_) = ty {
        return Err(ExhaustError::CannotEnumerate(super::types::print_type(ty)));
    }
    let out = match signature(ty, env) {
        Some(sig) => sig
            .into_iter()
            .map(|(c, args)| match ty {
                Type::Bool => Pat::Bool(c == "true"),
                _ => Pat::Constr(c, vec![Pat::Wild; args.len()]),
            })
            .filter(|w| useful(&rows, std::slice::from_ref(w), &tys, env))
            .collect(),
        None => {
            if useful(&rows, &[Pat::Wild], &tys, env) {
                vec![Pat::Wild]
            } else {
                vec![]
            }
        }
    };
    Ok(out)
}
