//! Types, schemes, persistent substitutions and unification.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Type {
    Var(u32),
    Int,
    Bool,
    String,
    Arrow(Box<Type>, Box<Type>),
    /// A user or prelude type constructor with at most one argument.
    Named(String, Vec<Type>),
}

impl Type {
    pub fn arrow(a: Type, b: Type) -> Type {
        Type::Arrow(Box::new(a), Box::new(b))
    }

    pub fn named(name: &str, args: Vec<Type>) -> Type {
        debug_assert!(args.len() <= 1);
        Type::Named(name.to_string(), args)
    }

    /// `a1 -> a2 -> ... -> r`.
    pub fn arrows(args: impl IntoIterator<Item = Type, IntoIter: DoubleEndedIterator>, r: Type) -> Type {
        args.into_iter().rev().fold(r, |acc, a| Type::arrow(a, acc))
    }

    /// Free variables in order of first appearance.
    pub fn vars(&self) -> Vec<u32> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<u32>) {
        match self {
            Type::Var(v) => {
                if !out.contains(v) {
                    out.push(*v)
                }
            }
            Type::Arrow(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Type::Named(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
            _ => {}
        }
    }

    pub fn contains_var(&self, v: u32) -> bool {
        match self {
            Type::Var(w) => *w == v,
            Type::Arrow(a, b) => a.contains_var(v) || b.contains_var(v),
            Type::Named(_, args) => args.iter().any(|a| a.contains_var(v)),
            _ => false,
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Type::Arrow(a, b) => 1 + a.depth().max(b.depth()),
            Type::Named(_, args) => 1 + args.iter().map(Type::depth).max().unwrap_or(0),
            _ => 1,
        }
    }

    /// Replaces variables by `f(v)` when it returns `Some`.
    pub fn map_vars(&self, f: &impl Fn(u32) -> Option<Type>) -> Type {
        match self {
            Type::Var(v) => f(*v).unwrap_or(Type::Var(*v)),
            Type::Arrow(a, b) => Type::arrow(a.map_vars(f), b.map_vars(f)),
            Type::Named(n, args) => Type::Named(n.clone(), args.iter().map(|a| a.map_vars(f)).collect()),
            t => t.clone(),
        }
    }

    /// Head name used by polarity search: `int`, `bool`, `string`, a named
    /// type, or `None` for variables and arrows.
    pub fn head(&self) -> Option<&str> {
        match self {
            Type::Int => Some("int"),
            Type::Bool => Some("bool"),
            Type::String => Some("string"),
            Type::Named(n, _) => Some(n),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Scheme {
    pub vars: Vec<u32>,
    pub ty: Type,
}

impl Scheme {
    pub fn mono(ty: Type) -> Scheme {
        Scheme { vars: Vec::new(), ty }
    }

    /// Quantifies every variable of `ty` not in `keep`.
    pub fn generalize(ty: Type, keep: &BTreeSet<u32>) -> Scheme {
        let vars = ty.vars().into_iter().filter(|v| !keep.contains(v)).collect();
        Scheme { vars, ty }
    }

    /// Closes `ty` and renumbers its variables from 0 in order of appearance.
    pub fn close(ty: &Type) -> Scheme {
        let vars = ty.vars();
        let ren: HashMap<u32, u32> = vars.iter().enumerate().map(|(i, v)| (*v, i as u32)).collect();
        Scheme { vars: (0..vars.len() as u32).collect(), ty: ty.map_vars(&|v| ren.get(&v).map(|w| Type::Var(*w))) }
    }

    pub fn instantiate(&self, fresh: &mut u32) -> Type {
        if self.vars.is_empty() {
            return self.ty.clone();
        }
        let map: HashMap<u32, Type> = self
            .vars
            .iter()
            .map(|v| {
                *fresh += 1;
                (*v, Type::Var(*fresh - 1))
            })
            .collect();
        self.ty.map_vars(&|v| map.get(&v).cloned())
    }

    pub fn free_vars(&self) -> Vec<u32> {
        self.ty.vars().into_iter().filter(|v| !self.vars.contains(v)).collect()
    }
}

/// Triangular persistent substitution. Bound variables never occur in their
/// own resolved image, and [`Subst::apply`] resolves fully, so applying the
/// result again is the identity.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Subst(im::HashMap<u32, Type>);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mismatch {
    pub left: Type,
    pub right: Type,
    /// Set when the failure is an occurs-check failure.
    pub occurs: bool,
}

impl Subst {
    pub fn new() -> Subst {
        Subst::default()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, v: u32) -> Option<&Type> {
        self.0.get(&v)
    }

    pub fn bound_vars(&self) -> impl Iterator<Item = u32> + '_ {
        self.0.keys().copied()
    }

    /// Resolves the head of `t` only.
    fn walk<'a>(&'a self, mut t: &'a Type) -> &'a Type {
        while let Type::Var(v) = t {
            match self.0.get(v) {
                Some(u) => t = u,
                None => break,
            }
        }
        t
    }

    pub fn apply(&self, t: &Type) -> Type {
        match self.walk(t) {
            Type::Arrow(a, b) => Type::arrow(self.apply(a), self.apply(b)),
            Type::Named(n, args) => Type::Named(n.clone(), args.iter().map(|a| self.apply(a)).collect()),
            t => t.clone(),
        }
    }

    pub fn apply_scheme(&self, s: &Scheme) -> Scheme {
        let inner = Subst(s.vars.iter().fold(self.0.clone(), |m, v| m.without(v)));
        Scheme { vars: s.vars.clone(), ty: inner.apply(&s.ty) }
    }

    fn occurs(&self, v: u32, t: &Type) -> bool {
        match self.walk(t) {
            Type::Var(w) => *w == v,
            Type::Arrow(a, b) => self.occurs(v, a) || self.occurs(v, b),
            Type::Named(_, args) => args.iter().any(|a| self.occurs(v, a)),
            _ => false,
        }
    }

    fn unify_in(&self, a: &Type, b: &Type) -> Result<Subst, bool> {
        match (self.walk(a), self.walk(b)) {
            (Type::Var(x), Type::Var(y)) if x == y => Ok(self.clone()),
            (Type::Var(x), t) | (t, Type::Var(x)) => {
                if self.occurs(*x, t) {
                    Err(true)
                } else {
                    Ok(Subst(self.0.update(*x, t.clone())))
                }
            }
            (Type::Int, Type::Int) | (Type::Bool, Type::Bool) | (Type::String, Type::String) => Ok(self.clone()),
            (Type::Arrow(a1, b1), Type::Arrow(a2, b2)) => self.unify_in(a1, a2)?.unify_in(b1, b2),
            (Type::Named(n1, xs), Type::Named(n2, ys)) if n1 == n2 && xs.len() == ys.len() => {
                xs.iter().zip(ys).try_fold(self.clone(), |s, (x, y)| s.unify_in(x, y))
            }
            _ => Err(false),
        }
    }
}

/// Most general unifier extending `s`. On failure the mismatch carries both
/// sides resolved under `s`; `s` itself is untouched.
pub fn unify(a: &Type, b: &Type, s: &Subst) -> Result<Subst, Mismatch> {
    s.unify_in(a, b).map_err(|occurs| Mismatch { left: s.apply(a), right: s.apply(b), occurs })
}

/// Names variables `'a`, `'b`, ... in order of first appearance. One
/// printer is shared when several types must agree on names.
#[derive(Default)]
pub struct Printer {
    names: HashMap<u32, String>,
}

fn var_name(i: usize) -> String {
    let letter = (b'a' + (i % 26) as u8) as char;
    if i < 26 {
        format!("'{letter}")
    } else {
        format!("'{letter}{}", i / 26)
    }
}

impl Printer {
    pub fn new() -> Printer {
        Printer::default()
    }

    /// Forces the printed name of `v`.
    pub fn bind(&mut self, v: u32, name: &str) {
        self.names.insert(v, name.to_string());
    }

    fn name(&mut self, v: u32) -> String {
        let n = self.names.len();
        self.names.entry(v).or_insert_with(|| var_name(n)).clone()
    }

    pub fn print(&mut self, t: &Type) -> String {
        let mut s = String::new();
        self.write(&mut s, t, false);
        s
    }

    fn write(&mut self, out: &mut String, t: &Type, arrow_arg: bool) {
        match t {
            Type::Var(v) => out.push_str(&self.name(*v)),
            Type::Int => out.push_str("int"),
            Type::Bool => out.push_str("bool"),
            Type::String => out.push_str("string"),
            Type::Arrow(a, b) => {
                if arrow_arg {
                    out.push('(');
                }
                self.write(out, a, true);
                out.push_str(" -> ");
                self.write(out, b, false);
                if arrow_arg {
                    out.push(')');
                }
            }
            Type::Named(n, args) => {
                for a in args {
                    let paren = matches!(a, Type::Arrow(..));
                    if paren {
                        out.push('(');
                    }
                    self.write(out, a, false);
                    if paren {
                        out.push(')');
                    }
                    out.push(' ');
                }
                let _ = write!(out, "{n}");
            }
        }
    }
}

/// Prints a standalone type.
pub fn print_type(t: &Type) -> String {
    Printer::new().print(t)
}
