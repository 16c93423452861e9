//! Typing environments and the prelude.

use super::types::{Scheme, Type};
use crate::position::{Position, Range};
use im::OrdMap;
use once_cell::sync::Lazy;

/// Where a name was bound. Local ranges are stored relative to the start of
/// the toplevel phrase that binds them so that cached environments stay
/// valid when text before the phrase moves.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum DefSite {
    Builtin,
    Local { phrase: usize, range: Range },
}

impl DefSite {
    pub fn local(phrase: usize, phrase_start: Position, range: Range) -> DefSite {
        DefSite::Local { phrase, range: range.relocate(phrase_start, Position::START) }
    }

    /// Absolute range given the current start of every toplevel phrase.
    pub fn resolve(&self, phrase_starts: &[Position]) -> Option<Range> {
        match self {
            DefSite::Builtin => None,
            DefSite::Local { phrase, range } => {
                phrase_starts.get(*phrase).map(|s| range.relocate(Position::START, *s))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValueInfo {
    pub scheme: Scheme,
    pub def: DefSite,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeInfo {
    /// Number of parameters, 0 or 1. The parameter is `Var(0)`.
    pub params: usize,
    pub param_name: Option<String>,
    pub constructors: Vec<String>,
    pub def: DefSite,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstrInfo {
    pub owner: String,
    /// Argument types over the owner's parameter `Var(0)`.
    pub args: Vec<Type>,
    pub def: DefSite,
}

impl ConstrInfo {
    pub fn result(&self, env: &TypeEnv) -> Type {
        let params = env.types.get(&self.owner).map_or(0, |t| t.params);
        Type::Named(self.owner.clone(), (0..params as u32).map(Type::Var).collect())
    }

    /// `args -> result` with the parameter quantified.
    pub fn scheme(&self, env: &TypeEnv) -> Scheme {
        let ty = Type::arrows(self.args.iter().cloned(), self.result(env));
        Scheme::close(&ty)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleInfo {
    pub values: OrdMap<String, ValueInfo>,
    pub def: DefSite,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TypeEnv {
    pub values: OrdMap<String, ValueInfo>,
    pub types: OrdMap<String, TypeInfo>,
    pub constructors: OrdMap<String, ConstrInfo>,
    pub modules: OrdMap<String, ModuleInfo>,
}

impl TypeEnv {
    pub fn value(&self, name: &str) -> Option<&ValueInfo> {
        self.values.get(name)
    }

    pub fn bind_value(&mut self, name: &str, scheme: Scheme, def: DefSite) {
        self.values.insert(name.to_string(), ValueInfo { scheme, def });
    }

    /// Textual form of a type definition, e.g. `type 'a option = None | Some of 'a`.
    pub fn print_typedef(&self, name: &str) -> Option<String> {
        let info = self.types.get(name)?;
        let head = match &info.param_name {
            Some(p) => format!("type {p} {name}"),
            None => format!("type {name}"),
        };
        if info.constructors.is_empty() {
            return Some(head);
        }
        let cases: Vec<String> = info
            .constructors
            .iter()
            .map(|c| {
                let ci = &self.constructors[c];
                if ci.args.is_empty() {
                    c.clone()
                } else {
                    let mut p = super::types::Printer::new();
                    if let Some(n) = &info.param_name {
                        p.bind(0, n);
                    }
                    let args: Vec<String> = ci
                        .args
                        .iter()
                        .map(|a| {
                            let s = p.print(a);
                            if matches!(a, Type::Arrow(..)) {
                                format!("({s})")
                            } else {
                                s
                            }
                        })
                        .collect();
                    format!("{c} of {}", args.join(" * "))
                }
            })
            .collect();
        Some(format!("{head} = {}", cases.join(" | ")))
    }
}

/// Names bound by the prelude for binary operators.
pub fn operator_name(op: super::ast::BinOp) -> String {
    format!("({})", op.symbol())
}

fn prelude_env() -> TypeEnv {
    let mut env = TypeEnv::default();
    for base in ["int", "bool", "string"] {
        env.types.insert(
            base.into(),
            TypeInfo { params: 0, param_name: None, constructors: vec![], def: DefSite::Builtin },
        );
    }
    let a = Type::Var(0);
    let b = Type::Var(1);
    let list = |t: Type| Type::named("list", vec![t]);
    env.types.insert(
        "list".into(),
        TypeInfo {
            params: 1,
            param_name: Some("'a".into()),
            constructors: vec!["Nil".into(), "Cons".into()],
            def: DefSite::Builtin,
        },
    );
    env.types.insert(
        "option".into(),
        TypeInfo {
            params: 1,
            param_name: Some("'a".into()),
            constructors: vec!["None".into(), "Some".into()],
            def: DefSite::Builtin,
        },
    );
    let ctor = |owner: &str, args: Vec<Type>| ConstrInfo { owner: owner.into(), args, def: DefSite::Builtin };
    env.constructors.insert("Nil".into(), ctor("list", vec![]));
    env.constructors.insert("Cons".into(), ctor("list", vec![a.clone(), list(a.clone())]));
    env.constructors.insert("None".into(), ctor("option", vec![]));
    env.constructors.insert("Some".into(), ctor("option", vec![a.clone()]));
    let builtin = |env: &mut TypeEnv, name: &str, ty: Type| env.bind_value(name, Scheme::close(&ty), DefSite::Builtin);
    builtin(
        &mut env,
        "map",
        Type::arrows([Type::arrow(a.clone(), b.clone()), list(a.clone())], list(b.clone())),
    );
    builtin(&mut env, "length", Type::arrow(list(a.clone()), Type::Int));
    for op in ["+", "-", "*"] {
        builtin(&mut env, &format!("({op})"), Type::arrows([Type::Int, Type::Int], Type::Int));
    }
    for op in ["<", "="] {
        builtin(&mut env, &format!("({op})"), Type::arrows([Type::Int, Type::Int], Type::Bool));
    }
    builtin(&mut env, "show", Type::arrow(Type::Int, Type::String));
    env
}

static PRELUDE: Lazy<TypeEnv> = Lazy::new(prelude_env);

/// The built-in environment.
pub fn prelude() -> TypeEnv {
    PRELUDE.clone()
}
