//! Error-tolerant Hindley-Milner inference over one toplevel phrase.

use super::ast::*;
use super::env::{ConstrInfo, DefSite, ModuleInfo, TypeEnv, TypeInfo};
use super::types::{unify, Mismatch, Printer, Scheme, Subst, Type};
use crate::diagnostic::{Diagnostic, Phase};
use crate::position::{Position, Range};
use std::collections::{BTreeSet, HashMap};

/// Typing judgment attached to one AST node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeType {
    pub ty: Type,
    /// The node is ill-typed; `ty` is what its context expected.
    pub fake: bool,
    /// The closed type of the node, kept when it is fake or unconstrained.
    pub generalized: Option<Scheme>,
    /// Definition site of the name used by a variable or constructor node.
    pub def: Option<DefSite>,
}

/// Typed nodes of one toplevel phrase indexed by node id.
pub type PhraseNodes = Vec<Option<NodeType>>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhraseTyping {
    pub nodes: PhraseNodes,
    pub diagnostics: Vec<Diagnostic>,
    pub env_after: TypeEnv,
}

#[derive(Clone)]
struct Scope {
    env: TypeEnv,
    /// Monomorphic types of lambda-bound names in scope.
    mono: im::Vector<Type>,
}

struct Infer {
    subst: Subst,
    fresh: u32,
    nodes: Vec<Option<(Type, bool, Option<DefSite>)>>,
    diags: Vec<Diagnostic>,
    phrase: usize,
    phrase_start: Position,
}

impl Infer {
    fn fresh(&mut self) -> Type {
        self.fresh += 1;
        Type::Var(self.fresh - 1)
    }

    fn record(&mut self, id: NodeId, ty: Type, fake: bool, def: Option<DefSite>) {
        let i = id as usize;
        if self.nodes.len() <= i {
            self.nodes.resize(i + 1, None);
        }
        self.nodes[i] = Some((ty, fake, def));
    }

    fn site(&self, range: Range) -> DefSite {
        DefSite::local(self.phrase, self.phrase_start, range)
    }

    fn error(&mut self, range: Range, msg: String) {
        self.diags.push(Diagnostic::new(Phase::Typer, range, msg));
    }

    /// Unifies the type of a subterm with what its context expects,
    /// reporting a mismatch at the subterm.
    fn expect(&mut self, actual: &Type, expected: &Type, range: Range, what: &str) -> bool {
        match unify(actual, expected, &self.subst) {
            Ok(s) => {
                self.subst = s;
                true
            }
            Err(Mismatch { left, right, .. }) => {
                let mut p = Printer::new();
                let (a, b) = (p.print(&left), p.print(&right));
                let msg = match what {
                    "pattern" => {
                        format!("This pattern matches values of type {a} but a pattern was expected which matches values of type {b}")
                    }
                    _ => format!("This expression has type {a} but an expression was expected of type {b}"),
                };
                self.error(range, msg);
                false
            }
        }
    }

    fn mono_vars(&self, scope: &Scope) -> BTreeSet<u32> {
        scope.mono.iter().flat_map(|t| self.subst.apply(t).vars()).collect()
    }

    fn bind(&mut self, scope: &mut Scope, b: &Binder, ty: Type) {
        self.record(b.id, ty.clone(), false, None);
        if !b.is_wildcard() {
            scope.env.bind_value(&b.name, Scheme::mono(ty.clone()), self.site(b.range));
            scope.mono.push_back(ty);
        }
    }

    fn lookup_constr(&mut self, name: &Name, env: &TypeEnv) -> Option<(ConstrInfo, Vec<Type>, Type)> {
        let Some(c) = env.constructors.get(&name.text) else {
            self.error(name.range, format!("Unbound constructor {}", name.text));
            return None;
        };
        let params = env.types.get(&c.owner).map_or(0, |t| t.params);
        let inst: Vec<Type> = (0..params).map(|_| self.fresh()).collect();
        let mut map: HashMap<u32, Type> = inst.iter().enumerate().map(|(i, t)| (i as u32, t.clone())).collect();
        for a in &c.args {
            for v in a.vars() {
                if !map.contains_key(&v) {
                    let f = self.fresh();
                    map.insert(v, f);
                }
            }
        }
        let args = c.args.iter().map(|a| a.map_vars(&|v| map.get(&v).cloned())).collect();
        let result = Type::Named(c.owner.clone(), inst.clone());
        Some((c.clone(), args, result))
    }

    /// `let [rec] name params = value` shared by toplevel and local lets.
    /// Returns the type of the bound name before generalization.
    fn let_binding(&mut self, scope: &Scope, rec: bool, name: &Binder, params: &[Binder], value: &Expr) -> Type {
        let mut inner = scope.clone();
        let self_ty = self.fresh();
        if rec && !name.is_wildcard() {
            inner.env.bind_value(&name.name, Scheme::mono(self_ty.clone()), self.site(name.range));
            inner.mono.push_back(self_ty.clone());
        }
        let mut ptys = Vec::new();
        for p in params {
            let t = self.fresh();
            self.bind(&mut inner, p, t.clone());
            ptys.push(t);
        }
        let body = self.expr(&inner, value);
        let ty = Type::arrows(ptys, body);
        if rec {
            self.expect(&ty, &self_ty, name.range, "expression");
        }
        self.record(name.id, ty.clone(), false, None);
        ty
    }

    fn expr(&mut self, scope: &Scope, e: &Expr) -> Type {
        let (ty, fake, def) = self.expr_kind(scope, e);
        self.record(e.id, ty.clone(), fake, def);
        ty
    }

    fn expr_kind(&mut self, scope: &Scope, e: &Expr) -> (Type, bool, Option<DefSite>) {
        match &e.kind {
            ExprKind::Var(x) => match scope.env.value(x) {
                Some(v) => (v.scheme.instantiate(&mut self.fresh), false, Some(v.def.clone())),
                None => {
                    self.error(e.range, format!("Unbound value {x}"));
                    (self.fresh(), true, None)
                }
            },
            ExprKind::Qualified(m, x) => {
                let found = scope.env.modules.get(&m.text).map(|mi| mi.values.get(&x.text).cloned());
                match found {
                    Some(Some(v)) => (v.scheme.instantiate(&mut self.fresh), false, Some(v.def)),
                    Some(None) => {
                        self.error(x.range, format!("Unbound value {}.{}", m.text, x.text));
                        (self.fresh(), true, None)
                    }
                    None => {
                        self.error(m.range, format!("Unbound module {}", m.text));
                        (self.fresh(), true, None)
                    }
                }
            }
            ExprKind::Int(_) => (Type::Int, false, None),
            ExprKind::Bool(_) => (Type::Bool, false, None),
            ExprKind::Str(_) => (Type::String, false, None),
            ExprKind::Placeholder => (self.fresh(), false, None),
            ExprKind::Fun(params, body) => {
                let mut inner = scope.clone();
                let mut ptys = Vec::new();
                for p in params {
                    let t = self.fresh();
                    self.bind(&mut inner, p, t.clone());
                    ptys.push(t);
                }
                let b = self.expr(&inner, body);
                (Type::arrows(ptys, b), false, None)
            }
            ExprKind::Apply(f, a) => {
                let tf = self.expr(scope, f);
                let ta = self.expr(scope, a);
                match self.subst.apply(&tf) {
                    Type::Arrow(p, r) => {
                        let ok = self.expect(&ta, &p, a.range, "expression");
                        (*r, !ok, None)
                    }
                    Type::Var(_) => {
                        let r = self.fresh();
                        let ok = self.expect(&tf, &Type::arrow(ta, r.clone()), f.range, "expression");
                        (r, !ok, None)
                    }
                    other => {
                        let shown = Printer::new().print(&other);
                        self.error(
                            f.range,
                            format!("This expression has type {shown}. This is not a function; it cannot be applied."),
                        );
                        (self.fresh(), true, None)
                    }
                }
            }
            ExprKind::BinOp(op, a, b) => {
                let ta = self.expr(scope, a);
                let tb = self.expr(scope, b);
                let ok_a = self.expect(&ta, &Type::Int, a.range, "expression");
                let ok_b = self.expect(&tb, &Type::Int, b.range, "expression");
                let r = match op {
                    BinOp::Lt | BinOp::Eq => Type::Bool,
                    _ => Type::Int,
                };
                (r, !(ok_a && ok_b), None)
            }
            ExprKind::If(c, t, f) => {
                let tc = self.expr(scope, c);
                let ok_c = self.expect(&tc, &Type::Bool, c.range, "expression");
                let tt = self.expr(scope, t);
                let tf = self.expr(scope, f);
                let ok_f = self.expect(&tf, &tt, f.range, "expression");
                (tt, !(ok_c && ok_f), None)
            }
            ExprKind::Match(s, clauses) => {
                let ts = self.expr(scope, s);
                let r = self.fresh();
                let mut ok = true;
                for c in clauses {
                    let mut inner = scope.clone();
                    ok &= self.pattern(&mut inner, &c.pattern, &ts);
                    let tb = self.expr(&inner, &c.body);
                    ok &= self.expect(&tb, &r, c.body.range, "expression");
                }
                (r, !ok, None)
            }
            ExprKind::Let { rec, name, params, value, body } => {
                let ty = self.let_binding(scope, *rec, name, params, value);
                let keep = self.mono_vars(scope);
                let mut inner = scope.clone();
                if !name.is_wildcard() {
                    let scheme = Scheme::generalize(self.subst.apply(&ty), &keep);
                    inner.env.bind_value(&name.name, scheme, self.site(name.range));
                }
                (self.expr(&inner, body), false, None)
            }
            ExprKind::Constr(name, args) => {
                let Some((info, arg_tys, result)) = self.lookup_constr(name, &scope.env) else {
                    for a in args {
                        self.expr(scope, a);
                    }
                    return (self.fresh(), true, None);
                };
                let def = Some(info.def.clone());
                if arg_tys.len() != args.len() {
                    self.error(
                        e.range,
                        format!(
                            "The constructor {} expects {} argument(s), but is applied here to {} argument(s)",
                            name.text,
                            arg_tys.len(),
                            args.len()
                        ),
                    );
                    for a in args {
                        self.expr(scope, a);
                    }
                    return (result, true, def);
                }
                let mut ok = true;
                for (a, t) in args.iter().zip(&arg_tys) {
                    let ta = self.expr(scope, a);
                    ok &= self.expect(&ta, t, a.range, "expression");
                }
                (result, !ok, def)
            }
            ExprKind::Annot(x, te) => {
                let tx = self.expr(scope, x);
                let mut vars = HashMap::new();
                let t = self.type_expr(&scope.env, te, &mut vars, None);
                let ok = self.expect(&tx, &t, x.range, "expression");
                (t, !ok, None)
            }
        }
    }

    fn pattern(&mut self, scope: &mut Scope, p: &Pattern, expected: &Type) -> bool {
        let (ok, def) = match &p.kind {
            PatternKind::Wildcard => (true, None),
            PatternKind::Var(x) => {
                scope.env.bind_value(x, Scheme::mono(expected.clone()), self.site(p.range));
                scope.mono.push_back(expected.clone());
                (true, None)
            }
            PatternKind::Int(_) => (self.expect(&Type::Int, expected, p.range, "pattern"), None),
            PatternKind::Bool(_) => (self.expect(&Type::Bool, expected, p.range, "pattern"), None),
            PatternKind::Constr(name, args) => match self.lookup_constr(name, &scope.env) {
                None => {
                    for a in args {
                        let t = self.fresh();
                        self.pattern(scope, a, &t);
                    }
                    (false, None)
                }
                Some((info, arg_tys, result)) => {
                    let def = Some(info.def.clone());
                    let mut ok = self.expect(&result, expected, p.range, "pattern");
                    if arg_tys.len() != args.len() {
                        self.error(
                            p.range,
                            format!(
                                "The constructor {} expects {} argument(s), but is applied here to {} argument(s)",
                                name.text,
                                arg_tys.len(),
                                args.len()
                            ),
                        );
                        for a in args {
                            let t = self.fresh();
                            self.pattern(scope, a, &t);
                        }
                        ok = false;
                    } else {
                        for (a, t) in args.iter().zip(&arg_tys) {
                            ok &= self.pattern(scope, a, t);
                        }
                    }
                    (ok, def)
                }
            },
        };
        self.record(p.id, expected.clone(), !ok, def);
        ok
    }

    /// Converts a type expression. `param` is the parameter of a type
    /// declaration being checked; other type variables are mapped through
    /// `vars`, allocating fresh ones as needed.
    fn type_expr(
        &mut self,
        env: &TypeEnv,
        t: &TypeExpr,
        vars: &mut HashMap<String, Type>,
        param: Option<&str>,
    ) -> Type {
        match &t.kind {
            TypeExprKind::Hole => self.fresh(),
            TypeExprKind::Var(v) => {
                if param == Some(v.as_str()) {
                    return Type::Var(0);
                }
                if let Some(t) = vars.get(v) {
                    return t.clone();
                }
                if param.is_some() {
                    self.error(t.range, format!("The type variable {v} is unbound in this type declaration"));
                }
                let f = self.fresh();
                vars.insert(v.clone(), f.clone());
                f
            }
            TypeExprKind::Arrow(a, b) => {
                let a = self.type_expr(env, a, vars, param);
                let b = self.type_expr(env, b, vars, param);
                Type::arrow(a, b)
            }
            TypeExprKind::Con(name, args) => {
                let args: Vec<Type> = args.iter().map(|a| self.type_expr(env, a, vars, param)).collect();
                let (base, params) = match name.as_str() {
                    "int" => (Some(Type::Int), 0),
                    "bool" => (Some(Type::Bool), 0),
                    "string" => (Some(Type::String), 0),
                    _ => match env.types.get(name) {
                        Some(info) => (None, info.params),
                        None => {
                            self.error(t.range, format!("Unbound type constructor {name}"));
                            return self.fresh();
                        }
                    },
                };
                if args.len() != params {
                    self.error(
                        t.range,
                        format!(
                            "The type constructor {name} expects {params} argument(s), but is here applied to {} argument(s)",
                            args.len()
                        ),
                    );
                    return self.fresh();
                }
                base.unwrap_or_else(|| Type::Named(name.clone(), args))
            }
        }
    }

    fn typedef(&mut self, env: &mut TypeEnv, name: &Name, param: &Option<Name>, constructors: &[ConstrDecl]) {
        let param_name = param.as_ref().map(|p| p.text.clone());
        let mut info = TypeInfo {
            params: usize::from(param.is_some()),
            param_name: param_name.clone(),
            constructors: Vec::new(),
            def: self.site(name.range),
        };
        // Visible to its own constructors.
        env.types.insert(name.text.clone(), info.clone());
        // Extra variables live above the parameter.
        self.fresh = self.fresh.max(1);
        let mut vars = HashMap::new();
        for c in constructors {
            if info.constructors.contains(&c.name.text) {
                continue;
            }
            let args = c.args.iter().map(|a| self.type_expr(env, a, &mut vars, param_name.as_deref().or(Some("")))).collect();
            info.constructors.push(c.name.text.clone());
            env.constructors.insert(
                c.name.text.clone(),
                ConstrInfo { owner: name.text.clone(), args, def: self.site(c.name.range) },
            );
        }
        env.types.insert(name.text.clone(), info);
    }

    /// Infers a phrase, extending `scope`. Value bindings made by the
    /// phrase are also added to `exports`.
    fn phrase(&mut self, scope: &mut Scope, p: &Phrase, exports: &mut im::OrdMap<String, super::env::ValueInfo>) {
        match &p.kind {
            PhraseKind::LetDef { rec, name, params, body } => {
                let ty = self.let_binding(scope, *rec, name, params, body);
                if !name.is_wildcard() {
                    let scheme = Scheme::close(&self.subst.apply(&ty));
                    let def = self.site(name.range);
                    scope.env.bind_value(&name.name, scheme.clone(), def.clone());
                    exports.insert(name.name.clone(), super::env::ValueInfo { scheme, def });
                }
            }
            PhraseKind::TypeDef { name, param, constructors } => self.typedef(&mut scope.env, name, param, constructors),
            PhraseKind::ModuleDef { name, phrases } => {
                let mut inner = scope.clone();
                let mut values = im::OrdMap::new();
                for q in phrases {
                    self.phrase(&mut inner, q, &mut values);
                }
                // Types and constructors are global; values stay qualified.
                scope.env.types = inner.env.types;
                scope.env.constructors = inner.env.constructors;
                scope.env.modules = inner.env.modules;
                scope.env.modules.insert(name.text.clone(), ModuleInfo { values, def: self.site(name.range) });
            }
            PhraseKind::ExprPhrase(e) => {
                self.expr(scope, e);
            }
        }
    }
}

/// Types one toplevel phrase. `index` is its position in the buffer, used
/// for definition sites.
pub fn infer_phrase(env: &TypeEnv, p: &Phrase, index: usize) -> PhraseTyping {
    let mut inf = Infer {
        subst: Subst::new(),
        fresh: 0,
        nodes: vec![None; p.node_count as usize],
        diags: Vec::new(),
        phrase: index,
        phrase_start: p.range.start,
    };
    let mut scope = Scope { env: env.clone(), mono: im::Vector::new() };
    inf.phrase(&mut scope, p, &mut im::OrdMap::new());
    let subst = inf.subst;
    let nodes = inf
        .nodes
        .into_iter()
        .map(|n| {
            n.map(|(ty, fake, def)| {
                let ty = subst.apply(&ty);
                let generalized = (fake || matches!(ty, Type::Var(_))).then(|| Scheme::close(&ty));
                NodeType { ty, fake, generalized, def }
            })
        })
        .collect();
    PhraseTyping { nodes, diagnostics: inf.diags, env_after: scope.env }
}

/// Infers a standalone expression in `env`, for type-expression queries.
/// Fresh variables start at `fresh` so that they avoid the free variables
/// of `env`.
pub fn infer_expr(env: &TypeEnv, e: &Expr, node_count: u32, fresh: u32) -> (Type, Vec<Diagnostic>) {
    let mut inf = Infer {
        subst: Subst::new(),
        fresh,
        nodes: vec![None; node_count as usize],
        diags: Vec::new(),
        phrase: usize::MAX,
        phrase_start: Position::START,
    };
    let scope = Scope { env: env.clone(), mono: im::Vector::new() };
    let t = inf.expr(&scope, e);
    (inf.subst.apply(&t), inf.diags)
}
