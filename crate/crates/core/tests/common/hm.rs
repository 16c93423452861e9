//! Reference inference over lowered ASTs: union-find unification with
//! level-based generalization. Shares no code with the typer.

use minimerlin::typer::ast::*;
use std::collections::HashMap;
use std::fmt::Write;

#[derive(Clone, Debug)]
enum Ty {
    Var(usize),
    Con(String, Vec<Ty>),
    /// Bound variable of a scheme.
    Gen(usize),
}

fn arrow(a: Ty, b: Ty) -> Ty {
    Ty::Con("->".into(), vec![a, b])
}

fn con(n: &str) -> Ty {
    Ty::Con(n.into(), vec![])
}

#[derive(Clone)]
struct Scheme {
    n: usize,
    ty: Ty,
}

enum Cell {
    Unbound(u32),
    Link(Ty),
}

#[derive(Clone)]
struct Ctor {
    owner: String,
    /// Args over `Gen(0)` when the owner has a parameter.
    args: Vec<Ty>,
    params: usize,
}

#[derive(Clone, Default)]
struct Env {
    values: HashMap<String, Scheme>,
    modules: HashMap<String, HashMap<String, Scheme>>,
}

pub struct Oracle {
    cells: Vec<Cell>,
    level: u32,
    ctors: HashMap<String, Ctor>,
    types: HashMap<String, usize>,
}

pub type OracleError = String;

impl Oracle {
    fn new() -> Oracle {
        let mut o = Oracle { cells: Vec::new(), level: 0, ctors: HashMap::new(), types: HashMap::new() };
        for (n, p) in [("int", 0), ("bool", 0), ("string", 0), ("list", 1), ("option", 1)] {
            o.types.insert(n.into(), p);
        }
        let a = Ty::Gen(0);
        let list = |t: Ty| Ty::Con("list".into(), vec![t]);
        let c = |owner: &str, args: Vec<Ty>| Ctor { owner: owner.into(), args, params: 1 };
        o.ctors.insert("Nil".into(), c("list", vec![]));
        o.ctors.insert("Cons".into(), c("list", vec![a.clone(), list(a.clone())]));
        o.ctors.insert("None".into(), c("option", vec![]));
        o.ctors.insert("Some".into(), c("option", vec![a]));
        o
    }

    fn fresh(&mut self) -> Ty {
        self.cells.push(Cell::Unbound(self.level));
        Ty::Var(self.cells.len() - 1)
    }

    fn repr(&self, t: &Ty) -> Ty {
        match t {
            Ty::Var(v) => match &self.cells[*v] {
                Cell::Link(u) => self.repr(u),
                Cell::Unbound(_) => t.clone(),
            },
            _ => t.clone(),
        }
    }

    fn occurs_adjust(&mut self, v: usize, t: &Ty) -> Result<(), OracleError> {
        match self.repr(t) {
            Ty::Var(w) if w == v => Err("occurs check".into()),
            Ty::Var(w) => {
                let lv = match self.cells[v] {
                    Cell::Unbound(l) => l,
                    _ => unreachable!(),
                };
                if let Cell::Unbound(lw) = self.cells[w] {
                    self.cells[w] = Cell::Unbound(lw.min(lv));
                }
                Ok(())
            }
            Ty::Con(_, args) => args.iter().try_for_each(|a| self.occurs_adjust(v, a)),
            Ty::Gen(_) => unreachable!("instantiated types carry no bound variables"),
        }
    }

    fn unify(&mut self, a: &Ty, b: &Ty) -> Result<(), OracleError> {
        match (self.repr(a), self.repr(b)) {
            (Ty::Var(x), Ty::Var(y)) if x == y => Ok(()),
            (Ty::Var(x), t) | (t, Ty::Var(x)) => {
                self.occurs_adjust(x, &t)?;
                self.cells[x] = Cell::Link(t);
                Ok(())
            }
            (Ty::Con(n, xs), Ty::Con(m, ys)) if n == m && xs.len() == ys.len() => {
                xs.iter().zip(&ys).try_for_each(|(x, y)| self.unify(x, y))
            }
            (x, y) => Err(format!("cannot unify {} with {}", self.show(&x), self.show(&y))),
        }
    }

    fn generalize(&mut self, t: &Ty) -> Scheme {
        let mut map = HashMap::new();
        let ty = self.gen_walk(t, &mut map);
        Scheme { n: map.len(), ty }
    }

    fn gen_walk(&mut self, t: &Ty, map: &mut HashMap<usize, usize>) -> Ty {
        match self.repr(t) {
            Ty::Var(v) => match self.cells[v] {
                Cell::Unbound(l) if l > self.level => {
                    let n = map.len();
                    Ty::Gen(*map.entry(v).or_insert(n))
                }
                _ => Ty::Var(v),
            },
            Ty::Con(n, args) => Ty::Con(n, args.iter().map(|a| self.gen_walk(a, map)).collect()),
            g => g,
        }
    }

    fn instantiate(&mut self, s: &Scheme) -> Ty {
        let vars: Vec<Ty> = (0..s.n).map(|_| self.fresh()).collect();
        subst_gen(&s.ty, &vars)
    }

    fn mono(t: Ty) -> Scheme {
        Scheme { n: 0, ty: t }
    }

    fn ctor_type(&mut self, c: &str, arity: usize) -> Result<(Vec<Ty>, Ty), OracleError> {
        let info = self.ctors.get(c).cloned().ok_or_else(|| format!("unbound constructor {c}"))?;
        if info.args.len() != arity {
            return Err(format!("constructor {c} arity"));
        }
        let params: Vec<Ty> = (0..info.params).map(|_| self.fresh()).collect();
        let args = info.args.iter().map(|a| subst_gen(a, &params)).collect();
        Ok((args, Ty::Con(info.owner, params)))
    }

    fn type_expr(&mut self, t: &TypeExpr, vars: &mut HashMap<String, Ty>, fixed: bool) -> Result<Ty, OracleError> {
        Ok(match &t.kind {
            TypeExprKind::Var(v) => match vars.get(v) {
                Some(t) => t.clone(),
                None if fixed => return Err(format!("unbound type variable {v}")),
                None => {
                    let f = self.fresh();
                    vars.insert(v.clone(), f.clone());
                    f
                }
            },
            TypeExprKind::Con(n, args) => {
                let p = *self.types.get(n).ok_or_else(|| format!("unbound type {n}"))?;
                if p != args.len() {
                    return Err(format!("type {n} arity"));
                }
                let args = args.iter().map(|a| self.type_expr(a, vars, fixed)).collect::<Result<_, _>>()?;
                Ty::Con(n.clone(), args)
            }
            TypeExprKind::Arrow(a, b) => arrow(self.type_expr(a, vars, fixed)?, self.type_expr(b, vars, fixed)?),
            TypeExprKind::Hole => return Err("type hole".into()),
        })
    }

    fn binop(op: BinOp) -> (Ty, Ty) {
        match op {
            BinOp::Add | BinOp::Sub | BinOp::Mul => (con("int"), con("int")),
            BinOp::Lt | BinOp::Eq => (con("int"), con("bool")),
        }
    }

    fn lookup(&mut self, env: &Env, x: &str) -> Result<Ty, OracleError> {
        let builtin = |x: &str| -> Option<Scheme> {
            let (a, b) = (Ty::Gen(0), Ty::Gen(1));
            let list = |t: Ty| Ty::Con("list".into(), vec![t]);
            Some(match x {
                "map" => Scheme { n: 2, ty: arrow(arrow(a.clone(), b.clone()), arrow(list(a), list(b))) },
                "length" => Scheme { n: 1, ty: arrow(list(a), con("int")) },
                "show" => Scheme { n: 0, ty: arrow(con("int"), con("string")) },
                _ => return None,
            })
        };
        let s = env.values.get(x).cloned().or_else(|| builtin(x)).ok_or_else(|| format!("unbound {x}"))?;
        Ok(self.instantiate(&s))
    }

    fn pattern(&mut self, p: &Pattern, binds: &mut Vec<(String, Ty)>) -> Result<Ty, OracleError> {
        Ok(match &p.kind {
            PatternKind::Wildcard => self.fresh(),
            PatternKind::Var(x) => {
                let t = self.fresh();
                binds.push((x.clone(), t.clone()));
                t
            }
            PatternKind::Int(_) => con("int"),
            PatternKind::Bool(_) => con("bool"),
            PatternKind::Constr(c, args) => {
                let (targs, res) = self.ctor_type(&c.text, args.len())?;
                for (a, t) in args.iter().zip(&targs) {
                    let pa = self.pattern(a, binds)?;
                    self.unify(&pa, t)?;
                }
                res
            }
        })
    }

    fn lambda(&mut self, env: &Env, params: &[Binder], body: &Expr) -> Result<Ty, OracleError> {
        let mut inner = env.clone();
        let mut ps = Vec::new();
        for b in params {
            let t = self.fresh();
            if !b.is_wildcard() {
                inner.values.insert(b.name.clone(), Oracle::mono(t.clone()));
            }
            ps.push(t);
        }
        let mut t = self.expr(&inner, body)?;
        for p in ps.into_iter().rev() {
            t = arrow(p, t);
        }
        Ok(t)
    }

    /// Types `let [rec] name params = value` one level deeper and returns
    /// the generalized scheme.
    fn let_binding(&mut self, env: &Env, rec: bool, name: &Binder, params: &[Binder], value: &Expr) -> Result<Scheme, OracleError> {
        self.level += 1;
        let mut inner = env.clone();
        let self_ty = self.fresh();
        if rec && !name.is_wildcard() {
            inner.values.insert(name.name.clone(), Oracle::mono(self_ty.clone()));
        }
        let t = self.lambda(&inner, params, value)?;
        if rec {
            self.unify(&self_ty, &t)?;
        }
        self.level -= 1;
        Ok(self.generalize(&t))
    }

    fn expr(&mut self, env: &Env, e: &Expr) -> Result<Ty, OracleError> {
        Ok(match &e.kind {
            ExprKind::Var(x) => self.lookup(env, x)?,
            ExprKind::Qualified(m, x) => {
                let s = env
                    .modules
                    .get(&m.text)
                    .and_then(|vals| vals.get(&x.text))
                    .cloned()
                    .ok_or_else(|| format!("unbound {}.{}", m.text, x.text))?;
                self.instantiate(&s)
            }
            ExprKind::Int(_) => con("int"),
            ExprKind::Bool(_) => con("bool"),
            ExprKind::Str(_) => con("string"),
            ExprKind::Fun(params, body) => self.lambda(env, params, body)?,
            ExprKind::Apply(f, x) => {
                let tf = self.expr(env, f)?;
                let tx = self.expr(env, x)?;
                let r = self.fresh();
                self.unify(&tf, &arrow(tx, r.clone()))?;
                r
            }
            ExprKind::BinOp(op, a, b) => {
                let (arg, res) = Oracle::binop(*op);
                let ta = self.expr(env, a)?;
                self.unify(&ta, &arg)?;
                let tb = self.expr(env, b)?;
                self.unify(&tb, &arg)?;
                res
            }
            ExprKind::If(c, a, b) => {
                let tc = self.expr(env, c)?;
                self.unify(&tc, &con("bool"))?;
                let ta = self.expr(env, a)?;
                let tb = self.expr(env, b)?;
                self.unify(&ta, &tb)?;
                ta
            }
            ExprKind::Match(s, clauses) => {
                let ts = self.expr(env, s)?;
                let r = self.fresh();
                for c in clauses {
                    let mut binds = Vec::new();
                    let tp = self.pattern(&c.pattern, &mut binds)?;
                    self.unify(&tp, &ts)?;
                    let mut inner = env.clone();
                    for (x, t) in binds {
                        inner.values.insert(x, Oracle::mono(t));
                    }
                    let tb = self.expr(&inner, &c.body)?;
                    self.unify(&tb, &r)?;
                }
                r
            }
            ExprKind::Let { rec, name, params, value, body } => {
                let s = self.let_binding(env, *rec, name, params, value)?;
                let mut inner = env.clone();
                if !name.is_wildcard() {
                    inner.values.insert(name.name.clone(), s);
                }
                self.expr(&inner, body)?
            }
            ExprKind::Constr(c, args) => {
                let (targs, res) = self.ctor_type(&c.text, args.len())?;
                for (a, t) in args.iter().zip(&targs) {
                    let ta = self.expr(env, a)?;
                    self.unify(&ta, t)?;
                }
                res
            }
            ExprKind::Annot(x, te) => {
                let tx = self.expr(env, x)?;
                let ta = self.type_expr(te, &mut HashMap::new(), false)?;
                self.unify(&tx, &ta)?;
                tx
            }
            ExprKind::Placeholder => return Err("placeholder in well-typed input".into()),
        })
    }

    fn phrases(&mut self, env: &mut Env, ps: &[Phrase], prefix: &str, out: &mut Vec<(String, String)>) -> Result<(), OracleError> {
        for p in ps {
            match &p.kind {
                PhraseKind::LetDef { rec, name, params, body } => {
                    let s = self.let_binding(env, *rec, name, params, body)?;
                    if !name.is_wildcard() {
                        out.push((format!("{prefix}{}", name.name), print_scheme(self, &s)));
                        env.values.insert(name.name.clone(), s);
                    }
                }
                PhraseKind::ExprPhrase(e) => {
                    self.level += 1;
                    self.expr(env, e)?;
                    self.level -= 1;
                }
                PhraseKind::TypeDef { name, param, constructors } => {
                    let params = usize::from(param.is_some());
                    self.types.insert(name.text.clone(), params);
                    let mut vars = HashMap::new();
                    if let Some(v) = param {
                        vars.insert(v.text.clone(), Ty::Gen(0));
                    }
                    for c in constructors {
                        let args = c
                            .args
                            .iter()
                            .map(|a| self.type_expr(a, &mut vars.clone(), true))
                            .collect::<Result<Vec<_>, _>>()?;
                        self.ctors.insert(c.name.text.clone(), Ctor { owner: name.text.clone(), args, params });
                    }
                }
                PhraseKind::ModuleDef { name, phrases } => {
                    let mut inner = env.clone();
                    let mut sub = Vec::new();
                    self.phrases(&mut inner, phrases, &format!("{prefix}{}.", name.text), &mut sub)?;
                    let mut vals = HashMap::new();
                    for (k, _) in &sub {
                        let short = k.rsplit('.').next().unwrap().to_string();
                        vals.insert(short.clone(), inner.values[&short].clone());
                    }
                    out.extend(sub);
                    env.modules.insert(name.text.clone(), vals);
                }
            }
        }
        Ok(())
    }

    fn show(&self, t: &Ty) -> String {
        let mut names = HashMap::new();
        let mut s = String::new();
        self.write(&mut s, t, false, &mut names);
        s
    }

    fn write(&self, out: &mut String, t: &Ty, left_of_arrow: bool, names: &mut HashMap<(bool, usize), usize>) {
        let var = |out: &mut String, key: (bool, usize), names: &mut HashMap<(bool, usize), usize>| {
            let n = names.len();
            let i = *names.entry(key).or_insert(n);
            let letter = (b'a' + (i % 26) as u8) as char;
            if i < 26 {
                let _ = write!(out, "'{letter}");
            } else {
                let _ = write!(out, "'{letter}{}", i / 26);
            }
        };
        match self.repr(t) {
            Ty::Var(v) => var(out, (false, v), names),
            Ty::Gen(g) => var(out, (true, g), names),
            Ty::Con(n, args) if n == "->" => {
                if left_of_arrow {
                    out.push('(');
                }
                self.write(out, &args[0], true, names);
                out.push_str(" -> ");
                self.write(out, &args[1], false, names);
                if left_of_arrow {
                    out.push(')');
                }
            }
            Ty::Con(n, args) => {
                for a in &args {
                    let is_arrow = matches!(self.repr(a), Ty::Con(ref m, _) if m == "->");
                    if is_arrow {
                        out.push('(');
                    }
                    self.write(out, a, false, names);
                    if is_arrow {
                        out.push(')');
                    }
                    out.push(' ');
                }
                out.push_str(&n);
            }
        }
    }
}

fn subst_gen(t: &Ty, vars: &[Ty]) -> Ty {
    match t {
        Ty::Gen(i) => vars[*i].clone(),
        Ty::Con(n, args) => Ty::Con(n.clone(), args.iter().map(|a| subst_gen(a, vars)).collect()),
        v => v.clone(),
    }
}

fn print_scheme(o: &Oracle, s: &Scheme) -> String {
    o.show(&s.ty)
}

/// Printed schemes of every toplevel binding, module members qualified,
/// in definition order.
pub fn infer_program(ast: &Ast) -> Result<Vec<(String, String)>, OracleError> {
    let mut o = Oracle::new();
    let mut env = Env::default();
    let mut out = Vec::new();
    o.phrases(&mut env, &ast.phrases, "", &mut out)?;
    Ok(out)
}
