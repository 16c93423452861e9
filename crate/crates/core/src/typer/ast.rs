//! MiniML abstract syntax. Node ids are dense per toplevel phrase.

use crate::position::Range;

pub type NodeId = u32;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Ast {
    pub phrases: Vec<Phrase>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Phrase {
    pub kind: PhraseKind,
    pub range: Range,
    /// Ids used by this phrase and its nested phrases, toplevel only.
    pub node_count: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PhraseKind {
    LetDef { rec: bool, name: Binder, params: Vec<Binder>, body: Expr },
    TypeDef { name: Name, param: Option<Name>, constructors: Vec<ConstrDecl> },
    ModuleDef { name: Name, phrases: Vec<Phrase> },
    ExprPhrase(Expr),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Name {
    pub text: String,
    pub range: Range,
}

/// A variable binding occurrence.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Binder {
    pub id: NodeId,
    pub name: String,
    pub range: Range,
}

impl Binder {
    /// `_` and synthesized names bind nothing.
    pub fn is_wildcard(&self) -> bool {
        self.name == "_"
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ConstrDecl {
    pub name: Name,
    pub args: Vec<TypeExpr>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TypeExpr {
    pub kind: TypeExprKind,
    pub range: Range,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TypeExprKind {
    Var(String),
    Con(String, Vec<TypeExpr>),
    Arrow(Box<TypeExpr>, Box<TypeExpr>),
    Hole,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Lt,
    Eq,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Lt => "<",
            BinOp::Eq => "=",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Expr {
    pub id: NodeId,
    pub kind: ExprKind,
    pub range: Range,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ExprKind {
    Var(String),
    Qualified(Name, Name),
    Int(i64),
    Bool(bool),
    Str(String),
    Fun(Vec<Binder>, Box<Expr>),
    Apply(Box<Expr>, Box<Expr>),
    BinOp(BinOp, Box<Expr>, Box<Expr>),
    If(Box<Expr>, Box<Expr>, Box<Expr>),
    Match(Box<Expr>, Vec<Clause>),
    Let { rec: bool, name: Binder, params: Vec<Binder>, value: Box<Expr>, body: Box<Expr> },
    Constr(Name, Vec<Expr>),
    Annot(Box<Expr>, TypeExpr),
    Placeholder,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Clause {
    pub pattern: Pattern,
    pub body: Expr,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Pattern {
    pub id: NodeId,
    pub kind: PatternKind,
    pub range: Range,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PatternKind {
    Wildcard,
    Var(String),
    Int(i64),
    Bool(bool),
    Constr(Name, Vec<Pattern>),
}

/// Mutable walk over every range of a phrase.
pub fn map_phrase_ranges(p: &mut Phrase, f: &impl Fn(Range) -> Range) {
    p.range = f(p.range);
    match &mut p.kind {
        PhraseKind::LetDef { name, params, body, .. } => {
            name.range = f(name.range);
            for b in params {
                b.range = f(b.range);
            }
            map_expr_ranges(body, f);
        }
        PhraseKind::TypeDef { name, param, constructors } => {
            name.range = f(name.range);
            if let Some(p) = param {
                p.range = f(p.range);
            }
            for c in constructors {
                c.name.range = f(c.name.range);
                for a in &mut c.args {
                    map_type_ranges(a, f);
                }
            }
        }
        PhraseKind::ModuleDef { name, phrases } => {
            name.range = f(name.range);
            for q in phrases {
                map_phrase_ranges(q, f);
            }
        }
        PhraseKind::ExprPhrase(e) => map_expr_ranges(e, f),
    }
}

fn map_type_ranges(t: &mut TypeExpr, f: &impl Fn(Range) -> Range) {
    t.range = f(t.range);
    match &mut t.kind {
        TypeExprKind::Con(_, args) => args.iter_mut().for_each(|a| map_type_ranges(a, f)),
        TypeExprKind::Arrow(a, b) => {
            map_type_ranges(a, f);
            map_type_ranges(b, f);
        }
        TypeExprKind::Var(_) | TypeExprKind::Hole => {}
    }
}

fn map_pattern_ranges(p: &mut Pattern, f: &impl Fn(Range) -> Range) {
    p.range = f(p.range);
    if let PatternKind::Constr(n, args) = &mut p.kind {
        n.range = f(n.range);
        args.iter_mut().for_each(|a| map_pattern_ranges(a, f));
    }
}

pub fn map_expr_ranges(e: &mut Expr, f: &impl Fn(Range) -> Range) {
    e.range = f(e.range);
    match &mut e.kind {
        ExprKind::Var(_) | ExprKind::Int(_) | ExprKind::Bool(_) | ExprKind::Str(_) | ExprKind::Placeholder => {}
        ExprKind::Qualified(m, x) => {
            m.range = f(m.range);
            x.range = f(x.range);
        }
        ExprKind::Fun(ps, body) => {
            ps.iter_mut().for_each(|b| b.range = f(b.range));
            map_expr_ranges(body, f);
        }
        ExprKind::Apply(a, b) | ExprKind::BinOp(_, a, b) => {
            map_expr_ranges(a, f);
            map_expr_ranges(b, f);
        }
        ExprKind::If(a, b, c) => {
            map_expr_ranges(a, f);
            map_expr_ranges(b, f);
            map_expr_ranges(c, f);
        }
        ExprKind::Match(s, clauses) => {
            map_expr_ranges(s, f);
            for c in clauses {
                map_pattern_ranges(&mut c.pattern, f);
                map_expr_ranges(&mut c.body, f);
            }
        }
        ExprKind::Let { name, params, value, body, .. } => {
            name.range = f(name.range);
            params.iter_mut().for_each(|b| b.range = f(b.range));
            map_expr_ranges(value, f);
            map_expr_ranges(body, f);
        }
        ExprKind::Constr(n, args) => {
            n.range = f(n.range);
            args.iter_mut().for_each(|a| map_expr_ranges(a, f));
        }
        ExprKind::Annot(x, t) => {
            map_expr_ranges(x, f);
            map_type_ranges(t, f);
        }
    }
}

/// Node visitor used by queries: calls `f` on every expression, pattern and
/// binder of a phrase, outermost first.
pub enum NodeRef<'a> {
    Expr(&'a Expr),
    Pattern(&'a Pattern),
    Binder(&'a Binder),
}

impl NodeRef<'_> {
    pub fn id(&self) -> NodeId {
        match self {
            NodeRef::Expr(e) => e.id,
            NodeRef::Pattern(p) => p.id,
            NodeRef::Binder(b) => b.id,
        }
    }

    pub fn range(&self) -> Range {
        match self {
            NodeRef::Expr(e) => e.range,
            NodeRef::Pattern(p) => p.range,
            NodeRef::Binder(b) => b.range,
        }
    }
}

pub fn walk_phrase<'a>(p: &'a Phrase, f: &mut impl FnMut(NodeRef<'a>)) {
    match &p.kind {
        PhraseKind::LetDef { name, params, body, .. } => {
            f(NodeRef::Binder(name));
            params.iter().for_each(|b| f(NodeRef::Binder(b)));
            walk_expr(body, f);
        }
        PhraseKind::TypeDef { .. } => {}
        PhraseKind::ModuleDef { phrases, .. } => phrases.iter().for_each(|q| walk_phrase(q, f)),
        PhraseKind::ExprPhrase(e) => walk_expr(e, f),
    }
}

pub fn walk_pattern<'a>(p: &'a Pattern, f: &mut impl FnMut(NodeRef<'a>)) {
    f(NodeRef::Pattern(p));
    if let PatternKind::Constr(_, args) = &p.kind {
        args.iter().for_each(|a| walk_pattern(a, f));
    }
}

pub fn walk_expr<'a>(e: &'a Expr, f: &mut impl FnMut(NodeRef<'a>)) {
    f(NodeRef::Expr(e));
    match &e.kind {
        ExprKind::Var(_)
        | ExprKind::Qualified(..)
        | ExprKind::Int(_)
        | ExprKind::Bool(_)
        | ExprKind::Str(_)
        | ExprKind::Placeholder => {}
        ExprKind::Fun(ps, body) => {
            ps.iter().for_each(|b| f(NodeRef::Binder(b)));
            walk_expr(body, f);
        }
        ExprKind::Apply(a, b) | ExprKind::BinOp(_, a, b) => {
            walk_expr(a, f);
            walk_expr(b, f);
        }
        ExprKind::If(a, b, c) => {
            walk_expr(a, f);
            walk_expr(b, f);
            walk_expr(c, f);
        }
        ExprKind::Match(s, clauses) => {
            walk_expr(s, f);
            for c in clauses {
                walk_pattern(&c.pattern, f);
                walk_expr(&c.body, f);
            }
        }
        ExprKind::Let { name, params, value, body, .. } => {
            f(NodeRef::Binder(name));
            params.iter().for_each(|b| f(NodeRef::Binder(b)));
            walk_expr(value, f);
            walk_expr(body, f);
        }
        ExprKind::Constr(_, args) => args.iter().for_each(|a| walk_expr(a, f)),
        ExprKind::Annot(x, _) => walk_expr(x, f),
    }
}
