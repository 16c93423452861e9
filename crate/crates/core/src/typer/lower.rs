//! Lowering of completed MiniML parse trees to the AST.

use super::ast::*;
use crate::grammar::{Literal, Symbol};
use crate::parser::Tree;
use crate::position::Range;
use crate::tables::Tables;

/// Name of the reserved identifier that stands for a hole in expressions.
pub const HOLE: &str = "_hole";

struct Lower<'a> {
    t: &'a Tables,
    next_id: NodeId,
}

fn text(t: &Tree) -> String {
    match &t.payload {
        Some(Literal::Text(s)) => s.clone(),
        Some(Literal::Int(n)) => n.to_string(),
        None => String::new(),
    }
}

impl<'a> Lower<'a> {
    fn name(&self, t: &Tree) -> String {
        self.t.symbol_name(t.symbol)
    }

    fn is(&self, t: &Tree, name: &str) -> bool {
        self.name(t) == name
    }

    fn id(&mut self) -> NodeId {
        self.next_id += 1;
        self.next_id - 1
    }

    /// Flattens a left-recursive list `l: | l item` or `l: item | l SEP item`.
    fn list<'t>(&self, mut t: &'t Tree, list: &str) -> Vec<&'t Tree> {
        let mut items = Vec::new();
        loop {
            match t.children.first() {
                Some(first) if self.is(first, list) => {
                    items.push(t.children.last().unwrap().as_ref());
                    t = first;
                }
                _ => {
                    if let Some(last) = t.children.last() {
                        items.push(last.as_ref());
                    }
                    break;
                }
            }
        }
        items.reverse();
        items
    }

    fn phrases(&mut self, t: &Tree, toplevel: bool) -> Vec<Phrase> {
        let mut out = Vec::new();
        for p in self.list(t, "phrases") {
            if toplevel {
                self.next_id = 0;
            }
            let start = self.next_id;
            if let Some(mut ph) = self.phrase(p) {
                if toplevel {
                    ph.node_count = self.next_id - start;
                }
                out.push(ph);
            }
        }
        out
    }

    fn phrase(&mut self, t: &Tree) -> Option<Phrase> {
        let inner = t.children.first()?;
        let range = t.range;
        let kind = match self.name(inner).as_str() {
            "letdef" => {
                let c = &inner.children;
                let rec = !c[1].children.is_empty();
                let name = self.binder(&c[2]);
                let params = self.params(&c[3]);
                let body = self.expr(&c[5]);
                PhraseKind::LetDef { rec, name, params, body }
            }
            "typedef" => {
                let c = &inner.children;
                let param = c[1].children.first().map(|v| Name { text: text(v), range: v.range });
                let name = Name { text: text(&c[2]), range: c[2].range };
                let constructors = self
                    .list(&c[4], "constrs")
                    .into_iter()
                    .filter(|d| !d.synthesized && !d.children.first().is_some_and(|u| u.synthesized))
                    .map(|d| self.constr_decl(d))
                    .collect();
                PhraseKind::TypeDef { name, param, constructors }
            }
            "moduledef" => {
                let c = &inner.children;
                let name = Name { text: text(&c[1]), range: c[1].range };
                let phrases = self.phrases(&c[4], false);
                PhraseKind::ModuleDef { name, phrases }
            }
            _ => PhraseKind::ExprPhrase(self.expr(&t.children[1])),
        };
        Some(Phrase { kind, range, node_count: 0 })
    }

    fn binder(&mut self, leaf: &Tree) -> Binder {
        let name = if leaf.synthesized { "_".to_string() } else { text(leaf) };
        Binder { id: self.id(), name, range: leaf.range }
    }

    fn params(&mut self, t: &Tree) -> Vec<Binder> {
        let leaves: Vec<Tree> = self
            .list(t, if self.is(t, "fun_params") { "fun_params" } else { "params" })
            .into_iter()
            .filter(|x| matches!(x.symbol, Symbol::T(_)))
            .cloned()
            .collect();
        leaves.iter().map(|l| self.binder(l)).collect()
    }

    fn constr_decl(&mut self, t: &Tree) -> ConstrDecl {
        // constrs item is `constr` itself (possibly after BAR).
        let d = if self.is(t, "constr") { t } else { t.children.last().unwrap() };
        let name = Name { text: text(&d.children[0]), range: d.children[0].range };
        let args = if d.children.len() == 3 {
            self.list(&d.children[2], "type_args").into_iter().map(|a| self.type_app(a)).collect()
        } else {
            Vec::new()
        };
        ConstrDecl { name, args }
    }

    fn type_app(&mut self, t: &Tree) -> TypeExpr {
        if t.synthesized {
            return TypeExpr { kind: TypeExprKind::Hole, range: t.range };
        }
        let c = &t.children;
        let kind = match c.len() {
            1 if self.is(&c[0], "TYVAR") => TypeExprKind::Var(text(&c[0])),
            1 => TypeExprKind::Con(text(&c[0]), vec![]),
            2 => TypeExprKind::Con(text(&c[1]), vec![self.type_app(&c[0])]),
            _ => return self.type_expr(&c[1]),
        };
        let hole = c.iter().any(|x| x.synthesized && matches!(x.symbol, Symbol::T(_)));
        TypeExpr { kind: if hole { TypeExprKind::Hole } else { kind }, range: t.range }
    }

    fn type_expr(&mut self, t: &Tree) -> TypeExpr {
        if t.synthesized {
            return TypeExpr { kind: TypeExprKind::Hole, range: t.range };
        }
        let c = &t.children;
        if c.len() == 1 {
            return self.type_app(&c[0]);
        }
        let a = self.type_app(&c[0]);
        let b = self.type_expr(&c[2]);
        TypeExpr { kind: TypeExprKind::Arrow(Box::new(a), Box::new(b)), range: t.range }
    }

    fn placeholder(&mut self, range: Range) -> Expr {
        Expr { id: self.id(), kind: ExprKind::Placeholder, range }
    }

    fn expr(&mut self, t: &Tree) -> Expr {
        if t.synthesized {
            return self.placeholder(t.range);
        }
        match self.name(t).as_str() {
            "expr" => self.expr_node(t),
            "app_expr" => self.app(t),
            _ => self.simple(t),
        }
    }

    fn expr_node(&mut self, t: &Tree) -> Expr {
        let c = &t.children;
        if c.len() == 1 {
            return self.app(&c[0]);
        }
        let range = t.range;
        let first = self.name(&c[0]);
        match first.as_str() {
            "FUN" => {
                let params = self.params(&c[1]);
                let id = self.id();
                let body = self.expr(&c[3]);
                return Expr { id, kind: ExprKind::Fun(params, Box::new(body)), range };
            }
            "LET" => {
                let id = self.id();
                let rec = !c[1].children.is_empty();
                let name = self.binder(&c[2]);
                let params = self.params(&c[3]);
                let value = Box::new(self.expr(&c[5]));
                let body = Box::new(self.expr(&c[7]));
                return Expr { id, kind: ExprKind::Let { rec, name, params, value, body }, range };
            }
            "IF" => {
                let id = self.id();
                let a = Box::new(self.expr(&c[1]));
                let b = Box::new(self.expr(&c[3]));
                let e = Box::new(self.expr(&c[5]));
                return Expr { id, kind: ExprKind::If(a, b, e), range };
            }
            "MATCH" => {
                let id = self.id();
                let s = Box::new(self.expr(&c[1]));
                let clauses = if c[3].synthesized {
                    Vec::new()
                } else {
                    let cases: Vec<&Tree> =
                        self.list(&c[3], "match_cases").into_iter().filter(|x| self.is(x, "case")).collect();
                    cases
                        .into_iter()
                        .map(|case| Clause {
                            pattern: self.pattern(&case.children[0]),
                            body: self.expr(&case.children[2]),
                        })
                        .collect()
                };
                return Expr { id, kind: ExprKind::Match(s, clauses), range };
            }
            _ => {
                let op = match self.name(&c[1]).as_str() {
                    "PLUS" => BinOp::Add,
                    "MINUS" => BinOp::Sub,
                    "STAR" => BinOp::Mul,
                    "LESS" => BinOp::Lt,
                    _ => BinOp::Eq,
                };
                let id = self.id();
                let a = Box::new(self.expr(&c[0]));
                let b = Box::new(self.expr(&c[2]));
                Expr { id, kind: ExprKind::BinOp(op, a, b), range }
            }
        }
    }

    fn app(&mut self, t: &Tree) -> Expr {
        if t.synthesized {
            return self.placeholder(t.range);
        }
        let spine = self.list(t, "app_expr");
        let head = spine[0];
        let ctor = head.children.len() == 1 && self.is(&head.children[0], "UIDENT") && !head.synthesized;
        if ctor && !head.children[0].synthesized {
            let id = self.id();
            let name = Name { text: text(&head.children[0]), range: head.children[0].range };
            let args = spine[1..].iter().map(|a| self.expr(a)).collect();
            return Expr { id, kind: ExprKind::Constr(name, args), range: t.range };
        }
        // Left-nested applications; ids are assigned outermost first.
        let n = spine.len();
        let ids: Vec<NodeId> = (1..n).map(|_| self.id()).collect();
        let mut e = self.expr(head);
        for (k, arg) in spine[1..].iter().enumerate() {
            let a = self.expr(arg);
            let range = Range::new(e.range.start, a.range.end);
            e = Expr { id: ids[n - 2 - k], kind: ExprKind::Apply(Box::new(e), Box::new(a)), range };
        }
        e
    }

    fn simple(&mut self, t: &Tree) -> Expr {
        if t.synthesized {
            return self.placeholder(t.range);
        }
        let c = &t.children;
        let range = t.range;
        if c.iter().any(|x| x.synthesized && matches!(x.symbol, Symbol::T(_)) && !self.is(x, "RPAREN")) {
            return self.placeholder(range);
        }
        let kind = match (self.name(&c[0]).as_str(), c.len()) {
            ("IDENT", _) => {
                let s = text(&c[0]);
                if s == HOLE {
                    ExprKind::Placeholder
                } else {
                    ExprKind::Var(s)
                }
            }
            ("INT", _) => ExprKind::Int(match c[0].payload {
                Some(Literal::Int(n)) => n,
                _ => 0,
            }),
            ("STRING", _) => ExprKind::Str(text(&c[0])),
            ("TRUE", _) => ExprKind::Bool(true),
            ("FALSE", _) => ExprKind::Bool(false),
            ("UIDENT", 1) => ExprKind::Constr(Name { text: text(&c[0]), range: c[0].range }, vec![]),
            ("UIDENT", _) => ExprKind::Qualified(
                Name { text: text(&c[0]), range: c[0].range },
                Name { text: text(&c[2]), range: c[2].range },
            ),
            (_, 3) => return self.expr(&c[1]),
            _ => {
                let id = self.id();
                let e = self.expr(&c[1]);
                let ty = self.type_expr(&c[3]);
                return Expr { id, kind: ExprKind::Annot(Box::new(e), ty), range };
            }
        };
        Expr { id: self.id(), kind, range }
    }

    fn pattern(&mut self, t: &Tree) -> Pattern {
        let range = t.range;
        if t.synthesized {
            return Pattern { id: self.id(), kind: PatternKind::Wildcard, range };
        }
        if self.is(t, "pattern") {
            let c = &t.children;
            if c.len() == 1 {
                return self.pattern(&c[0]);
            }
            if c[0].synthesized {
                return Pattern { id: self.id(), kind: PatternKind::Wildcard, range };
            }
            let id = self.id();
            let name = Name { text: text(&c[0]), range: c[0].range };
            let args = self.list(&c[1], "pattern_args").into_iter().map(|a| self.pattern(a)).collect();
            return Pattern { id, kind: PatternKind::Constr(name, args), range };
        }
        // simple_pattern
        let c = &t.children;
        if c.len() == 3 {
            return self.pattern(&c[1]);
        }
        let leaf = &c[0];
        let kind = if leaf.synthesized {
            PatternKind::Wildcard
        } else {
            match self.name(leaf).as_str() {
                "IDENT" if text(leaf) == "_" => PatternKind::Wildcard,
                "IDENT" => PatternKind::Var(text(leaf)),
                "INT" => PatternKind::Int(match leaf.payload {
                    Some(Literal::Int(n)) => n,
                    _ => 0,
                }),
                "TRUE" => PatternKind::Bool(true),
                "FALSE" => PatternKind::Bool(false),
                _ => PatternKind::Constr(Name { text: text(leaf), range: leaf.range }, vec![]),
            }
        };
        Pattern { id: self.id(), kind, range }
    }
}

/// Lowers a completed `program` tree. Total: any tree shape the MiniML
/// grammar can produce lowers to some AST.
pub fn lower(tree: &Tree, t: &Tables) -> Ast {
    let mut l = Lower { t, next_id: 0 };
    match tree.children.first() {
        Some(phrases) => Ast { phrases: l.phrases(phrases, true) },
        None => Ast::default(),
    }
}

/// Lowers a tree parsed from the `expr` entry point.
pub fn lower_expr(tree: &Tree, t: &Tables) -> (Expr, u32) {
    let mut l = Lower { t, next_id: 0 };
    let e = l.expr(tree);
    (e, l.next_id)
}
