//! Editor queries over an immutable [`Analysis`].

mod complete;
mod destruct;
mod enclosing;
mod locate;
mod search;

pub use complete::{complete_prefix, type_expression, CompletionEntry, EntryKind, TypeExprError};
pub use destruct::{destruct, DestructError, TextEdit};
pub use enclosing::{type_enclosing, Enclosing};
pub use locate::{locate, Located};
pub use search::{polarity_search, SearchError};

use crate::diagnostic::Diagnostic;
use crate::lexer::LexResult;
use crate::parser::{Token, Tree};
use crate::position::Position;
use crate::typer::ast::*;
use crate::typer::env::DefSite;
use crate::typer::{Ast, NodeType, Scheme, Type, TypeEnv, TypedTree};
use std::sync::Arc;

/// Everything derived from one buffer snapshot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Analysis {
    pub buffer: String,
    pub lexed: LexResult,
    pub tokens: Vec<Token>,
    pub tree: Arc<Tree>,
    pub ast: Ast,
    pub typed: TypedTree,
    /// Lexer, parser and typer diagnostics sorted by start, then phase.
    pub diagnostics: Vec<Diagnostic>,
    pub env_before: Vec<TypeEnv>,
    pub global_env: TypeEnv,
}

impl Analysis {
    /// Cache-free analysis of `buffer`.
    pub fn of_buffer(buffer: &str) -> Analysis {
        crate::server::analyze(buffer, None).0
    }

    pub fn phrase_starts(&self) -> Vec<Position> {
        self.ast.phrases.iter().map(|p| p.range.start).collect()
    }

    /// Toplevel phrase whose range contains `pos`.
    pub fn phrase_at(&self, pos: Position) -> Option<usize> {
        self.ast.phrases.iter().rposition(|p| p.range.contains(pos))
    }

    /// Environment in effect at `pos` before local bindings: the one the
    /// enclosing phrase was typed in, or the one after the last phrase
    /// that ends before `pos`.
    pub fn env_at(&self, pos: Position) -> &TypeEnv {
        if let Some(i) = self.phrase_at(pos) {
            return &self.env_before[i];
        }
        let after = self.ast.phrases.iter().position(|p| p.range.start.offset > pos.offset);
        match after {
            Some(i) => &self.env_before[i],
            None => &self.global_env,
        }
    }

    pub fn node_type(&self, phrase: usize, id: NodeId) -> Option<&NodeType> {
        self.typed.node(phrase, id)
    }
}

/// A name bound inside a phrase and visible at some position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalBinding {
    pub name: String,
    pub scheme: Scheme,
    pub def: DefSite,
}

struct ScopeWalk<'a> {
    a: &'a Analysis,
    phrase: usize,
    pos: Position,
    out: Vec<LocalBinding>,
}

impl ScopeWalk<'_> {
    fn ty(&self, id: NodeId) -> Type {
        self.a.node_type(self.phrase, id).map_or(Type::Var(1 << 24), |n| n.ty.clone())
    }

    fn site(&self, range: crate::position::Range) -> DefSite {
        DefSite::local(self.phrase, self.a.ast.phrases[self.phrase].range.start, range)
    }

    fn binder(&mut self, b: &Binder, poly: bool) {
        if b.is_wildcard() {
            return;
        }
        let ty = self.ty(b.id);
        let scheme = if poly { Scheme::close(&ty) } else { Scheme::mono(ty) };
        let def = self.site(b.range);
        self.out.push(LocalBinding { name: b.name.clone(), scheme, def });
    }

    fn pattern_vars(&mut self, p: &Pattern) {
        match &p.kind {
            PatternKind::Var(x) => {
                let def = self.site(p.range);
                self.out.push(LocalBinding { name: x.clone(), scheme: Scheme::mono(self.ty(p.id)), def });
            }
            PatternKind::Constr(_, args) => args.iter().for_each(|a| self.pattern_vars(a)),
            _ => {}
        }
    }

    fn after(&self, end: Position) -> bool {
        self.pos.offset >= end.offset
    }

    fn phrase(&mut self, p: &Phrase) {
        match &p.kind {
            PhraseKind::LetDef { rec, name, params, body } => {
                let last = params.last().map_or(name.range.end, |b| b.range.end);
                if self.after(last) {
                    if *rec {
                        self.binder(name, false);
                    }
                    params.iter().for_each(|b| self.binder(b, false));
                    self.expr(body);
                }
            }
            PhraseKind::ModuleDef { phrases, .. } => {
                for q in phrases {
                    if q.range.contains(self.pos) {
                        self.phrase(q);
                        break;
                    }
                    if q.range.start.offset > self.pos.offset {
                        break;
                    }
                    if let PhraseKind::LetDef { name, .. } = &q.kind {
                        self.binder(name, true);
                    }
                }
            }
            PhraseKind::ExprPhrase(e) => self.expr(e),
            PhraseKind::TypeDef { .. } => {}
        }
    }

    fn expr(&mut self, e: &Expr) {
        if !e.range.contains(self.pos) {
            return;
        }
        match &e.kind {
            ExprKind::Fun(params, body) => {
                if self.after(params.last().map_or(e.range.start, |b| b.range.end)) {
                    params.iter().for_each(|b| self.binder(b, false));
                    self.expr(body);
                }
            }
            ExprKind::Let { rec, name, params, value, body } => {
                if self.after(value.range.end) && !value.range.contains(self.pos) || body.range.contains(self.pos) {
                    self.binder(name, true);
                    self.expr(body);
                } else if self.after(params.last().map_or(name.range.end, |b| b.range.end)) {
                    if *rec {
                        self.binder(name, false);
                    }
                    params.iter().for_each(|b| self.binder(b, false));
                    self.expr(value);
                }
            }
            ExprKind::Match(s, clauses) => {
                self.expr(s);
                for c in clauses {
                    if self.after(c.pattern.range.end) && c.body.range.end.offset >= self.pos.offset {
                        self.pattern_vars(&c.pattern);
                        self.expr(&c.body);
                        break;
                    }
                }
            }
            ExprKind::Apply(a, b) | ExprKind::BinOp(_, a, b) => {
                self.expr(a);
                self.expr(b);
            }
            ExprKind::If(a, b, c) => {
                self.expr(a);
                self.expr(b);
                self.expr(c);
            }
            ExprKind::Constr(_, args) => args.iter().for_each(|x| self.expr(x)),
            ExprKind::Annot(x, _) => self.expr(x),
            _ => {}
        }
    }
}

/// Names bound inside the enclosing phrase that are visible at `pos`,
/// outermost first (later entries shadow earlier ones).
pub fn locals_at(a: &Analysis, pos: Position) -> Vec<LocalBinding> {
    let Some(phrase) = a.phrase_at(pos) else {
        return Vec::new();
    };
    let mut w = ScopeWalk { a, phrase, pos, out: Vec::new() };
    w.phrase(&a.ast.phrases[phrase]);
    w.out
}

/// Environment at `pos` with local bindings included.
pub fn scope_at(a: &Analysis, pos: Position) -> TypeEnv {
    let mut env = a.env_at(pos).clone();
    for l in locals_at(a, pos) {
        env.bind_value(&l.name, l.scheme, l.def);
    }
    env
}

/// Every typed node of phrase `phrase` whose range contains `pos`,
/// outermost first.
pub(crate) fn nodes_at<'a>(a: &'a Analysis, phrase: usize, pos: Position) -> Vec<NodeRef<'a>> {
    let mut out = Vec::new();
    walk_phrase(&a.ast.phrases[phrase], &mut |n| {
        if n.range().contains(pos) {
            out.push(n)
        }
    });
    out
}
