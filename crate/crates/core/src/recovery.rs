//! Error recovery: turn any token stream into a complete tree.
//!
//! Completion synthesizes the cheapest sequence of symbols that brings a
//! parser environment to acceptance. The search runs over configurations
//! `(k, top)`: the bottom `k` stack elements are untouched, and `top` is the
//! state of at most one element built by completion. Each move picks a
//! kernel item `A -> α . β` of the top state, synthesizes `β` and reduces.
//!
//! [`recover`] interleaves completion with the remaining input, using the
//! column of the next token against the column of the stack top to decide
//! between closing constructs and consuming (or dropping) the token.

use crate::diagnostic::{Diagnostic, Phase};
use crate::grammar::{Cost, Symbol};
use crate::parser::{step, Checkpoint, ParserEnv, Token, Tree};
use crate::position::{Position, Range};
use crate::tables::{CompletionPlan, Item, StateId, Synthesis, Tables};
use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, VecDeque};
use std::sync::Arc;
use thiserror::Error;

/// Consecutive dropped tokens tolerated before giving up on the input.
pub const MAX_DROPS: usize = 1000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RecoveryStep {
    Synthesized(Symbol, Cost),
    Consumed(Token),
    Dropped(Token),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecoveryResult {
    pub tree: Arc<Tree>,
    pub diagnostics: Vec<Diagnostic>,
    pub trace: Vec<RecoveryStep>,
    pub total_cost: Cost,
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("state {0} has no finite completion")]
pub struct NoCompletion(pub StateId);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Node {
    Config { k: usize, top: Option<StateId> },
    Accept,
}

/// A completion as a list of kernel items, each closed by synthesizing its
/// remainder and reducing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompletionPath {
    pub cost: Cost,
    pub items: Vec<Item>,
}

fn accepting(t: &Tables, s: StateId) -> bool {
    t.kernels[s as usize].iter().any(|it| t.is_augmented(it.prod) && it.dot == 1)
}

/// Cheapest completion from `env`, or `None` when none is finite.
pub fn completion_path(env: &ParserEnv, plan: &CompletionPlan) -> Option<CompletionPath> {
    let t = &*env.tables;
    let mut states: Vec<StateId> = vec![env.start_state];
    states.extend(env.stack.to_vec().iter().map(|e| e.state));
    let n = states.len() - 1;

    let state_of = |node: Node| match node {
        Node::Config { k, top } => top.unwrap_or(states[k]),
        Node::Accept => unreachable!(),
    };
    let start = Node::Config { k: n, top: None };
    let mut dist: HashMap<Node, Cost> = HashMap::new();
    let mut prev: HashMap<Node, (Node, Item)> = HashMap::new();
    let mut heap = BinaryHeap::new();
    let mut seq = 0u64;
    dist.insert(start, Cost::ZERO);
    heap.push(Reverse((Cost::ZERO, seq, start)));
    let mut settled = std::collections::HashSet::new();

    let mut goal = None;
    while let Some(Reverse((c, _, node))) = heap.pop() {
        if !settled.insert(node) {
            continue;
        }
        if node == Node::Accept {
            goal = Some(c);
            break;
        }
        let st = state_of(node);
        if accepting(t, st) {
            if let Node::Config { k: 0, top: Some(_) } | Node::Config { k: 1, top: None } = node {
                goal = Some(c);
                prev.insert(Node::Accept, (node, Item { prod: u32::MAX, dot: 0 }));
                break;
            }
        }
        let Node::Config { k, top } = node else { unreachable!() };
        let mut items = t.kernels[st as usize].clone();
        items.sort_by_key(|it| (it.prod, t.productions[it.prod as usize].rhs.len() - it.dot as usize));
        for it in items {
            let rem = plan.remainder_cost(t, it);
            if !rem.is_finite() {
                continue;
            }
            let next = if t.is_augmented(it.prod) {
                if it.dot != 0 {
                    continue;
                }
                Node::Accept
            } else {
                let e = top.is_some() as usize;
                let a = it.dot as usize;
                if a > k + e {
                    continue;
                }
                let nk = k + e - a;
                let lhs = t.productions[it.prod as usize].lhs;
                let Some(g) = t.goto[states[nk] as usize][lhs as usize] else { continue };
                Node::Config { k: nk, top: Some(g) }
            };
            let nc = c + rem;
            if dist.get(&next).is_none_or(|d| nc < *d) {
                dist.insert(next, nc);
                prev.insert(next, (node, it));
                seq += 1;
                heap.push(Reverse((nc, seq, next)));
            }
        }
    }
    let cost = goal?;
    let mut items = Vec::new();
    let mut cur = Node::Accept;
    while let Some(&(p, it)) = prev.get(&cur) {
        if it.prod != u32::MAX {
            items.push(it);
        }
        if p == start {
            break;
        }
        cur = p;
    }
    items.reverse();
    Some(CompletionPath { cost, items })
}

/// Builds a synthesized tree for `sym`, zero-width at `at`.
pub fn synthesize(t: &Tables, plan: &CompletionPlan, sym: Symbol, at: Position) -> Arc<Tree> {
    let range = Range::point(at);
    let node = match sym {
        Symbol::T(x) => {
            let payload = t.grammar.terminals.get(x as usize).and_then(|term| term.recovery.clone());
            Tree { symbol: sym, children: vec![], payload, range, synthesized: true }
        }
        Symbol::N(n) => {
            let children = match plan.nonterminal_choice[n as usize] {
                Synthesis::Expand(p) => {
                    t.productions[p as usize].rhs.iter().map(|s| synthesize(t, plan, *s, at)).collect()
                }
                Synthesis::Placeholder | Synthesis::Impossible => vec![],
            };
            Tree { symbol: sym, children, payload: None, range, synthesized: true }
        }
    };
    Arc::new(node)
}

enum Applied {
    Env(ParserEnv),
    Accepted(Arc<Tree>),
}

/// Closes one kernel item: synthesizes its remainder and reduces.
fn apply_item(
    env: &ParserEnv,
    plan: &CompletionPlan,
    it: Item,
    at: Position,
    trace: &mut Vec<RecoveryStep>,
) -> Applied {
    let t = env.tables.clone();
    let rhs = &t.productions[it.prod as usize].rhs;
    if t.is_augmented(it.prod) {
        trace.push(RecoveryStep::Synthesized(rhs[0], plan.synthesis_cost(rhs[0])));
        return Applied::Accepted(synthesize(&t, plan, rhs[0], at));
    }
    let mut env = env.clone();
    for sym in &rhs[it.dot as usize..] {
        trace.push(RecoveryStep::Synthesized(*sym, plan.synthesis_cost(*sym)));
        env = env.shift_tree(synthesize(&t, plan, *sym, at)).expect("kernel item transition");
    }
    Applied::Env(env.reduce(it.prod, at))
}

fn accepted_tree(env: &ParserEnv) -> Option<Arc<Tree>> {
    let t = &env.tables;
    (env.stack.len() == 1 && accepting(t, env.state())).then(|| env.stack.top().unwrap().tree.clone())
}

/// Completes `env` to an accepted tree at least cost; synthesized nodes are
/// anchored at `at`.
pub fn complete(
    env: &ParserEnv,
    plan: &CompletionPlan,
    at: Position,
) -> Result<(Arc<Tree>, Cost, Vec<RecoveryStep>), NoCompletion> {
    let path = completion_path(env, plan).ok_or(NoCompletion(env.state()))?;
    let mut trace = Vec::new();
    let mut env = env.clone();
    for it in &path.items {
        match apply_item(&env, plan, *it, at, &mut trace) {
            Applied::Env(e) => env = e,
            Applied::Accepted(tree) => return Ok((tree, path.cost, trace)),
        }
    }
    let tree = accepted_tree(&env).expect("completion path ends in acceptance");
    Ok((tree, path.cost, trace))
}

/// Column of the topmost stack element that covers some text; 0 if none.
fn stack_column(env: &ParserEnv) -> u32 {
    env.stack.iter().find(|e| !e.range.is_empty()).map_or(0, |e| e.range.start.col)
}

fn describe(t: &Tables, tok: &Token) -> String {
    if tok.terminal == t.eof() {
        return "end of input".to_string();
    }
    match &tok.payload {
        Some(p) => format!("{} {}", t.terminal_name(tok.terminal), p),
        None => t.terminal_name(tok.terminal).to_string(),
    }
}

/// Parses `rest` from `env`, recovering from every syntax error. `rest`
/// must end with the end-marker token.
pub fn recover(env: &ParserEnv, rest: &[Token], plan: &CompletionPlan) -> RecoveryResult {
    let t = env.tables.clone();
    let mut env = env.clone();
    let mut diagnostics = Vec::new();
    let mut trace = Vec::new();
    let mut total = Cost::ZERO;
    let mut recovering = false;
    let mut drops = 0;
    let mut error_at = None;
    let mut pending: Option<VecDeque<Item>> = None;
    let end_pos = rest.last().map_or_else(|| env.stack.top().map_or(Position::START, |e| e.range.end), |t| t.start);
    let mut i = 0;

    let finish = |env: &ParserEnv, mut trace: Vec<RecoveryStep>, total: Cost, diagnostics: Vec<Diagnostic>| {
        let (tree, cost, steps) = match complete(env, plan, end_pos) {
            Ok(x) => x,
            Err(_) => {
                // Unreachable for tables whose plan has no infinite state.
                let sym = env.stack.top().map_or(Symbol::N(0), |e| e.symbol);
                (synthesize(&t, plan, sym, end_pos), Cost::Infinite, vec![])
            }
        };
        trace.extend(steps);
        RecoveryResult { tree, diagnostics, trace, total_cost: total + cost }
    };

    while i < rest.len() {
        let tok = &rest[i];
        let is_eof = tok.terminal == t.eof();
        if recovering && is_eof {
            return finish(&env, trace, total, diagnostics);
        }
        if recovering && stack_column(&env) > tok.start.col {
            let queue = pending.get_or_insert_with(|| {
                completion_path(&env, plan).map(|p| p.items.into_iter().collect()).unwrap_or_default()
            });
            if let Some(it) = queue.pop_front() {
                let before = trace.len();
                match apply_item(&env, plan, it, tok.start, &mut trace) {
                    Applied::Env(e) => {
                        for s in &trace[before..] {
                            if let RecoveryStep::Synthesized(_, c) = s {
                                total = total + *c;
                            }
                        }
                        env = e;
                        continue;
                    }
                    Applied::Accepted(_) => {
                        // Never close the whole input while tokens remain.
                        trace.truncate(before);
                        queue.clear();
                    }
                }
            }
        }
        match step(&env, tok) {
            Checkpoint::Intermediate(e) => {
                env = e;
                trace.push(RecoveryStep::Consumed(tok.clone()));
                recovering = false;
                pending = None;
                drops = 0;
                i += 1;
            }
            Checkpoint::Result(tree) => {
                trace.push(RecoveryStep::Consumed(tok.clone()));
                return RecoveryResult { tree, diagnostics, trace, total_cost: total };
            }
            Checkpoint::SyntaxError { pos, .. } => {
                if !recovering {
                    recovering = true;
                    error_at = Some(i);
                    diagnostics.push(Diagnostic::new(
                        Phase::Parser,
                        if is_eof { Range::point(pos) } else { tok.range() },
                        format!("syntax error: unexpected {}", describe(&t, tok)),
                    ));
                    if is_eof {
                        return finish(&env, trace, total, diagnostics);
                    }
                    // Same token again, now under the recovery rules.
                    if stack_column(&env) > tok.start.col {
                        continue;
                    }
                } else if error_at != Some(i) {
                    diagnostics.push(Diagnostic::new(
                        Phase::Parser,
                        tok.range(),
                        format!("dropped unexpected {}", describe(&t, tok)),
                    ));
                }
                trace.push(RecoveryStep::Dropped(tok.clone()));
                drops += 1;
                i += 1;
                if drops >= MAX_DROPS {
                    let ignored: Vec<&Token> = rest[i..].iter().filter(|x| x.terminal != t.eof()).collect();
                    if let (Some(a), Some(b)) = (ignored.first(), ignored.last()) {
                        diagnostics.push(Diagnostic::new(
                            Phase::Parser,
                            Range::new(a.start, b.end),
                            "too many syntax errors, rest of input ignored",
                        ));
                    }
                    for x in ignored {
                        trace.push(RecoveryStep::Dropped(x.clone()));
                    }
                    return finish(&env, trace, total, diagnostics);
                }
            }
        }
    }
    finish(&env, trace, total, diagnostics)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::{load_grammar, Literal};
    use crate::lexer::lex_all;
    use crate::miniml::{miniml, tokens_of};
    use crate::parser::{parse_prefix, start_env, Sexp};

    const EXPR: &str = "%token <int> INT [@cost 1] [@recovery 0]\n%token PLUS\n%left PLUS\n%%\nexpr: INT | expr PLUS expr;\n";

    fn expr() -> (Arc<Tables>, CompletionPlan) {
        let g = load_grammar(EXPR).unwrap();
        let (t, p) = Tables::build(&g).unwrap();
        (Arc::new(t), p)
    }

    fn run(src: &str) -> RecoveryResult {
        let m = miniml();
        let toks = tokens_of(&lex_all(src), src);
        recover(&start_env(&m.tables, "program").unwrap(), &toks, &m.plan)
    }

    #[test]
    fn completes_after_plus() {
        let (t, plan) = expr();
        let p0 = Position::START;
        let p1 = Position::new(1, 1, 1);
        let toks = [
            Token::new(t.terminal("INT").unwrap(), Some(Literal::Int(1)), p0, p1),
            Token::new(t.terminal("PLUS").unwrap(), None, p1, Position::new(1, 2, 2)),
        ];
        let (Checkpoint::Intermediate(env), _) = parse_prefix(&t, "expr", &toks).unwrap() else { panic!() };
        let (tree, cost, _) = complete(&env, &plan, Position::new(1, 2, 2)).unwrap();
        assert_eq!(cost, Cost::ONE);
        assert_eq!(Sexp(&tree, &t).to_string(), "(expr (expr 1) PLUS (expr⟨synth⟩ 0⟨synth⟩))");
        let empty = start_env(&t, "expr").unwrap();
        assert_eq!(complete(&empty, &plan, p0).unwrap().1, Cost::ONE);
    }

    #[test]
    fn complete_sentence_costs_nothing() {
        let (t, plan) = expr();
        let toks = [Token::new(t.terminal("INT").unwrap(), Some(Literal::Int(1)), Position::START, Position::new(1, 1, 1))];
        let (Checkpoint::Intermediate(env), _) = parse_prefix(&t, "expr", &toks).unwrap() else { panic!() };
        let (_, cost, trace) = complete(&env, &plan, Position::new(1, 1, 1)).unwrap();
        assert_eq!(cost, Cost::ZERO);
        assert!(trace.is_empty());
    }

    #[test]
    fn valid_buffer_is_all_consumed() {
        let r = run("let x = 1\nlet y = x");
        assert!(r.diagnostics.is_empty());
        assert!(r.trace.iter().all(|s| matches!(s, RecoveryStep::Consumed(_))));
        assert_eq!(r.total_cost, Cost::ZERO);
    }

    #[test]
    fn binder_survives_completion() {
        let r = run("let f x =");
        let m = miniml();
        let s = Sexp(&r.tree, &m.tables).to_string();
        assert!(s.contains("\"x\""), "{s}");
        assert!(s.contains("(expr⟨synth⟩)"), "{s}");
        assert_eq!(r.diagnostics.len(), 1);
    }

    #[test]
    fn stray_paren_is_dropped() {
        let r = run("let x = ) 3");
        let dropped: Vec<_> = r.trace.iter().filter(|s| matches!(s, RecoveryStep::Dropped(_))).collect();
        assert_eq!(dropped.len(), 1);
        assert_eq!(r.diagnostics.len(), 1);
        let m = miniml();
        let s = Sexp(&r.tree, &m.tables).to_string();
        assert!(s.contains("(simple_expr 3)"), "{s}");
        assert_eq!(r.tree.count_synthesized(), 0);
    }

    #[test]
    fn dedent_closes_constructs() {
        let r = run("type t = A |\nlet x = 1");
        let m = miniml();
        let s = Sexp(&r.tree, &m.tables).to_string();
        assert!(s.contains("\"Hole\"⟨synth⟩"), "{s}");
        assert!(s.contains("\"x\""), "{s}");
        assert!(r.trace.iter().filter(|s| matches!(s, RecoveryStep::Dropped(_))).count() == 0);
    }

    #[test]
    fn unterminated_module_keeps_definitions() {
        let r = run("module M = struct\n  let a = 1\nlet b = 2");
        let m = miniml();
        let s = Sexp(&r.tree, &m.tables).to_string();
        assert!(s.contains("\"a\"") && s.contains("\"b\""), "{s}");
        assert!(s.contains("END⟨synth⟩"), "{s}");
    }

    #[test]
    fn garbage_everywhere_terminates() {
        let r = run(") ) ) let let = = in in 3 + + fun");
        assert!(!r.diagnostics.is_empty());
        let m = miniml();
        assert_eq!(r.tree.symbol, Symbol::N(m.grammar.nonterminal("program").unwrap()));
    }
}
