//! LALR(1) table construction, precedence-based conflict resolution and
//! completion plans for error recovery.

mod automaton;
mod completion;
mod dump;

use crate::grammar::{Assoc, Grammar, NonTerminalId, ProductionId, Symbol, TerminalId};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

pub use automaton::{build_automaton, Automaton, ExtProduction, Item, LrState, StateId, TermSet};
pub use completion::{compute_completion_costs, CompletionPlan, CostReport, StatePlan, Synthesis};
pub use dump::{read_tables, write_tables, DumpError, MAGIC};

pub const EOF_NAME: &str = "$end";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Action {
    Shift(StateId),
    Reduce(ProductionId),
    Accept,
    Error,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConflictKind {
    ShiftReduce,
    ReduceReduce,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Conflict {
    pub state: StateId,
    pub lookahead: String,
    pub kind: ConflictKind,
    pub items: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub struct ConflictReport {
    pub conflicts: Vec<Conflict>,
}

impl fmt::Display for ConflictReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} unresolved conflict(s)", self.conflicts.len())?;
        for c in &self.conflicts {
            let kind = match c.kind {
                ConflictKind::ShiftReduce => "shift/reduce",
                ConflictKind::ReduceReduce => "reduce/reduce",
            };
            writeln!(f, "state {}: {} conflict on {}", c.state, kind, c.lookahead)?;
            for it in &c.items {
                writeln!(f, "    {it}")?;
            }
        }
        Ok(())
    }
}

/// Action and goto tables plus the automaton data the runtime and the
/// recovery planner need.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tables {
    pub grammar: Grammar,
    pub productions: Vec<ExtProduction>,
    pub n_terminals: usize,
    pub n_nonterminals: usize,
    pub kernels: Vec<Vec<Item>>,
    pub transitions: Vec<BTreeMap<Symbol, StateId>>,
    /// `[state][terminal]`, end-marker last.
    pub action: Vec<Vec<Action>>,
    /// `[state][nonterminal]`.
    pub goto: Vec<Vec<Option<StateId>>>,
    pub start_states: Vec<StateId>,
}

impl Tables {
    pub fn eof(&self) -> TerminalId {
        (self.n_terminals - 1) as TerminalId
    }

    pub fn n_states(&self) -> usize {
        self.action.len()
    }

    pub fn terminal(&self, name: &str) -> Option<TerminalId> {
        if name == EOF_NAME {
            return Some(self.eof());
        }
        self.grammar.terminal(name)
    }

    pub fn terminal_name(&self, t: TerminalId) -> &str {
        if t == self.eof() {
            EOF_NAME
        } else {
            &self.grammar.terminals[t as usize].name
        }
    }

    pub fn nonterminal_name(&self, n: NonTerminalId) -> String {
        match self.grammar.nonterminals.get(n as usize) {
            Some(nt) => nt.name.clone(),
            None => {
                let k = n as usize - self.grammar.nonterminals.len();
                format!("{}'", self.grammar.nonterminals[self.grammar.start_symbols[k] as usize].name)
            }
        }
    }

    pub fn symbol_name(&self, s: Symbol) -> String {
        match s {
            Symbol::T(t) => self.terminal_name(t).to_string(),
            Symbol::N(n) => self.nonterminal_name(n),
        }
    }

    pub fn is_augmented(&self, prod: ProductionId) -> bool {
        prod as usize >= self.grammar.productions.len()
    }

    /// Start state for a grammar start symbol, by name.
    pub fn start_state(&self, entry: &str) -> Option<StateId> {
        let nt = self.grammar.nonterminal(entry)?;
        let k = self.grammar.start_symbols.iter().position(|s| *s == nt)?;
        Some(self.start_states[k])
    }

    pub fn transition(&self, state: StateId, sym: Symbol) -> Option<StateId> {
        self.transitions[state as usize].get(&sym).copied()
    }

    /// Terminals with a non-error action in `state`.
    pub fn expected(&self, state: StateId) -> Vec<TerminalId> {
        self.action[state as usize]
            .iter()
            .enumerate()
            .filter(|(_, a)| **a != Action::Error)
            .map(|(t, _)| t as TerminalId)
            .collect()
    }

    pub fn item_to_string(&self, item: Item) -> String {
        item_string(&self.productions, item, |s| self.symbol_name(s))
    }

    /// Builds tables and the completion plan in one go.
    pub fn build(g: &Grammar) -> Result<(Tables, CompletionPlan), BuildError> {
        let a = build_automaton(g);
        let t = resolve_conflicts(&a, g)?;
        let plan = compute_completion_costs(&t, g)?;
        Ok((t, plan))
    }
}

fn item_string(prods: &[ExtProduction], item: Item, name: impl Fn(Symbol) -> String) -> String {
    let p = &prods[item.prod as usize];
    let mut s = format!("{} ->", name(Symbol::N(p.lhs)));
    for (i, sym) in p.rhs.iter().enumerate() {
        if i == item.dot as usize {
            s.push_str(" .");
        }
        s.push(' ');
        s.push_str(&name(*sym));
    }
    if item.dot as usize == p.rhs.len() {
        s.push_str(" .");
    }
    s
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuildError {
    #[error("{0}")]
    Conflicts(#[from] ConflictReport),
    #[error("{0}")]
    Cost(#[from] CostReport),
}

/// Fills the action table, resolving shift/reduce conflicts with Yacc
/// precedence rules. Any conflict left unresolved makes the whole build fail.
pub fn resolve_conflicts(a: &Automaton, g: &Grammar) -> Result<Tables, ConflictReport> {
    let eof = a.eof();
    let mut conflicts = Vec::new();
    let mut action = Vec::with_capacity(a.states.len());
    let mut goto = Vec::with_capacity(a.states.len());
    let name = |s: Symbol| match s {
        Symbol::T(t) if t == eof => EOF_NAME.to_string(),
        Symbol::T(t) => g.terminals[t as usize].name.clone(),
        Symbol::N(n) if (n as usize) < g.nonterminals.len() => g.nonterminals[n as usize].name.clone(),
        Symbol::N(n) => {
            let k = n as usize - g.nonterminals.len();
            format!("{}'", g.nonterminals[g.start_symbols[k] as usize].name)
        }
    };

    for (sid, st) in a.states.iter().enumerate() {
        let mut row = vec![Action::Error; a.n_terminals];
        let mut reduces: Vec<Vec<u32>> = vec![Vec::new(); a.n_terminals];
        for (it, la) in &st.items {
            if it.dot as usize == a.productions[it.prod as usize].rhs.len() {
                for t in la.iter() {
                    reduces[t].push(it.prod);
                }
            }
        }
        for t in 0..a.n_terminals {
            let shift = st.transitions.get(&Symbol::T(t as TerminalId)).copied();
            let red = &reduces[t];
            if red.len() > 1 {
                let items = st
                    .items
                    .iter()
                    .filter(|(it, _)| red.contains(&it.prod) && it.dot as usize == a.productions[it.prod as usize].rhs.len())
                    .map(|(it, _)| item_string(&a.productions, *it, name))
                    .collect();
                conflicts.push(Conflict {
                    state: sid as StateId,
                    lookahead: name(Symbol::T(t as TerminalId)),
                    kind: ConflictKind::ReduceReduce,
                    items,
                });
                continue;
            }
            row[t] = match (shift, red.first()) {
                (None, None) => Action::Error,
                (Some(s), None) => Action::Shift(s),
                (None, Some(&p)) if a.is_augmented(p) => Action::Accept,
                (None, Some(&p)) => Action::Reduce(p),
                (Some(s), Some(&p)) => {
                    let prod_prec = if a.is_augmented(p) { None } else { g.production_precedence(p) };
                    match (prod_prec, g.terminal_precedence(t as TerminalId)) {
                        (Some((pl, _)), Some((tl, _))) if pl > tl => Action::Reduce(p),
                        (Some((pl, _)), Some((tl, _))) if pl < tl => Action::Shift(s),
                        (Some(_), Some((_, Assoc::Left))) => Action::Reduce(p),
                        (Some(_), Some((_, Assoc::Right))) => Action::Shift(s),
                        (Some(_), Some((_, Assoc::NonAssoc))) => Action::Error,
                        _ => {
                            let items = st
                                .items
                                .iter()
                                .filter(|(it, _)| {
                                    (it.prod == p && it.dot as usize == a.productions[p as usize].rhs.len())
                                        || a.productions[it.prod as usize].rhs.get(it.dot as usize)
                                            == Some(&Symbol::T(t as TerminalId))
                                })
                                .map(|(it, _)| item_string(&a.productions, *it, name))
                                .collect();
                            conflicts.push(Conflict {
                                state: sid as StateId,
                                lookahead: name(Symbol::T(t as TerminalId)),
                                kind: ConflictKind::ShiftReduce,
                                items,
                            });
                            Action::Error
                        }
                    }
                }
            };
        }
        action.push(row);
        let mut grow = vec![None; a.n_nonterminals];
        for (sym, target) in &st.transitions {
            if let Symbol::N(n) = sym {
                grow[*n as usize] = Some(*target);
            }
        }
        goto.push(grow);
    }

    if !conflicts.is_empty() {
        return Err(ConflictReport { conflicts });
    }
    Ok(Tables {
        grammar: g.clone(),
        productions: a.productions.clone(),
        n_terminals: a.n_terminals,
        n_nonterminals: a.n_nonterminals,
        kernels: a.states.iter().map(|s| s.kernel.clone()).collect(),
        transitions: a.states.iter().map(|s| s.transitions.clone()).collect(),
        action,
        goto,
        start_states: a.start_states.clone(),
    })
}
