use super::{Item, StateId, Tables};
use crate::grammar::{Cost, Grammar, NonTerminalId, ProductionId, Symbol};
use std::fmt;
use thiserror::Error;

/// How a nonterminal is synthesized at least cost.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Synthesis {
    Placeholder,
    Expand(ProductionId),
    Impossible,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StatePlan {
    pub best_item: Option<Item>,
    pub cost_to_accept: Cost,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompletionPlan {
    /// Per terminal, end-marker last (always infinite).
    pub terminal_cost: Vec<Cost>,
    /// Per nonterminal, augmented start symbols included (always infinite).
    pub nonterminal_cost: Vec<Cost>,
    pub nonterminal_choice: Vec<Synthesis>,
    pub states: Vec<StatePlan>,
}

impl CompletionPlan {
    pub fn synthesis_cost(&self, s: Symbol) -> Cost {
        match s {
            Symbol::T(t) => self.terminal_cost[t as usize],
            Symbol::N(n) => self.nonterminal_cost[n as usize],
        }
    }

    pub fn seq_cost(&self, seq: &[Symbol]) -> Cost {
        seq.iter().map(|s| self.synthesis_cost(*s)).sum()
    }

    /// Cost of synthesizing what remains after the dot of `item`.
    pub fn remainder_cost(&self, t: &Tables, item: Item) -> Cost {
        self.seq_cost(&t.productions[item.prod as usize].rhs[item.dot as usize..])
    }

    pub fn cost_to_accept(&self, s: StateId) -> Cost {
        self.states[s as usize].cost_to_accept
    }

    pub fn best_item(&self, s: StateId) -> Option<Item> {
        self.states[s as usize].best_item
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub struct CostReport {
    pub states: Vec<StateId>,
}

impl fmt::Display for CostReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} state(s) have no finite completion:", self.states.len())?;
        for s in &self.states {
            write!(f, " {s}")?;
        }
        Ok(())
    }
}

/// Symbol synthesis costs by fixpoint iteration.
fn symbol_costs(t: &Tables, g: &Grammar) -> (Vec<Cost>, Vec<Cost>, Vec<Synthesis>) {
    let mut tc: Vec<Cost> = g.terminals.iter().map(|t| t.cost).collect();
    tc.push(Cost::Infinite);
    let n_base = g.nonterminals.len();
    let mut nc = vec![Cost::Infinite; t.n_nonterminals];
    let mut choice = vec![Synthesis::Impossible; t.n_nonterminals];
    for (i, nt) in g.nonterminals.iter().enumerate() {
        if let Some(c) = nt.placeholder_cost() {
            if c.is_finite() {
                nc[i] = c;
                choice[i] = Synthesis::Placeholder;
            }
        }
    }
    loop {
        let mut changed = false;
        for p in &g.productions {
            let c: Cost = p
                .rhs
                .iter()
                .map(|s| match s {
                    Symbol::T(x) => tc[*x as usize],
                    Symbol::N(n) => nc[*n as usize],
                })
                .sum();
            let l = p.lhs as usize;
            if c < nc[l] {
                nc[l] = c;
                choice[l] = Synthesis::Expand(p.id);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    debug_assert!(nc[n_base..].iter().all(|c| !c.is_finite()));
    (tc, nc, choice)
}

/// Per-state minimal completion costs and the item realizing them.
///
/// The cost of a kernel item `A -> α . β` in state `s` is the synthesis cost
/// of `β` plus the best cost of the state reached by `goto(t, A)`, over every
/// state `t` from which `α` leads to `s`. The accept item costs nothing.
pub fn compute_completion_costs(t: &Tables, g: &Grammar) -> Result<CompletionPlan, CostReport> {
    let (tc, nc, choice) = symbol_costs(t, g);
    let mut plan = CompletionPlan {
        terminal_cost: tc,
        nonterminal_cost: nc,
        nonterminal_choice: choice,
        states: Vec::new(),
    };
    let n = t.n_states();

    // origins[s][k]: states t at which kernel item k of s was started.
    let mut origins: Vec<Vec<Vec<StateId>>> = t.kernels.iter().map(|k| vec![Vec::new(); k.len()]).collect();
    let by_lhs = {
        let mut v = vec![Vec::new(); t.n_nonterminals];
        for (i, p) in t.productions.iter().enumerate() {
            v[p.lhs as usize].push(i as ProductionId);
        }
        v
    };
    for st in 0..n {
        for item in closure_starts(t, &by_lhs, st as StateId) {
            let mut cur = st as StateId;
            for (j, sym) in t.productions[item as usize].rhs.iter().enumerate() {
                cur = t.transitions[cur as usize][sym];
                let k = t.kernels[cur as usize].binary_search(&Item { prod: item, dot: j as u16 + 1 }).unwrap();
                origins[cur as usize][k].push(st as StateId);
            }
        }
    }

    let item_cost = |plan: &CompletionPlan, cost: &[Cost], s: usize, k: usize| -> Cost {
        let it = t.kernels[s][k];
        let rem = plan.remainder_cost(t, it);
        if !rem.is_finite() {
            return Cost::Infinite;
        }
        if t.is_augmented(it.prod) {
            return rem;
        }
        let lhs = t.productions[it.prod as usize].lhs;
        let tail = origins[s][k]
            .iter()
            .map(|o| cost[t.goto[*o as usize][lhs as usize].unwrap() as usize])
            .min()
            .unwrap_or(Cost::Infinite);
        rem + tail
    };

    let mut cost = vec![Cost::Infinite; n];
    loop {
        let mut changed = false;
        for s in 0..n {
            for k in 0..t.kernels[s].len() {
                let c = item_cost(&plan, &cost, s, k);
                if c < cost[s] {
                    cost[s] = c;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }

    for s in 0..n {
        let best = (0..t.kernels[s].len())
            .filter(|k| item_cost(&plan, &cost, s, *k) == cost[s] && cost[s].is_finite())
            .map(|k| t.kernels[s][k])
            .min_by_key(|it| (it.prod, t.productions[it.prod as usize].rhs.len() - it.dot as usize));
        plan.states.push(StatePlan { best_item: best, cost_to_accept: cost[s] });
    }

    let bad: Vec<StateId> = (0..n).filter(|s| !cost[*s].is_finite()).map(|s| s as StateId).collect();
    if bad.is_empty() {
        Ok(plan)
    } else {
        Err(CostReport { states: bad })
    }
}

/// Productions with an item `A -> . γ` in the closure of `s`.
fn closure_starts(t: &Tables, by_lhs: &[Vec<ProductionId>], s: StateId) -> Vec<ProductionId> {
    let mut seen = vec![false; t.n_nonterminals];
    let mut out = Vec::new();
    let mut work: Vec<NonTerminalId> = Vec::new();
    let mut visit = |it: Item, work: &mut Vec<NonTerminalId>| {
        if let Some(Symbol::N(b)) = t.productions[it.prod as usize].rhs.get(it.dot as usize) {
            if !std::mem::replace(&mut seen[*b as usize], true) {
                work.push(*b);
            }
        }
    };
    for it in &t.kernels[s as usize] {
        if it.dot == 0 {
            out.push(it.prod);
        }
        visit(*it, &mut work);
    }
    while let Some(b) = work.pop() {
        for &p in &by_lhs[b as usize] {
            out.push(p);
            visit(Item { prod: p, dot: 0 }, &mut work);
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}
