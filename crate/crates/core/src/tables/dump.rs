//! Versioned binary dump of tables and completion plan.
//!
//! Layout: the magic bytes, the canonical grammar text, then every table in
//! state order. All integers are little-endian `u32` unless noted.

use super::{Action, CompletionPlan, ExtProduction, Item, StatePlan, Synthesis, Tables};
use crate::grammar::{load_grammar, Cost, Symbol};
use num_rational::Ratio;
use std::collections::BTreeMap;
use thiserror::Error;

pub const MAGIC: &[u8; 5] = b"MMTB1";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DumpError {
    #[error("not a table dump (bad magic)")]
    BadMagic,
    #[error("truncated table dump")]
    Truncated,
    #[error("corrupt table dump: {0}")]
    Corrupt(String),
}

struct W(Vec<u8>);

impl W {
    fn u8(&mut self, v: u8) {
        self.0.push(v);
    }
    fn u32(&mut self, v: u32) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn u64(&mut self, v: u64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn len(&mut self, n: usize) {
        self.u32(n as u32);
    }
    fn cost(&mut self, c: Cost) {
        match c {
            Cost::Infinite => self.u8(0),
            Cost::Finite(r) => {
                self.u8(1);
                self.u64(*r.numer());
                self.u64(*r.denom());
            }
        }
    }
    fn sym(&mut self, s: Symbol) {
        match s {
            Symbol::T(t) => {
                self.u8(0);
                self.u32(t as u32)
            }
            Symbol::N(n) => {
                self.u8(1);
                self.u32(n as u32)
            }
        }
    }
    fn item(&mut self, it: Option<Item>) {
        match it {
            None => self.u8(0),
            Some(it) => {
                self.u8(1);
                self.u32(it.prod);
                self.u32(it.dot as u32);
            }
        }
    }
}

struct R<'a>(&'a [u8]);

impl R<'_> {
    fn take(&mut self, n: usize) -> Result<&[u8], DumpError> {
        if self.0.len() < n {
            return Err(DumpError::Truncated);
        }
        let (a, b) = self.0.split_at(n);
        self.0 = b;
        Ok(a)
    }
    fn u8(&mut self) -> Result<u8, DumpError> {
        Ok(self.take(1)?[0])
    }
    fn u32(&mut self) -> Result<u32, DumpError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    fn u64(&mut self) -> Result<u64, DumpError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn len(&mut self) -> Result<usize, DumpError> {
        let n = self.u32()? as usize;
        if n > self.0.len() * 8 + 64 {
            return Err(DumpError::Corrupt(format!("length {n} exceeds input")));
        }
        Ok(n)
    }
    fn cost(&mut self) -> Result<Cost, DumpError> {
        match self.u8()? {
            0 => Ok(Cost::Infinite),
            1 => {
                let (n, d) = (self.u64()?, self.u64()?);
                if d == 0 {
                    return Err(DumpError::Corrupt("zero denominator".into()));
                }
                Ok(Cost::Finite(Ratio::new(n, d)))
            }
            t => Err(DumpError::Corrupt(format!("cost tag {t}"))),
        }
    }
    fn sym(&mut self) -> Result<Symbol, DumpError> {
        match self.u8()? {
            0 => Ok(Symbol::T(self.u32()? as u16)),
            1 => Ok(Symbol::N(self.u32()? as u16)),
            t => Err(DumpError::Corrupt(format!("symbol tag {t}"))),
        }
    }
    fn item(&mut self) -> Result<Option<Item>, DumpError> {
        match self.u8()? {
            0 => Ok(None),
            1 => Ok(Some(Item { prod: self.u32()?, dot: self.u32()? as u16 })),
            t => Err(DumpError::Corrupt(format!("item tag {t}"))),
        }
    }
}

pub fn write_tables(t: &Tables, plan: &CompletionPlan) -> Vec<u8> {
    let mut w = W(MAGIC.to_vec());
    let text = t.grammar.to_string();
    w.len(text.len());
    w.0.extend_from_slice(text.as_bytes());
    w.len(t.n_states());
    for s in 0..t.n_states() {
        w.len(t.kernels[s].len());
        for it in &t.kernels[s] {
            w.item(Some(*it));
        }
        w.len(t.transitions[s].len());
        for (sym, to) in &t.transitions[s] {
            w.sym(*sym);
            w.u32(*to);
        }
        for a in &t.action[s] {
            match a {
                Action::Shift(x) => {
                    w.u8(0);
                    w.u32(*x)
                }
                Action::Reduce(p) => {
                    w.u8(1);
                    w.u32(*p)
                }
                Action::Accept => w.u8(2),
                Action::Error => w.u8(3),
            }
        }
        for g in &t.goto[s] {
            w.u32(g.unwrap_or(u32::MAX));
        }
    }
    w.len(t.start_states.len());
    for s in &t.start_states {
        w.u32(*s);
    }
    for c in &plan.terminal_cost {
        w.cost(*c);
    }
    for (c, ch) in plan.nonterminal_cost.iter().zip(&plan.nonterminal_choice) {
        w.cost(*c);
        match ch {
            Synthesis::Placeholder => w.u8(0),
            Synthesis::Expand(p) => {
                w.u8(1);
                w.u32(*p)
            }
            Synthesis::Impossible => w.u8(2),
        }
    }
    for sp in &plan.states {
        w.item(sp.best_item);
        w.cost(sp.cost_to_accept);
    }
    w.0
}

pub fn read_tables(bytes: &[u8]) -> Result<(Tables, CompletionPlan), DumpError> {
    if bytes.len() < MAGIC.len() || &bytes[..MAGIC.len()] != MAGIC {
        return Err(DumpError::BadMagic);
    }
    let mut r = R(&bytes[MAGIC.len()..]);
    let n = r.len()?;
    let text = std::str::from_utf8(r.take(n)?).map_err(|e| DumpError::Corrupt(e.to_string()))?;
    let grammar = load_grammar(text).map_err(|e| DumpError::Corrupt(e.to_string()))?;
    let n_terminals = grammar.terminals.len() + 1;
    let n_nonterminals = grammar.nonterminals.len() + grammar.start_symbols.len();
    let mut productions: Vec<ExtProduction> =
        grammar.productions.iter().map(|p| ExtProduction { lhs: p.lhs, rhs: p.rhs.clone() }).collect();
    for (k, s) in grammar.start_symbols.iter().enumerate() {
        productions.push(ExtProduction { lhs: (grammar.nonterminals.len() + k) as u16, rhs: vec![Symbol::N(*s)] });
    }

    let n_states = r.len()?;
    let (mut kernels, mut transitions, mut action, mut goto) = (vec![], vec![], vec![], vec![]);
    for _ in 0..n_states {
        let k = r.len()?;
        let mut kernel = Vec::with_capacity(k);
        for _ in 0..k {
            kernel.push(r.item()?.ok_or(DumpError::Corrupt("empty kernel item".into()))?);
        }
        kernels.push(kernel);
        let k = r.len()?;
        let mut tr = BTreeMap::new();
        for _ in 0..k {
            let s = r.sym()?;
            tr.insert(s, r.u32()?);
        }
        transitions.push(tr);
        let mut row = Vec::with_capacity(n_terminals);
        for _ in 0..n_terminals {
            row.push(match r.u8()? {
                0 => Action::Shift(r.u32()?),
                1 => Action::Reduce(r.u32()?),
                2 => Action::Accept,
                3 => Action::Error,
                t => return Err(DumpError::Corrupt(format!("action tag {t}"))),
            });
        }
        action.push(row);
        let mut grow = Vec::with_capacity(n_nonterminals);
        for _ in 0..n_nonterminals {
            let v = r.u32()?;
            grow.push((v != u32::MAX).then_some(v));
        }
        goto.push(grow);
    }
    let k = r.len()?;
    let mut start_states = Vec::with_capacity(k);
    for _ in 0..k {
        start_states.push(r.u32()?);
    }
    let mut terminal_cost = Vec::with_capacity(n_terminals);
    for _ in 0..n_terminals {
        terminal_cost.push(r.cost()?);
    }
    let (mut nonterminal_cost, mut nonterminal_choice) = (vec![], vec![]);
    for _ in 0..n_nonterminals {
        nonterminal_cost.push(r.cost()?);
        nonterminal_choice.push(match r.u8()? {
            0 => Synthesis::Placeholder,
            1 => Synthesis::Expand(r.u32()?),
            2 => Synthesis::Impossible,
            t => return Err(DumpError::Corrupt(format!("synthesis tag {t}"))),
        });
    }
    let mut states = Vec::with_capacity(n_states);
    for _ in 0..n_states {
        let best_item = r.item()?;
        states.push(StatePlan { best_item, cost_to_accept: r.cost()? });
    }
    if !r.0.is_empty() {
        return Err(DumpError::Corrupt("trailing bytes".into()));
    }
    let tables = Tables {
        grammar,
        productions,
        n_terminals,
        n_nonterminals,
        kernels,
        transitions,
        action,
        goto,
        start_states,
    };
    let plan = CompletionPlan { terminal_cost, nonterminal_cost, nonterminal_choice, states };
    Ok((tables, plan))
}
