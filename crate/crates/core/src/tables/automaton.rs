use crate::grammar::{Grammar, NonTerminalId, Symbol, TerminalId};
use std::collections::{BTreeMap, HashMap, VecDeque};

pub type StateId = u32;

/// An LR(0) item: production index (into the extended production list) and
/// dot position.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Item {
    pub prod: u32,
    pub dot: u16,
}

/// A production of the augmented grammar. Augmented start productions
/// `S' -> S` come after the grammar's own productions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtProduction {
    pub lhs: NonTerminalId,
    pub rhs: Vec<Symbol>,
}

/// Fixed-size set of terminals (end-marker included).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct TermSet(Vec<u64>);

impl TermSet {
    pub fn new(n: usize) -> Self {
        TermSet(vec![0; n.div_ceil(64)])
    }

    pub fn insert(&mut self, t: usize) -> bool {
        let (w, b) = (t / 64, t % 64);
        let had = self.0[w] & (1 << b) != 0;
        self.0[w] |= 1 << b;
        !had
    }

    pub fn contains(&self, t: usize) -> bool {
        self.0.get(t / 64).is_some_and(|w| w & (1 << (t % 64)) != 0)
    }

    pub fn union_with(&mut self, other: &TermSet) -> bool {
        let mut changed = false;
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            let n = *a | *b;
            changed |= n != *a;
            *a = n;
        }
        changed
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0
            .iter()
            .enumerate()
            .flat_map(|(w, bits)| (0..64).filter(move |b| bits & (1u64 << b) != 0).map(move |b| w * 64 + b))
    }

    pub fn is_empty(&self) -> bool {
        self.0.iter().all(|w| *w == 0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LrState {
    pub kernel: Vec<Item>,
    /// Closure items with their LALR(1) lookaheads, kernel items first.
    pub items: Vec<(Item, TermSet)>,
    pub transitions: BTreeMap<Symbol, StateId>,
}

/// Canonical LR(0) collection with LALR(1) lookaheads.
#[derive(Clone, Debug)]
pub struct Automaton {
    pub grammar: Grammar,
    pub productions: Vec<ExtProduction>,
    /// Terminal count including the end-marker, which is the last terminal.
    pub n_terminals: usize,
    /// Nonterminal count including augmented start symbols.
    pub n_nonterminals: usize,
    pub states: Vec<LrState>,
    /// One start state per grammar start symbol, in declaration order.
    pub start_states: Vec<StateId>,
}

impl Automaton {
    pub fn eof(&self) -> TerminalId {
        (self.n_terminals - 1) as TerminalId
    }

    pub fn item_next(&self, item: Item) -> Option<Symbol> {
        self.productions[item.prod as usize].rhs.get(item.dot as usize).copied()
    }

    pub fn is_augmented(&self, prod: u32) -> bool {
        prod as usize >= self.grammar.productions.len()
    }
}

pub(crate) struct FirstSets {
    pub nullable: Vec<bool>,
    pub first: Vec<TermSet>,
}

pub(crate) fn first_sets(prods: &[ExtProduction], n_terms: usize, n_nts: usize) -> FirstSets {
    let mut nullable = vec![false; n_nts];
    let mut first = vec![TermSet::new(n_terms + 1); n_nts];
    loop {
        let mut changed = false;
        for p in prods {
            let lhs = p.lhs as usize;
            let mut all_nullable = true;
            for s in &p.rhs {
                match s {
                    Symbol::T(t) => {
                        changed |= first[lhs].insert(*t as usize);
                        all_nullable = false;
                    }
                    Symbol::N(n) => {
                        let f = first[*n as usize].clone();
                        changed |= first[lhs].union_with(&f);
                        if !nullable[*n as usize] {
                            all_nullable = false;
                        }
                    }
                }
                if !all_nullable {
                    break;
                }
            }
            if all_nullable && !nullable[lhs] {
                nullable[lhs] = true;
                changed = true;
            }
        }
        if !changed {
            return FirstSets { nullable, first };
        }
    }
}

impl FirstSets {
    /// FIRST of a symbol string; the flag says whether it is nullable.
    fn of_seq(&self, seq: &[Symbol], n: usize) -> (TermSet, bool) {
        let mut out = TermSet::new(n);
        for s in seq {
            match s {
                Symbol::T(t) => {
                    out.insert(*t as usize);
                    return (out, false);
                }
                Symbol::N(nt) => {
                    out.union_with(&self.first[*nt as usize]);
                    if !self.nullable[*nt as usize] {
                        return (out, false);
                    }
                }
            }
        }
        (out, true)
    }
}

fn lr0_closure(prods: &[ExtProduction], by_lhs: &[Vec<u32>], kernel: &[Item]) -> Vec<Item> {
    let mut items: Vec<Item> = kernel.to_vec();
    let mut seen = vec![false; by_lhs.len()];
    let mut i = 0;
    while i < items.len() {
        let it = items[i];
        if let Some(Symbol::N(n)) = prods[it.prod as usize].rhs.get(it.dot as usize) {
            if !std::mem::replace(&mut seen[*n as usize], true) {
                for &p in &by_lhs[*n as usize] {
                    items.push(Item { prod: p, dot: 0 });
                }
            }
        }
        i += 1;
    }
    items
}

/// LR(1) closure of `seed` with lookahead sets, over terminal-set size `n`.
fn lr1_closure(
    prods: &[ExtProduction],
    by_lhs: &[Vec<u32>],
    firsts: &FirstSets,
    n: usize,
    seed: Vec<(Item, TermSet)>,
) -> Vec<(Item, TermSet)> {
    let mut items = seed;
    let mut index: HashMap<Item, usize> = items.iter().enumerate().map(|(i, (it, _))| (*it, i)).collect();
    let mut work: VecDeque<usize> = (0..items.len()).collect();
    while let Some(i) = work.pop_front() {
        let (it, la) = items[i].clone();
        let rhs = &prods[it.prod as usize].rhs;
        let Some(Symbol::N(b)) = rhs.get(it.dot as usize) else { continue };
        let (mut f, nullable) = firsts.of_seq(&rhs[it.dot as usize + 1..], n);
        if nullable {
            f.union_with(&la);
        }
        for &p in &by_lhs[*b as usize] {
            let new = Item { prod: p, dot: 0 };
            match index.get(&new) {
                Some(&j) => {
                    if items[j].1.union_with(&f) {
                        work.push_back(j);
                    }
                }
                None => {
                    index.insert(new, items.len());
                    items.push((new, f.clone()));
                    work.push_back(items.len() - 1);
                }
            }
        }
    }
    items
}

/// Builds the LR(0) automaton and computes LALR(1) lookaheads by the
/// spontaneous-generation/propagation method.
pub fn build_automaton(g: &Grammar) -> Automaton {
    let n_terminals = g.terminals.len() + 1;
    let eof = (n_terminals - 1) as TerminalId;
    let n_base_nts = g.nonterminals.len();
    let n_nonterminals = n_base_nts + g.start_symbols.len();

    let mut productions: Vec<ExtProduction> =
        g.productions.iter().map(|p| ExtProduction { lhs: p.lhs, rhs: p.rhs.clone() }).collect();
    for (k, s) in g.start_symbols.iter().enumerate() {
        productions.push(ExtProduction { lhs: (n_base_nts + k) as NonTerminalId, rhs: vec![Symbol::N(*s)] });
    }
    let mut by_lhs = vec![Vec::new(); n_nonterminals];
    for (i, p) in productions.iter().enumerate() {
        by_lhs[p.lhs as usize].push(i as u32);
    }

    // LR(0) collection.
    let mut kernels: Vec<Vec<Item>> = Vec::new();
    let mut index: HashMap<Vec<Item>, StateId> = HashMap::new();
    let mut transitions: Vec<BTreeMap<Symbol, StateId>> = Vec::new();
    let mut start_states = Vec::new();
    for k in 0..g.start_symbols.len() {
        let kernel = vec![Item { prod: (g.productions.len() + k) as u32, dot: 0 }];
        index.insert(kernel.clone(), kernels.len() as StateId);
        start_states.push(kernels.len() as StateId);
        kernels.push(kernel);
        transitions.push(BTreeMap::new());
    }
    let mut s = 0;
    while s < kernels.len() {
        let closure = lr0_closure(&productions, &by_lhs, &kernels[s]);
        let mut groups: BTreeMap<Symbol, Vec<Item>> = BTreeMap::new();
        for it in closure {
            if let Some(sym) = productions[it.prod as usize].rhs.get(it.dot as usize) {
                groups.entry(*sym).or_default().push(Item { prod: it.prod, dot: it.dot + 1 });
            }
        }
        for (sym, mut kernel) in groups {
            kernel.sort();
            kernel.dedup();
            let target = *index.entry(kernel.clone()).or_insert_with(|| {
                kernels.push(kernel);
                transitions.push(BTreeMap::new());
                (kernels.len() - 1) as StateId
            });
            transitions[s].insert(sym, target);
        }
        s += 1;
    }

    // LALR(1) lookaheads. Bit `n_terminals` is the propagation marker.
    let firsts = first_sets(&productions, n_terminals, n_nonterminals);
    let marker = n_terminals;
    let width = n_terminals + 1;
    let mut la: Vec<Vec<TermSet>> = kernels.iter().map(|k| vec![TermSet::new(width); k.len()]).collect();
    let kernel_pos = |kernels: &Vec<Vec<Item>>, s: usize, it: &Item| kernels[s].binary_search(it).unwrap();
    for &st in &start_states {
        la[st as usize][0].insert(eof as usize);
    }
    let mut propagate: Vec<((usize, usize), (usize, usize))> = Vec::new();
    for s in 0..kernels.len() {
        for (ki, k) in kernels[s].iter().enumerate() {
            let mut seed = TermSet::new(width);
            seed.insert(marker);
            let closure = lr1_closure(&productions, &by_lhs, &firsts, width, vec![(*k, seed)]);
            for (it, l) in closure {
                let Some(sym) = productions[it.prod as usize].rhs.get(it.dot as usize) else { continue };
                let t = transitions[s][sym] as usize;
                let adv = Item { prod: it.prod, dot: it.dot + 1 };
                let ti = kernel_pos(&kernels, t, &adv);
                for a in l.iter() {
                    if a == marker {
                        propagate.push(((s, ki), (t, ti)));
                    } else {
                        la[t][ti].insert(a);
                    }
                }
            }
        }
    }
    loop {
        let mut changed = false;
        for &((s, ki), (t, ti)) in &propagate {
            let src = la[s][ki].clone();
            changed |= la[t][ti].union_with(&src);
        }
        if !changed {
            break;
        }
    }

    let states = kernels
        .iter()
        .enumerate()
        .map(|(s, kernel)| {
            let seed = kernel.iter().zip(&la[s]).map(|(it, l)| (*it, l.clone())).collect();
            let items = lr1_closure(&productions, &by_lhs, &firsts, width, seed)
                .into_iter()
                .map(|(it, l)| {
                    let mut trimmed = TermSet::new(n_terminals);
                    for a in l.iter().filter(|a| *a < n_terminals) {
                        trimmed.insert(a);
                    }
                    (it, trimmed)
                })
                .collect();
            LrState { kernel: kernel.clone(), items, transitions: transitions[s].clone() }
        })
        .collect();

    Automaton { grammar: g.clone(), productions, n_terminals, n_nonterminals, states, start_states }
}
