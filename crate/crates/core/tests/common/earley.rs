//! Earley recognizer and exhaustive tree enumeration for small grammars
//! without empty productions.

use std::collections::{HashMap, HashSet};

pub struct Cfg {
    pub start: &'static str,
    pub rules: Vec<(&'static str, Vec<&'static str>)>,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
struct EItem {
    rule: usize,
    dot: usize,
    origin: usize,
}

impl Cfg {
    pub fn is_nonterminal(&self, s: &str) -> bool {
        self.rules.iter().any(|(l, _)| *l == s)
    }

    /// Earley sets `0..=input.len()`.
    fn chart(&self, input: &[&str]) -> Vec<HashSet<EItem>> {
        let mut sets: Vec<HashSet<EItem>> = vec![HashSet::new(); input.len() + 1];
        let mut agenda: Vec<EItem> = Vec::new();
        for (r, (l, _)) in self.rules.iter().enumerate() {
            if *l == self.start {
                agenda.push(EItem { rule: r, dot: 0, origin: 0 });
            }
        }
        for k in 0..=input.len() {
            if k > 0 {
                // Scan.
                let prev: Vec<EItem> = sets[k - 1].iter().copied().collect();
                for it in prev {
                    let rhs = &self.rules[it.rule].1;
                    if it.dot < rhs.len() && rhs[it.dot] == input[k - 1] {
                        agenda.push(EItem { dot: it.dot + 1, ..it });
                    }
                }
            }
            while let Some(it) = agenda.pop() {
                if !sets[k].insert(it) {
                    continue;
                }
                let (lhs, rhs) = &self.rules[it.rule];
                if it.dot < rhs.len() {
                    let next = rhs[it.dot];
                    // Predict.
                    for (r, (l, _)) in self.rules.iter().enumerate() {
                        if *l == next {
                            agenda.push(EItem { rule: r, dot: 0, origin: k });
                        }
                    }
                } else {
                    // Complete.
                    let waiting: Vec<EItem> = sets[it.origin].iter().copied().collect();
                    for w in waiting {
                        let wr = &self.rules[w.rule].1;
                        if w.dot < wr.len() && wr[w.dot] == *lhs {
                            agenda.push(EItem { dot: w.dot + 1, ..w });
                        }
                    }
                }
            }
        }
        sets
    }

    pub fn accepts(&self, input: &[&str]) -> bool {
        let c = self.chart(input);
        c[input.len()].iter().any(|it| {
            let (l, r) = &self.rules[it.rule];
            *l == self.start && it.origin == 0 && it.dot == r.len()
        })
    }

    /// Length of the longest prefix of `input` that is a prefix of some
    /// sentence.
    pub fn viable_prefix_len(&self, input: &[&str]) -> usize {
        let c = self.chart(input);
        (0..=input.len()).rev().find(|&k| !c[k].is_empty()).unwrap_or(0)
    }

    /// Every parse tree of `input`, as s-expressions `(lhs child...)`.
    pub fn trees(&self, input: &[&str]) -> Vec<Tree> {
        let mut memo = HashMap::new();
        self.sym_trees(self.start, input, 0, input.len(), &mut memo)
    }

    fn sym_trees(
        &self,
        sym: &'static str,
        input: &[&str],
        i: usize,
        j: usize,
        memo: &mut HashMap<(&'static str, usize, usize), Vec<Tree>>,
    ) -> Vec<Tree> {
        if !self.is_nonterminal(sym) {
            return if j == i + 1 && input[i] == sym { vec![Tree::Leaf(sym.to_string())] } else { vec![] };
        }
        if let Some(v) = memo.get(&(sym, i, j)) {
            return v.clone();
        }
        // Rules have no empty right-hand side, so each symbol spans at least
        // one token and recursion on a strictly smaller or equal span with
        // fewer remaining symbols terminates.
        memo.insert((sym, i, j), vec![]);
        let mut out = Vec::new();
        for (l, rhs) in &self.rules {
            if *l != sym || rhs.len() > j - i {
                continue;
            }
            for kids in self.seq_trees(rhs, input, i, j, memo) {
                out.push(Tree::Node(sym.to_string(), kids));
            }
        }
        memo.insert((sym, i, j), out.clone());
        out
    }

    fn seq_trees(
        &self,
        rhs: &[&'static str],
        input: &[&str],
        i: usize,
        j: usize,
        memo: &mut HashMap<(&'static str, usize, usize), Vec<Tree>>,
    ) -> Vec<Vec<Tree>> {
        if rhs.is_empty() {
            return if i == j { vec![vec![]] } else { vec![] };
        }
        let mut out = Vec::new();
        let rest = rhs.len() - 1;
        for mid in i + 1..=j.saturating_sub(rest) {
            if rhs.len() == 1 && mid != j {
                continue;
            }
            let firsts = self.sym_trees(rhs[0], input, i, mid, memo);
            if firsts.is_empty() {
                continue;
            }
            for tail in self.seq_trees(&rhs[1..], input, mid, j, memo) {
                for f in &firsts {
                    let mut v = vec![f.clone()];
                    v.extend(tail.iter().cloned());
                    out.push(v);
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tree {
    Leaf(String),
    Node(String, Vec<Tree>),
}

impl std::fmt::Display for Tree {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Tree::Leaf(s) => write!(f, "{s}"),
            Tree::Node(s, kids) => {
                write!(f, "({s}")?;
                for k in kids {
                    write!(f, " {k}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// The 5-terminal test grammar and its operator table (higher binds
/// tighter, all left-associative).
pub fn arith() -> (Cfg, Vec<(&'static str, u32)>) {
    let cfg = Cfg {
        start: "e",
        rules: vec![
            ("e", vec!["e", "PLUS", "e"]),
            ("e", vec!["e", "STAR", "e"]),
            ("e", vec!["LPAREN", "e", "RPAREN"]),
            ("e", vec!["INT"]),
        ],
    };
    (cfg, vec![("PLUS", 1), ("STAR", 2)])
}

/// Same grammar in the toolkit's input format.
pub const ARITH_GRAMMAR: &str = "\
%token <int> INT [@cost 1] [@recovery 0]
%token PLUS [@cost 2]
%token STAR [@cost 2]
%token LPAREN [@cost 3]
%token RPAREN [@cost 1]
%left PLUS
%left STAR
%start e
%%
e: e PLUS e
  | e STAR e
  | LPAREN e RPAREN
  | INT
  ;
";

pub const ARITH_TERMINALS: [&str; 5] = ["INT", "PLUS", "STAR", "LPAREN", "RPAREN"];

/// Terminal costs as written in [`ARITH_GRAMMAR`].
pub fn arith_cost(t: &str) -> u64 {
    match t {
        "INT" | "RPAREN" => 1,
        "PLUS" | "STAR" => 2,
        _ => 3,
    }
}

fn binop(t: &Tree, ops: &[(&str, u32)]) -> Option<u32> {
    match t {
        Tree::Node(_, k) if k.len() == 3 => match &k[1] {
            Tree::Leaf(op) => ops.iter().find(|(o, _)| o == op).map(|(_, p)| *p),
            _ => None,
        },
        _ => None,
    }
}

/// Whether every operator node respects precedence and left associativity.
pub fn disambiguated(t: &Tree, ops: &[(&str, u32)]) -> bool {
    let Tree::Node(_, kids) = t else { return true };
    if let Some(p) = binop(t, ops) {
        if binop(&kids[0], ops).is_some_and(|q| q < p) || binop(&kids[2], ops).is_some_and(|q| q <= p) {
            return false;
        }
    }
    kids.iter().all(|k| disambiguated(k, ops))
}
