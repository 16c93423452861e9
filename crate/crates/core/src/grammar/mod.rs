//! Annotated Yacc-style grammars.
//!
//! A grammar file declares terminals (with optional payload kinds and
//! recovery annotations), precedence levels, start symbols and rules. There
//! is no semantic-action code: the parser runtime builds uniform concrete
//! trees, so a grammar is purely declarative.
//!
//! ```text
//! %token <int> INT [@cost 1] [@recovery 0]
//! %token PLUS
//! %left PLUS
//! %start expr
//! %%
//! expr: INT
//!     | expr PLUS expr
//!     ;
//! ```

mod cost;
mod reader;

use std::collections::HashMap;
use std::fmt::{self, Write};

pub use cost::{BadCost, Cost};
pub use reader::{load_grammar, GrammarError, GrammarErrorKind};

pub type TerminalId = u16;
pub type NonTerminalId = u16;
pub type ProductionId = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    T(TerminalId),
    N(NonTerminalId),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PayloadKind {
    None,
    Int,
    Text,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Literal {
    Int(i64),
    Text(String),
}

impl Literal {
    pub fn kind(&self) -> PayloadKind {
        match self {
            Literal::Int(_) => PayloadKind::Int,
            Literal::Text(_) => PayloadKind::Text,
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Int(n) => write!(f, "{n}"),
            Literal::Text(s) => {
                f.write_char('"')?;
                for c in s.chars() {
                    match c {
                        '"' => f.write_str("\\\"")?,
                        '\\' => f.write_str("\\\\")?,
                        '\n' => f.write_str("\\n")?,
                        c => f.write_char(c)?,
                    }
                }
                f.write_char('"')
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Terminal {
    pub name: String,
    pub payload_kind: PayloadKind,
    pub cost: Cost,
    pub recovery: Option<Literal>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonTerminal {
    pub name: String,
    pub recoverable: bool,
    pub recovery_cost: Option<Cost>,
}

impl NonTerminal {
    /// Cost of synthesizing a placeholder for this nonterminal, if allowed.
    pub fn placeholder_cost(&self) -> Option<Cost> {
        self.recoverable.then(|| self.recovery_cost.unwrap_or(Cost::ONE))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Production {
    pub id: ProductionId,
    pub lhs: NonTerminalId,
    pub rhs: Vec<Symbol>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Assoc {
    Left,
    Right,
    NonAssoc,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrecLevel {
    pub assoc: Assoc,
    pub terminals: Vec<TerminalId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grammar {
    pub terminals: Vec<Terminal>,
    pub nonterminals: Vec<NonTerminal>,
    pub productions: Vec<Production>,
    pub start_symbols: Vec<NonTerminalId>,
    /// Lowest precedence first.
    pub precedence: Vec<PrecLevel>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Issue {
    Unreachable(String),
    Unproductive(String),
    UnusedTerminal(String),
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Issue::Unreachable(n) => write!(f, "nonterminal {n} is unreachable from the start symbols"),
            Issue::Unproductive(n) => write!(f, "nonterminal {n} derives no terminal string"),
            Issue::UnusedTerminal(n) => write!(f, "unused terminal {n}"),
        }
    }
}

impl Grammar {
    pub fn terminal(&self, name: &str) -> Option<TerminalId> {
        self.terminals.iter().position(|t| t.name == name).map(|i| i as TerminalId)
    }

    pub fn nonterminal(&self, name: &str) -> Option<NonTerminalId> {
        self.nonterminals.iter().position(|n| n.name == name).map(|i| i as NonTerminalId)
    }

    pub fn symbol(&self, name: &str) -> Option<Symbol> {
        self.terminal(name).map(Symbol::T).or_else(|| self.nonterminal(name).map(Symbol::N))
    }

    pub fn symbol_name(&self, sym: Symbol) -> &str {
        match sym {
            Symbol::T(t) => &self.terminals[t as usize].name,
            Symbol::N(n) => &self.nonterminals[n as usize].name,
        }
    }

    pub fn productions_of(&self, nt: NonTerminalId) -> impl Iterator<Item = &Production> {
        self.productions.iter().filter(move |p| p.lhs == nt)
    }

    /// Precedence level (index, assoc) of a terminal, if declared.
    pub fn terminal_precedence(&self, t: TerminalId) -> Option<(usize, Assoc)> {
        self.precedence
            .iter()
            .enumerate()
            .find(|(_, lvl)| lvl.terminals.contains(&t))
            .map(|(i, lvl)| (i, lvl.assoc))
    }

    /// Precedence of a production: that of its rightmost terminal, when the
    /// terminal has one.
    pub fn production_precedence(&self, p: ProductionId) -> Option<(usize, Assoc)> {
        self.productions[p as usize].rhs.iter().rev().find_map(|s| match s {
            Symbol::T(t) => Some(self.terminal_precedence(*t)),
            Symbol::N(_) => None,
        })?
    }

    /// Nonterminals that derive some terminal string.
    pub fn productive(&self) -> Vec<bool> {
        let mut productive = vec![false; self.nonterminals.len()];
        loop {
            let mut changed = false;
            for p in &self.productions {
                if productive[p.lhs as usize] {
                    continue;
                }
                let ok = p.rhs.iter().all(|s| match s {
                    Symbol::T(_) => true,
                    Symbol::N(n) => productive[*n as usize],
                });
                if ok {
                    productive[p.lhs as usize] = true;
                    changed = true;
                }
            }
            if !changed {
                return productive;
            }
        }
    }

    /// Diagnostic-only structural checks. An empty list means clean.
    pub fn check(&self) -> Vec<Issue> {
        check_grammar(self)
    }
}

/// Enumerates unreachable nonterminals, unproductive nonterminals and
/// unused terminals, in declaration order.
pub fn check_grammar(g: &Grammar) -> Vec<Issue> {
    let mut issues = Vec::new();

    let mut reachable = vec![false; g.nonterminals.len()];
    let mut stack: Vec<NonTerminalId> = g.start_symbols.clone();
    while let Some(n) = stack.pop() {
        if std::mem::replace(&mut reachable[n as usize], true) {
            continue;
        }
        for p in g.productions_of(n) {
            for s in &p.rhs {
                if let Symbol::N(m) = s {
                    if !reachable[*m as usize] {
                        stack.push(*m);
                    }
                }
            }
        }
    }
    for (i, nt) in g.nonterminals.iter().enumerate() {
        if !reachable[i] {
            issues.push(Issue::Unreachable(nt.name.clone()));
        }
    }

    for (i, ok) in g.productive().into_iter().enumerate() {
        if !ok {
            issues.push(Issue::Unproductive(g.nonterminals[i].name.clone()));
        }
    }

    let mut used = vec![false; g.terminals.len()];
    for p in &g.productions {
        for s in &p.rhs {
            if let Symbol::T(t) = s {
                used[*t as usize] = true;
            }
        }
    }
    for (i, t) in g.terminals.iter().enumerate() {
        if !used[i] {
            issues.push(Issue::UnusedTerminal(t.name.clone()));
        }
    }
    issues
}

impl fmt::Display for Grammar {
    /// Canonical file form; `load_grammar` of the output yields an equal grammar.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.terminals {
            f.write_str("%token ")?;
            match t.payload_kind {
                PayloadKind::None => {}
                PayloadKind::Int => f.write_str("<int> ")?,
                PayloadKind::Text => f.write_str("<string> ")?,
            }
            write!(f, "{} [@cost {}]", t.name, t.cost)?;
            if let Some(lit) = &t.recovery {
                write!(f, " [@recovery {lit}]")?;
            }
            f.write_char('\n')?;
        }
        for lvl in &self.precedence {
            let kw = match lvl.assoc {
                Assoc::Left => "%left",
                Assoc::Right => "%right",
                Assoc::NonAssoc => "%nonassoc",
            };
            f.write_str(kw)?;
            for t in &lvl.terminals {
                write!(f, " {}", self.terminals[*t as usize].name)?;
            }
            f.write_char('\n')?;
        }
        for s in &self.start_symbols {
            writeln!(f, "%start {}", self.nonterminals[*s as usize].name)?;
        }
        f.write_str("%%\n")?;

        let mut annotated: HashMap<NonTerminalId, ()> = HashMap::new();
        let mut i = 0;
        while i < self.productions.len() {
            let lhs = self.productions[i].lhs;
            let nt = &self.nonterminals[lhs as usize];
            f.write_str(&nt.name)?;
            if annotated.insert(lhs, ()).is_none() && nt.recoverable {
                f.write_str(" [@recovery]")?;
                if let Some(c) = nt.recovery_cost {
                    write!(f, " [@cost {c}]")?;
                }
            }
            f.write_char(':')?;
            let mut first = true;
            while i < self.productions.len() && self.productions[i].lhs == lhs {
                if !first {
                    f.write_str("\n  |")?;
                }
                first = false;
                for s in &self.productions[i].rhs {
                    write!(f, " {}", self.symbol_name(*s))?;
                }
                i += 1;
            }
            f.write_str("\n  ;\n")?;
        }
        Ok(())
    }
}
