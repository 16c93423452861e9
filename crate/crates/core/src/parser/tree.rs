use crate::grammar::{Literal, Symbol};
use crate::position::Range;
use crate::tables::Tables;
use std::fmt::{self, Write};
use std::sync::Arc;

/// Uniform concrete parse tree. Terminal leaves have no children.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Tree {
    pub symbol: Symbol,
    pub children: Vec<Arc<Tree>>,
    pub payload: Option<Literal>,
    pub range: Range,
    pub synthesized: bool,
}

impl Tree {
    pub fn leaf(symbol: Symbol, payload: Option<Literal>, range: Range) -> Tree {
        Tree { symbol, children: Vec::new(), payload, range, synthesized: false }
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty() && matches!(self.symbol, Symbol::T(_))
    }

    /// Non-synthesized terminal leaves, left to right.
    pub fn leaves(&self) -> Vec<&Tree> {
        let mut out = Vec::new();
        fn go<'a>(t: &'a Tree, out: &mut Vec<&'a Tree>) {
            if let Symbol::T(_) = t.symbol {
                if !t.synthesized {
                    out.push(t);
                }
            }
            for c in &t.children {
                go(c, out);
            }
        }
        go(self, &mut out);
        out
    }

    pub fn count_synthesized(&self) -> usize {
        self.synthesized as usize + self.children.iter().map(|c| c.count_synthesized()).sum::<usize>()
    }

    /// Indented dump, one node per line.
    pub fn dump(&self, t: &Tables) -> String {
        let mut s = String::new();
        self.dump_into(t, 0, &mut s);
        s
    }

    fn dump_into(&self, t: &Tables, depth: usize, out: &mut String) {
        for _ in 0..depth {
            out.push_str("  ");
        }
        out.push_str(&t.symbol_name(self.symbol));
        if let Some(p) = &self.payload {
            let _ = write!(out, " {p}");
        }
        if self.synthesized {
            out.push_str(" ⟨synth⟩");
        }
        let _ = writeln!(out, " @{}-{}", self.range.start, self.range.end);
        for c in &self.children {
            c.dump_into(t, depth + 1, out);
        }
    }
}

/// Compact s-expression form, used in tests.
pub struct Sexp<'a>(pub &'a Tree, pub &'a Tables);

impl fmt::Display for Sexp<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let Sexp(tree, t) = self;
        match tree.symbol {
            Symbol::T(_) => {
                match &tree.payload {
                    Some(p) => write!(f, "{p}")?,
                    None => f.write_str(&t.symbol_name(tree.symbol))?,
                }
                if tree.synthesized {
                    f.write_str("⟨synth⟩")?;
                }
                Ok(())
            }
            Symbol::N(_) => {
                write!(f, "({}", t.symbol_name(tree.symbol))?;
                if tree.synthesized {
                    f.write_str("⟨synth⟩")?;
                }
                for c in &tree.children {
                    write!(f, " {}", Sexp(c, t))?;
                }
                f.write_str(")")
            }
        }
    }
}
