use super::{
    Assoc, Cost, Grammar, Literal, NonTerminal, NonTerminalId, PayloadKind, PrecLevel, Production, Symbol, Terminal,
    TerminalId,
};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {kind}")]
pub struct GrammarError {
    pub line: u32,
    pub col: u32,
    pub kind: GrammarErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GrammarErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("duplicate symbol {0}")]
    Duplicate(String),
    #[error("undeclared symbol {0}")]
    Undeclared(String),
    #[error("bad annotation on {0}: {1}")]
    Annotation(String, String),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Directive(String),
    Separator,
    TypeTag(String),
    Annot(String, Option<String>),
    Colon,
    Bar,
    Semi,
    Eof,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: u32,
    col: u32,
}

fn err(line: u32, col: u32, kind: GrammarErrorKind) -> GrammarError {
    GrammarError { line, col, kind }
}

fn syntax(line: u32, col: u32, msg: impl Into<String>) -> GrammarError {
    err(line, col, GrammarErrorKind::Syntax(msg.into()))
}

struct Scanner<'a> {
    src: &'a [u8],
    i: usize,
    line: u32,
    col: u32,
}

impl<'a> Scanner<'a> {
    fn peek(&self) -> Option<u8> {
        self.src.get(self.i).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let b = self.peek()?;
        self.i += 1;
        if b == b'\n' {
            self.line += 1;
            self.col = 0;
        } else {
            self.col += 1;
        }
        Some(b)
    }

    fn ident(&mut self) -> String {
        let start = self.i;
        while matches!(self.peek(), Some(b) if b.is_ascii_alphanumeric() || b == b'_' || b == b'\'') {
            self.bump();
        }
        String::from_utf8_lossy(&self.src[start..self.i]).into_owned()
    }

    fn tokens(mut self) -> Result<Vec<Spanned>, GrammarError> {
        let mut out = Vec::new();
        loop {
            while let Some(b) = self.peek() {
                if b == b'#' {
                    while !matches!(self.peek(), None | Some(b'\n')) {
                        self.bump();
                    }
                } else if b.is_ascii_whitespace() {
                    self.bump();
                } else {
                    break;
                }
            }
            let (line, col) = (self.line, self.col);
            let Some(b) = self.peek() else {
                out.push(Spanned { tok: Tok::Eof, line, col });
                return Ok(out);
            };
            let tok = match b {
                b':' => {
                    self.bump();
                    Tok::Colon
                }
                b'|' => {
                    self.bump();
                    Tok::Bar
                }
                b';' => {
                    self.bump();
                    Tok::Semi
                }
                b'%' => {
                    self.bump();
                    if self.peek() == Some(b'%') {
                        self.bump();
                        Tok::Separator
                    } else {
                        let name = self.ident();
                        if name.is_empty() {
                            return Err(syntax(line, col, "expected a directive after '%'"));
                        }
                        Tok::Directive(name)
                    }
                }
                b'<' => {
                    self.bump();
                    let name = self.ident();
                    if self.bump() != Some(b'>') {
                        return Err(syntax(line, col, "unterminated payload type"));
                    }
                    Tok::TypeTag(name)
                }
                b'[' => self.annotation(line, col)?,
                b if b.is_ascii_alphabetic() || b == b'_' => Tok::Ident(self.ident()),
                other => {
                    return Err(syntax(line, col, format!("unexpected character {:?}", other as char)));
                }
            };
            out.push(Spanned { tok, line, col });
        }
    }

    /// `[@name]` or `[@name argument]`; the argument is kept verbatim.
    fn annotation(&mut self, line: u32, col: u32) -> Result<Tok, GrammarError> {
        self.bump();
        if self.bump() != Some(b'@') {
            return Err(syntax(line, col, "expected '@' after '['"));
        }
        let name = self.ident();
        while matches!(self.peek(), Some(b' ' | b'\t')) {
            self.bump();
        }
        let start = self.i;
        let mut in_string = false;
        let mut depth = 0;
        loop {
            match self.peek() {
                None | Some(b'\n') => return Err(syntax(line, col, "unterminated annotation")),
                Some(b'\\') if in_string => {
                    self.bump();
                    self.bump();
                }
                Some(b'"') => {
                    in_string = !in_string;
                    self.bump();
                }
                Some(b'[') if !in_string => {
                    depth += 1;
                    self.bump();
                }
                Some(b']') if !in_string && depth == 0 => break,
                Some(b']') if !in_string => {
                    depth -= 1;
                    self.bump();
                }
                Some(_) => {
                    self.bump();
                }
            }
        }
        let arg = String::from_utf8_lossy(&self.src[start..self.i]).trim().to_string();
        self.bump();
        Ok(Tok::Annot(name, (!arg.is_empty()).then_some(arg)))
    }
}

fn parse_literal(s: &str) -> Option<Literal> {
    if let Some(body) = s.strip_prefix('"').and_then(|r| r.strip_suffix('"')) {
        let mut out = String::new();
        let mut chars = body.chars();
        while let Some(c) = chars.next() {
            if c == '\\' {
                match chars.next()? {
                    'n' => out.push('\n'),
                    c => out.push(c),
                }
            } else if c == '"' {
                return None;
            } else {
                out.push(c);
            }
        }
        return Some(Literal::Text(out));
    }
    s.parse::<i64>().ok().map(Literal::Int)
}

struct PendingRule {
    lhs: String,
    line: u32,
    col: u32,
    annots: Vec<(String, Option<String>, u32, u32)>,
    alts: Vec<Vec<(String, u32, u32)>>,
}

/// Reads a grammar file. Terminals default to cost 1; nonterminals are only
/// synthesizable when annotated `[@recovery]`.
pub fn load_grammar(source: &str) -> Result<Grammar, GrammarError> {
    let toks = Scanner { src: source.as_bytes(), i: 0, line: 1, col: 0 }.tokens()?;
    let mut pos = 0;

    let mut terminals: Vec<Terminal> = Vec::new();
    let mut term_index: HashMap<String, TerminalId> = HashMap::new();
    let mut prec_raw: Vec<(Assoc, Vec<(String, u32, u32)>)> = Vec::new();
    let mut starts_raw: Vec<(String, u32, u32)> = Vec::new();

    // Declarations.
    loop {
        let Spanned { tok, line, col } = toks[pos].clone();
        pos += 1;
        match tok {
            Tok::Separator => break,
            Tok::Eof => return Err(syntax(line, col, "missing '%%' separator")),
            Tok::Directive(d) if d == "token" => {
                let mut payload_kind = PayloadKind::None;
                if let Tok::TypeTag(tag) = &toks[pos].tok {
                    payload_kind = match tag.as_str() {
                        "int" => PayloadKind::Int,
                        "string" => PayloadKind::Text,
                        other => {
                            return Err(syntax(toks[pos].line, toks[pos].col, format!("unknown payload type <{other}>")))
                        }
                    };
                    pos += 1;
                }
                let (name, nl, nc) = match &toks[pos] {
                    Spanned { tok: Tok::Ident(n), line, col } => (n.clone(), *line, *col),
                    s => return Err(syntax(s.line, s.col, "expected a terminal name")),
                };
                pos += 1;
                if term_index.contains_key(&name) {
                    return Err(err(nl, nc, GrammarErrorKind::Duplicate(name)));
                }
                let mut cost = None;
                let mut recovery = None;
                while let Spanned { tok: Tok::Annot(a, arg), line: al, col: ac } = &toks[pos] {
                    pos += 1;
                    let bad = |m: &str| err(*al, *ac, GrammarErrorKind::Annotation(name.clone(), m.to_string()));
                    match (a.as_str(), arg) {
                        ("cost", Some(c)) if cost.is_none() => {
                            cost = Some(c.parse::<Cost>().map_err(|_| bad("invalid cost"))?);
                        }
                        ("recovery", Some(lit)) if recovery.is_none() => {
                            recovery = Some(parse_literal(lit).ok_or_else(|| bad("invalid literal"))?);
                        }
                        _ => return Err(bad("unexpected annotation")),
                    }
                }
                let cost = cost.unwrap_or(Cost::ONE);
                match (&recovery, payload_kind) {
                    (Some(lit), k) if lit.kind() != k => {
                        return Err(err(nl, nc, GrammarErrorKind::Annotation(name, "recovery value kind mismatch".into())))
                    }
                    (None, k) if k != PayloadKind::None && cost.is_finite() => {
                        return Err(err(
                            nl,
                            nc,
                            GrammarErrorKind::Annotation(name, "a synthesizable payload terminal needs [@recovery]".into()),
                        ))
                    }
                    _ => {}
                }
                term_index.insert(name.clone(), terminals.len() as TerminalId);
                terminals.push(Terminal { name, payload_kind, cost, recovery });
            }
            Tok::Directive(d) if d == "left" || d == "right" || d == "nonassoc" => {
                let assoc = match d.as_str() {
                    "left" => Assoc::Left,
                    "right" => Assoc::Right,
                    _ => Assoc::NonAssoc,
                };
                let mut names = Vec::new();
                while let Spanned { tok: Tok::Ident(n), line, col } = &toks[pos] {
                    names.push((n.clone(), *line, *col));
                    pos += 1;
                }
                if names.is_empty() {
                    return Err(syntax(line, col, "empty precedence level"));
                }
                prec_raw.push((assoc, names));
            }
            Tok::Directive(d) if d == "start" => {
                let mut any = false;
                while let Spanned { tok: Tok::Ident(n), line, col } = &toks[pos] {
                    starts_raw.push((n.clone(), *line, *col));
                    pos += 1;
                    any = true;
                }
                if !any {
                    return Err(syntax(line, col, "expected a start symbol"));
                }
            }
            Tok::Directive(d) => return Err(syntax(line, col, format!("unknown directive %{d}"))),
            other => return Err(syntax(line, col, format!("unexpected {other:?} in declarations"))),
        }
    }

    // Rules.
    let mut rules: Vec<PendingRule> = Vec::new();
    loop {
        let Spanned { tok, line, col } = toks[pos].clone();
        pos += 1;
        let lhs = match tok {
            Tok::Eof => break,
            Tok::Ident(n) => n,
            other => return Err(syntax(line, col, format!("expected a rule, found {other:?}"))),
        };
        let mut annots = Vec::new();
        while let Spanned { tok: Tok::Annot(a, arg), line, col } = &toks[pos] {
            annots.push((a.clone(), arg.clone(), *line, *col));
            pos += 1;
        }
        if toks[pos].tok != Tok::Colon {
            return Err(syntax(toks[pos].line, toks[pos].col, "expected ':'"));
        }
        pos += 1;
        let mut alts = vec![Vec::new()];
        loop {
            let s = &toks[pos];
            pos += 1;
            match &s.tok {
                Tok::Ident(n) => alts.last_mut().unwrap().push((n.clone(), s.line, s.col)),
                Tok::Bar => alts.push(Vec::new()),
                Tok::Semi => break,
                Tok::Eof => return Err(syntax(s.line, s.col, "unterminated rule, expected ';'")),
                other => return Err(syntax(s.line, s.col, format!("unexpected {other:?} in rule"))),
            }
        }
        rules.push(PendingRule { lhs, line, col, annots, alts });
    }

    // Nonterminals are numbered by first appearance as a left-hand side.
    let mut nonterminals: Vec<NonTerminal> = Vec::new();
    let mut nt_index: HashMap<String, NonTerminalId> = HashMap::new();
    let mut annotated = vec![];
    for r in &rules {
        if term_index.contains_key(&r.lhs) {
            return Err(err(r.line, r.col, GrammarErrorKind::Duplicate(r.lhs.clone())));
        }
        if !nt_index.contains_key(&r.lhs) {
            nt_index.insert(r.lhs.clone(), nonterminals.len() as NonTerminalId);
            nonterminals.push(NonTerminal { name: r.lhs.clone(), recoverable: false, recovery_cost: None });
            annotated.push(false);
        }
        let id = nt_index[&r.lhs] as usize;
        if r.annots.is_empty() {
            continue;
        }
        let bad = |l: u32, c: u32, m: &str| err(l, c, GrammarErrorKind::Annotation(r.lhs.clone(), m.to_string()));
        if std::mem::replace(&mut annotated[id], true) {
            return Err(bad(r.line, r.col, "annotations given twice"));
        }
        let nt = &mut nonterminals[id];
        for (a, arg, l, c) in &r.annots {
            match (a.as_str(), arg) {
                ("recovery", None) if !nt.recoverable => nt.recoverable = true,
                ("cost", Some(cst)) if nt.recovery_cost.is_none() => {
                    nt.recovery_cost = Some(cst.parse::<Cost>().map_err(|_| bad(*l, *c, "invalid cost"))?);
                }
                _ => return Err(bad(*l, *c, "unexpected annotation")),
            }
        }
        if nt.recovery_cost.is_some() && !nt.recoverable {
            return Err(bad(r.line, r.col, "[@cost] on a nonterminal requires [@recovery]"));
        }
    }

    let resolve = |name: &str, line: u32, col: u32| -> Result<Symbol, GrammarError> {
        if let Some(t) = term_index.get(name) {
            Ok(Symbol::T(*t))
        } else if let Some(n) = nt_index.get(name) {
            Ok(Symbol::N(*n))
        } else {
            Err(err(line, col, GrammarErrorKind::Undeclared(name.to_string())))
        }
    };

    let mut productions = Vec::new();
    for r in &rules {
        let lhs = nt_index[&r.lhs];
        for alt in &r.alts {
            let rhs = alt.iter().map(|(n, l, c)| resolve(n, *l, *c)).collect::<Result<Vec<_>, _>>()?;
            productions.push(Production { id: productions.len() as u32, lhs, rhs });
        }
    }

    let mut precedence = Vec::new();
    for (assoc, names) in prec_raw {
        let mut terms = Vec::new();
        for (n, l, c) in names {
            match term_index.get(&n) {
                Some(t) => terms.push(*t),
                None => return Err(err(l, c, GrammarErrorKind::Undeclared(n))),
            }
        }
        precedence.push(PrecLevel { assoc, terminals: terms });
    }

    let mut start_symbols = Vec::new();
    for (n, l, c) in starts_raw {
        match nt_index.get(&n) {
            Some(id) if !start_symbols.contains(id) => start_symbols.push(*id),
            Some(_) => return Err(err(l, c, GrammarErrorKind::Duplicate(n))),
            None => return Err(err(l, c, GrammarErrorKind::Undeclared(n))),
        }
    }
    if start_symbols.is_empty() {
        match nonterminals.first() {
            Some(_) => start_symbols.push(0),
            None => return Err(syntax(1, 0, "grammar has no rules")),
        }
    }

    Ok(Grammar { terminals, nonterminals, productions, start_symbols, precedence })
}
