//! The shipped MiniML grammar and its tables.

use crate::grammar::{load_grammar, Grammar, TerminalId};
use crate::lexer::{Kind, LexResult, Lexeme};
use crate::parser::Token;
use crate::position::Position;
use crate::tables::{CompletionPlan, Tables};
use once_cell::sync::Lazy;
use std::sync::Arc;

pub const GRAMMAR_SOURCE: &str = include_str!("../../assets/miniml.grammar");

pub struct MiniMl {
    pub grammar: Grammar,
    pub tables: Arc<Tables>,
    pub plan: Arc<CompletionPlan>,
    kind_terminal: Vec<TerminalId>,
}

impl MiniMl {
    pub fn terminal_of(&self, k: Kind) -> TerminalId {
        self.kind_terminal[k as usize]
    }
}

static MINIML: Lazy<MiniMl> = Lazy::new(|| {
    let grammar = load_grammar(GRAMMAR_SOURCE).expect("shipped grammar loads");
    let (tables, plan) = Tables::build(&grammar).expect("shipped grammar builds");
    let kind_terminal = Kind::ALL
        .iter()
        .map(|k| grammar.terminal(k.terminal_name()).expect("every lexeme kind is a terminal"))
        .collect();
    MiniMl { grammar, tables: Arc::new(tables), plan: Arc::new(plan), kind_terminal }
});

pub fn miniml() -> &'static MiniMl {
    &MINIML
}

pub fn token_of(l: &Lexeme) -> Token {
    Token::new(miniml().terminal_of(l.kind), l.payload.clone(), l.start, l.end)
}

/// Parser tokens for a lexed buffer, end-marker included.
pub fn tokens_of(lex: &LexResult, buffer: &str) -> Vec<Token> {
    let mut v: Vec<Token> = lex.tokens.iter().map(token_of).collect();
    v.push(Token::eof(&miniml().tables, Position::of_offset(buffer, buffer.len())));
    v
}
