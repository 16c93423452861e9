//! Incremental LR frontend toolkit and a small ML language server.
//!
//! The pipeline is split into independent stages that each produce
//! immutable values:
//!
//! * [`grammar`] reads annotated Yacc-style grammar files,
//! * [`tables`] builds LALR(1) tables and per-state completion plans,
//! * [`lexer`] is a pull-based, restartable MiniML lexer,
//! * [`parser`] is the table-driven incremental LR runtime,
//! * [`recovery`] turns any token stream into a complete parse tree,
//! * [`typer`] lowers trees to an AST and runs error-tolerant inference,
//! * [`queries`] answers editor queries over an [`queries::Analysis`],
//! * [`server`] wires it together behind a single-shot CLI and a daemon.

pub mod diagnostic;
pub mod grammar;
pub mod lexer;
pub mod miniml;
pub mod parser;
pub mod position;
pub mod queries;
pub mod recovery;
pub mod server;
pub mod tables;
pub mod typer;

pub use diagnostic::{Diagnostic, Phase};
pub use position::Position;
