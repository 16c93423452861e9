//! Requests, responses and command dispatch.

use super::{analyze, SessionEntry};
use crate::diagnostic::{Diagnostic, Phase};
use crate::miniml::miniml;
use crate::parser::Sexp;
use crate::position::{Position, Range};
use crate::queries::{self, Analysis, CompletionEntry, Located, TypeExprError};
use serde::Deserialize;
use serde_json::{json, Value};
use std::collections::BTreeMap;

pub const COMMANDS: &[&str] = &[
    "type-enclosing",
    "errors",
    "complete-prefix",
    "locate",
    "destruct",
    "type-expression",
    "polarity-search",
    "parse-tree",
];

#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
pub struct Request {
    pub command: String,
    #[serde(default)]
    pub args: BTreeMap<String, String>,
    #[serde(default)]
    pub buffer: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Response {
    pub ok: bool,
    pub value: Value,
    pub notifications: usize,
}

impl Response {
    pub fn error(msg: impl Into<String>) -> Response {
        Response { ok: false, value: Value::String(msg.into()), notifications: 0 }
    }

    /// One-line JSON envelope.
    pub fn to_json(&self) -> String {
        let mut v = json!({
            "class": if self.ok { "return" } else { "error" },
            "value": self.value,
        });
        if self.notifications > 0 {
            v["notifications"] = json!(self.notifications);
        }
        v.to_string()
    }
}

/// Parses `-flag value` pairs following the command name.
pub fn parse_single_args(argv: &[String]) -> Result<BTreeMap<String, String>, String> {
    let mut args = BTreeMap::new();
    let mut it = argv.iter();
    while let Some(flag) = it.next() {
        let Some(name) = flag.strip_prefix('-') else {
            return Err(format!("unexpected argument `{flag}`"));
        };
        let name = name.trim_start_matches('-');
        let value = it.next().ok_or_else(|| format!("flag -{name} needs a value"))?;
        args.insert(name.to_string(), value.clone());
    }
    Ok(args)
}

fn pos_json(p: Position) -> Value {
    json!({"line": p.line, "col": p.col})
}

fn range_fields(r: Range) -> (Value, Value) {
    (pos_json(r.start), pos_json(r.end))
}

fn phase_name(p: Phase) -> &'static str {
    match p {
        Phase::Lexer => "lexer",
        Phase::Parser => "parser",
        Phase::Typer => "typer",
    }
}

fn diag_json(d: &Diagnostic) -> Value {
    let (s, e) = range_fields(d.range);
    json!({"start": s, "end": e, "type": phase_name(d.phase), "message": d.message})
}

fn entry_json(e: &CompletionEntry) -> Value {
    json!({"name": e.name, "kind": e.kind.as_str(), "desc": e.ty, "rank": e.rank})
}

struct Args<'a> {
    map: &'a BTreeMap<String, String>,
    buffer: &'a str,
}

impl Args<'_> {
    fn required(&self, name: &str) -> Result<&str, String> {
        self.map.get(name).map(String::as_str).ok_or_else(|| format!("missing required flag -{name}"))
    }

    fn number(&self, name: &str, default: u32) -> Result<u32, String> {
        match self.map.get(name) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| format!("flag -{name} expects a number, got `{v}`")),
        }
    }

    fn position(&self, name: &str) -> Result<Position, String> {
        let raw = self.required(name)?;
        let bad = || format!("flag -{name} expects LINE:COL, got `{raw}`");
        let (l, c) = raw.split_once(':').ok_or_else(bad)?;
        let (l, c): (u32, u32) = (l.trim().parse().map_err(|_| bad())?, c.trim().parse().map_err(|_| bad())?);
        Position::resolve(self.buffer, l, c).ok_or_else(|| format!("position {raw} is outside the buffer"))
    }
}

/// Validates flags before any analysis work.
fn validate(req: &Request) -> Result<(), String> {
    if !COMMANDS.contains(&req.command.as_str()) {
        return Err(format!("unknown command `{}`", req.command));
    }
    let a = Args { map: &req.args, buffer: &req.buffer };
    a.required("filename")?;
    match req.command.as_str() {
        "type-enclosing" => {
            a.position("position")?;
            a.number("index", 0)?;
            a.number("verbosity", 0)?;
        }
        "complete-prefix" | "locate" => {
            a.position("position")?;
        }
        "destruct" => {
            a.position("start")?;
            a.position("end")?;
        }
        "type-expression" => {
            a.required("expression")?;
            a.position("position")?;
        }
        "polarity-search" => {
            a.required("query")?;
        }
        _ => {}
    }
    Ok(())
}

fn run(req: &Request, an: &Analysis) -> Response {
    let a = Args { map: &req.args, buffer: &req.buffer };
    let ok = |value: Value| Response { ok: true, value, notifications: an.diagnostics.len() };
    let err = |msg: String| Response { ok: false, value: Value::String(msg), notifications: an.diagnostics.len() };
    // Flags were validated; the unwraps below cannot fail.
    match req.command.as_str() {
        "type-enclosing" => {
            let pos = a.position("position").unwrap();
            let list = queries::type_enclosing(an, pos, a.number("index", 0).unwrap() as usize, a.number("verbosity", 0).unwrap());
            ok(Value::Array(
                list.iter()
                    .map(|e| {
                        let (s, t) = range_fields(e.range);
                        let mut v = json!({"start": s, "end": t, "type": e.ty, "tail": e.tail});
                        if let Some(g) = &e.generalized {
                            v["generalized"] = json!(g);
                        }
                        v
                    })
                    .collect(),
            ))
        }
        "errors" => ok(Value::Array(an.diagnostics.iter().map(diag_json).collect())),
        "complete-prefix" => {
            let pos = a.position("position").unwrap();
            let prefix = req.args.get("prefix").map_or("", String::as_str);
            let entries = queries::complete_prefix(an, pos, prefix);
            ok(json!({"entries": entries.iter().map(entry_json).collect::<Vec<_>>()}))
        }
        "locate" => match queries::locate(an, a.position("position").unwrap()) {
            Located::At(r) => ok(json!({"pos": pos_json(r.start)})),
            Located::Builtin(n) => ok(json!({"builtin": n})),
            Located::NotFound => ok(json!("not found")),
        },
        "destruct" => match queries::destruct(an, a.position("start").unwrap(), a.position("end").unwrap()) {
            Ok(edit) => {
                let (s, e) = range_fields(edit.range);
                ok(json!({"start": s, "end": e, "text": edit.text}))
            }
            Err(e) => err(e.to_string()),
        },
        "type-expression" => {
            let pos = a.position("position").unwrap();
            match queries::type_expression(an, a.required("expression").unwrap(), pos) {
                Ok(t) => ok(json!(t)),
                Err(TypeExprError::Parse { range, message }) => {
                    err(format!("{}-{}: {}", range.start, range.end, message))
                }
            }
        }
        "polarity-search" => match queries::polarity_search(an, a.required("query").unwrap()) {
            Ok(entries) => ok(json!({"entries": entries.iter().map(entry_json).collect::<Vec<_>>()})),
            Err(e) => err(e.to_string()),
        },
        "parse-tree" => ok(json!(Sexp(&an.tree, &miniml().tables).to_string())),
        _ => unreachable!("validated"),
    }
}

/// Answers one request. A malformed request leaves `cache` untouched.
pub fn handle(req: &Request, cache: Option<&SessionEntry>) -> (Response, Option<SessionEntry>) {
    if let Err(msg) = validate(req) {
        return (Response::error(msg), None);
    }
    let (an, entry, _) = analyze(&req.buffer, cache);
    (run(req, &an), Some(entry))
}

/// Decodes a JSON request and answers it.
pub fn handle_json(bytes: &[u8], cache: Option<&SessionEntry>) -> (Response, Option<SessionEntry>, Option<String>) {
    match serde_json::from_slice::<Request>(bytes) {
        Ok(req) => {
            let filename = req.args.get("filename").cloned();
            let (r, e) = handle(&req, cache);
            (r, e, filename)
        }
        Err(e) => (Response::error(format!("malformed request: {e}")), None, None),
    }
}
