//! The analysis pipeline, request handling and the daemon.

mod daemon;
mod protocol;

pub use daemon::{read_frame, request_frame, write_frame, Daemon, MAX_FRAME};
pub use protocol::{handle, handle_json, parse_single_args, Request, Response, COMMANDS};

use crate::diagnostic::Diagnostic;
use crate::lexer::{lex_all, relex, Edit, LexResult, RelexStats};
use crate::miniml::{miniml, tokens_of};
use crate::parser::{first_difference, parse_prefix, resume, Checkpoint, ParseCache, ResumeStats};
use crate::queries::Analysis;
use crate::recovery::recover;
use crate::typer::{check_buffer, lower, prelude, CheckStats, PhraseCache};
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

/// Per-buffer memo kept between requests. Only ever used to go faster.
#[derive(Clone, Debug)]
pub struct SessionEntry {
    pub buffer: String,
    pub lexed: LexResult,
    pub parse: ParseCache,
    pub phrases: PhraseCache,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AnalyzeStats {
    pub relex: Option<RelexStats>,
    pub parse: ResumeStats,
    pub check: CheckStats,
}

/// Runs the whole pipeline on `buffer`, reusing `cache` when given. The
/// returned analysis does not depend on `cache`.
pub fn analyze(buffer: &str, cache: Option<&SessionEntry>) -> (Analysis, SessionEntry, AnalyzeStats) {
    let m = miniml();
    let mut stats = AnalyzeStats::default();
    let lexed = match cache {
        Some(c) => {
            let (l, s) = relex(&c.lexed, buffer, Edit::between(&c.buffer, buffer));
            stats.relex = Some(s);
            l
        }
        None => lex_all(buffer),
    };
    let tokens = tokens_of(&lexed, buffer);
    let (cp, pc) = match cache {
        Some(c) => {
            let first = first_difference(&c.parse.tokens, &tokens);
            let (cp, pc, s) = resume(&c.parse, &tokens, first);
            stats.parse = s;
            (cp, pc)
        }
        None => {
            let (cp, pc) = parse_prefix(&m.tables, "program", &tokens).expect("program entry point");
            stats.parse = ResumeStats { reused: 0, refed: pc.len() + usize::from(!matches!(pc.last, Checkpoint::Intermediate(_))) };
            (cp, pc)
        }
    };
    let (tree, parse_diags) = match cp {
        Checkpoint::Result(t) => (t, Vec::new()),
        _ => {
            let idx = pc.stop_index();
            let r = recover(pc.env_at(idx), &tokens[idx..], &m.plan);
            (r.tree, r.diagnostics)
        }
    };
    let ast = lower(&tree, &m.tables);
    let old = cache.map(|c| c.phrases.clone()).unwrap_or_default();
    let (checked, phrases, cs) = check_buffer(&prelude(), &ast, &old);
    stats.check = cs;
    let mut diagnostics: Vec<Diagnostic> = lexed.diagnostics.clone();
    diagnostics.extend(parse_diags);
    diagnostics.extend(checked.diagnostics.iter().cloned());
    diagnostics.sort_by_key(|d| (d.range.start.offset, d.phase));
    let analysis = Analysis {
        buffer: buffer.to_string(),
        lexed: lexed.clone(),
        tokens,
        tree,
        ast,
        typed: checked.typed,
        diagnostics,
        env_before: checked.env_before,
        global_env: checked.global_env,
    };
    let entry = SessionEntry { buffer: buffer.to_string(), lexed, parse: pc, phrases };
    (analysis, entry, stats)
}

/// Sessions keyed by filename. Each session is locked independently.
#[derive(Default)]
pub struct SessionCache {
    sessions: Mutex<HashMap<String, Arc<Mutex<Option<SessionEntry>>>>>,
}

impl SessionCache {
    pub fn new() -> SessionCache {
        SessionCache::default()
    }

    pub fn session(&self, filename: &str) -> Arc<Mutex<Option<SessionEntry>>> {
        let mut map = self.sessions.lock().unwrap_or_else(|e| e.into_inner());
        map.entry(filename.to_string()).or_default().clone()
    }

    /// Answers one JSON request against the session named by its
    /// `filename` flag.
    pub fn answer(&self, body: &[u8]) -> Response {
        let filename = serde_json::from_slice::<serde_json::Value>(body)
            .ok()
            .and_then(|v| v["args"]["filename"].as_str().map(str::to_string));
        match filename {
            Some(f) => {
                let session = self.session(&f);
                let mut slot = session.lock().unwrap_or_else(|e| e.into_inner());
                let (resp, entry, _) = handle_json(body, slot.as_ref());
                if let Some(e) = entry {
                    *slot = Some(e);
                }
                resp
            }
            None => handle_json(body, None).0,
        }
    }

    pub fn len(&self) -> usize {
        self.sessions.lock().unwrap_or_else(|e| e.into_inner()).len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
