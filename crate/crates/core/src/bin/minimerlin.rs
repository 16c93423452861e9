use clap::{Parser, Subcommand};
use minimerlin::grammar::{load_grammar, Literal};
use minimerlin::lexer::lex_all;
use minimerlin::miniml::{miniml, tokens_of};
use minimerlin::parser::{parse_prefix, Checkpoint, Token};
use minimerlin::position::Position;
use minimerlin::recovery::{recover, RecoveryStep};
use minimerlin::server::{handle, parse_single_args, Daemon, Request, COMMANDS};
use minimerlin::tables::write_tables;
use minimerlin::tables::{CompletionPlan, Tables};
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

#[derive(Parser)]
#[command(name = "minimerlin", version, about = "MiniML analysis server and LR toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Answer one request; the buffer is read from stdin.
    Single {
        command: String,
        #[arg(trailing_var_arg = true, allow_hyphen_values = true)]
        flags: Vec<String>,
    },
    /// Serve framed requests on a Unix socket until a `shutdown` request.
    Daemon {
        #[arg(long)]
        channel: PathBuf,
    },
    /// Build tables for a grammar file and write the binary dump.
    CompileGrammar {
        file: PathBuf,
        #[arg(short)]
        o: Option<PathBuf>,
    },
    /// Dump the concrete tree of a file.
    Parse {
        file: PathBuf,
        /// Grammar to parse with; the file then holds terminal names.
        #[arg(long)]
        grammar: Option<PathBuf>,
        #[arg(long)]
        entry: Option<String>,
    },
    /// Print the recovered tree and the recovery trace of a file.
    Recover {
        file: PathBuf,
        #[arg(long)]
        grammar: Option<PathBuf>,
        #[arg(long)]
        entry: Option<String>,
    },
}

fn read(path: &PathBuf) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

/// Words of the form `NAME` or `NAME=payload`, one token each.
fn word_tokens(t: &Tables, src: &str) -> Result<Vec<Token>, String> {
    let mut out = Vec::new();
    let mut offset = 0;
    for word in src.split_whitespace() {
        let start = offset + src[offset..].find(word).unwrap_or(0);
        offset = start + word.len();
        let (name, payload) = match word.split_once('=') {
            Some((n, p)) => (n, Some(p.parse().map_or_else(|_| Literal::Text(p.to_string()), Literal::Int))),
            None => (word, None),
        };
        let term = t.terminal(name).ok_or_else(|| format!("unknown terminal `{name}`"))?;
        out.push(Token::new(term, payload, Position::of_offset(src, start), Position::of_offset(src, offset)));
    }
    out.push(Token::eof(t, Position::of_offset(src, src.len())));
    Ok(out)
}

struct Input {
    tables: Arc<Tables>,
    plan: Arc<CompletionPlan>,
    entry: String,
    tokens: Vec<Token>,
}

fn input(file: &PathBuf, grammar: Option<&PathBuf>, entry: Option<String>) -> Result<Input, String> {
    let src = read(file)?;
    match grammar {
        None => {
            let m = miniml();
            let tokens = tokens_of(&lex_all(&src), &src);
            Ok(Input { tables: m.tables.clone(), plan: m.plan.clone(), entry: entry.unwrap_or("program".into()), tokens })
        }
        Some(g) => {
            let g = load_grammar(&read(g)?).map_err(|e| e.to_string())?;
            let (t, plan) = Tables::build(&g).map_err(|e| e.to_string())?;
            let entry = match entry {
                Some(e) => e,
                None => g.nonterminals[*g.start_symbols.first().ok_or("grammar has no start symbol")? as usize].name.clone(),
            };
            let tokens = word_tokens(&t, &src)?;
            Ok(Input { tables: Arc::new(t), plan: Arc::new(plan), entry, tokens })
        }
    }
}

fn run(cli: Cli) -> Result<(), String> {
    match cli.cmd {
        Cmd::Single { command, flags } => {
            if !COMMANDS.contains(&command.as_str()) {
                return Err(format!("unknown command `{command}`; expected one of: {}", COMMANDS.join(", ")));
            }
            let args = parse_single_args(&flags)?;
            let mut buffer = String::new();
            std::io::stdin().read_to_string(&mut buffer).map_err(|e| format!("stdin: {e}"))?;
            let (resp, _) = handle(&Request { command, args, buffer }, None);
            println!("{}", resp.to_json());
        }
        Cmd::Daemon { channel } => {
            let d = Daemon::spawn(&channel).map_err(|e| format!("{}: {e}", channel.display()))?;
            d.wait();
        }
        Cmd::CompileGrammar { file, o } => {
            let g = load_grammar(&read(&file)?).map_err(|e| e.to_string())?;
            let (t, plan) = Tables::build(&g).map_err(|e| e.to_string())?;
            let out = o.unwrap_or_else(|| file.with_extension("tables"));
            std::fs::write(&out, write_tables(&t, &plan)).map_err(|e| format!("{}: {e}", out.display()))?;
            eprintln!("{} states written to {}", t.n_states(), out.display());
        }
        Cmd::Parse { file, grammar, entry } => {
            let inp = input(&file, grammar.as_ref(), entry)?;
            let (cp, _) = parse_prefix(&inp.tables, &inp.entry, &inp.tokens).map_err(|e| format!("unknown entry point {}", e.0))?;
            match cp {
                Checkpoint::Result(tree) => print!("{}", tree.dump(&inp.tables)),
                Checkpoint::SyntaxError { pos, expected, .. } => {
                    let names: Vec<&str> = expected.iter().map(|t| inp.tables.terminal_name(*t)).collect();
                    return Err(format!("{pos}: syntax error, expected one of: {}", names.join(" ")));
                }
                Checkpoint::Intermediate(_) => return Err("input ended before the end marker".into()),
            }
        }
        Cmd::Recover { file, grammar, entry } => {
            let inp = input(&file, grammar.as_ref(), entry)?;
            let (cp, pc) = parse_prefix(&inp.tables, &inp.entry, &inp.tokens).map_err(|e| format!("unknown entry point {}", e.0))?;
            if let Checkpoint::Result(tree) = cp {
                print!("{}", tree.dump(&inp.tables));
                return Ok(());
            }
            let idx = pc.stop_index();
            let r = recover(pc.env_at(idx), &inp.tokens[idx..], &inp.plan);
            print!("{}", r.tree.dump(&inp.tables));
            println!("-- trace (cost {})", r.total_cost);
            for s in &r.trace {
                match s {
                    RecoveryStep::Synthesized(sym, c) => println!("synthesize {} ({c})", inp.tables.symbol_name(*sym)),
                    RecoveryStep::Consumed(t) => println!("consume {} @{}", inp.tables.terminal_name(t.terminal), t.start),
                    RecoveryStep::Dropped(t) => println!("drop {} @{}", inp.tables.terminal_name(t.terminal), t.start),
                }
            }
            for d in &r.diagnostics {
                println!("{d}");
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("minimerlin: {e}");
            ExitCode::from(2)
        }
    }
}
