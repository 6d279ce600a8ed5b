use std::io::Read;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use ppcem::em::stuck_pairs;
use ppcem::partial::{translate, PTerm, TauMatch};
use ppcem::strategy::{run, run_partial, run_ppc, strategy_by_name, Run, Verdict, STRATEGY_NAMES};
use ppcem::suites::{compare, run_suite, Audit, SuiteConfig, SUITE_NAMES};
use ppcem::syntax::RecordSyntax;
use ppcem::{parse, parse_with, Bottom, Term};

const EXIT_PROPERTY: u8 = 1;
const EXIT_BUDGET: u8 = 2;
const EXIT_PARSE: u8 = 3;

#[derive(Parser)]
#[command(name = "ppcem", version, about = "Pure pattern calculus with explicit matching")]
struct Cli {
    /// Term printed for a failed match (closed, pure, normal).
    #[arg(long, global = true)]
    bot: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Engine {
    Ppc,
    Em,
    Partial,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Reduce a term until normal form or budget.
    Reduce {
        /// Term source; read from stdin when absent.
        term: Option<String>,
        #[arg(long, value_enum, default_value = "em")]
        engine: Engine,
        #[arg(long, default_value = "full", value_parser = clap::builder::PossibleValuesParser::new(STRATEGY_NAMES))]
        strategy: String,
        #[arg(long, default_value_t = 10_000)]
        max_steps: usize,
        /// Print every step.
        #[arg(long)]
        trace: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Run both calculi side by side from a pure term.
    Compare {
        term: Option<String>,
        #[arg(long, default_value_t = 1_000)]
        max_steps: usize,
    },
    /// Run a property suite.
    Check {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(SUITE_NAMES))]
        suite: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1_000)]
        count: usize,
    },
    /// Parse and print a term.
    Parse { term: Option<String> },
}

fn source(arg: Option<String>) -> Result<String, String> {
    match arg {
        Some(s) if s != "-" => Ok(s),
        _ => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).map_err(|e| e.to_string())?;
            Ok(s)
        }
    }
}

fn parse_error(src: &str, e: impl std::fmt::Display) -> ExitCode {
    eprintln!("parse error: {e}");
    if src.lines().count() == 1 {
        eprintln!("  {}", src.trim_end());
    }
    ExitCode::from(EXIT_PARSE)
}

fn report<T: std::fmt::Display, M: RecordSyntax>(r: &Run<T, M>, trace: bool, format: Format, extra: serde_json::Value) {
    match format {
        Format::Json => {
            let mut out = json!({
                "result": r.result.to_string(),
                "verdict": r.verdict.to_string(),
                "steps": r.trace.len(),
            });
            if trace {
                out["trace"] = r.trace_json();
            }
            if !extra.is_null() {
                out["stuck"] = extra;
            }
            println!("{}", serde_json::to_string_pretty(&out).expect("json"));
        }
        Format::Text => {
            if trace {
                print!("{}", r.trace_text());
            }
            println!("result: {}", r.result);
            println!("verdict: {}", r.verdict);
            println!("steps: {}", r.trace.len());
            if let Some(stuck) = extra.as_array() {
                for s in stuck {
                    println!("stuck: pair {} of the matching at {} ({})", s["pair"], s["path"], s["reason"].as_str().unwrap_or("?"));
                }
            }
        }
    }
}

fn exit_for(v: Verdict) -> ExitCode {
    match v {
        Verdict::NormalForm => ExitCode::SUCCESS,
        Verdict::BudgetExhausted => ExitCode::from(EXIT_BUDGET),
    }
}

fn reduce(src: &str, engine: Engine, strategy: &str, max_steps: usize, trace: bool, format: Format, bot: &Bottom) -> ExitCode {
    match engine {
        Engine::Em => {
            let t = match parse_with::<ppcem::DecidedMatch>(src, bot) {
                Ok(t) => t,
                Err(e) => return parse_error(src, e),
            };
            let s = strategy_by_name(strategy).expect("validated by clap");
            let r = run(&t, s, max_steps, bot);
            let stuck = serde_json::to_value(stuck_pairs(&r.result)).expect("json");
            let stuck = if stuck.as_array().is_some_and(|a| a.is_empty()) { serde_json::Value::Null } else { stuck };
            report(&r, trace, format, stuck);
            exit_for(r.verdict)
        }
        Engine::Ppc | Engine::Partial if strategy != "full" => {
            eprintln!("error: only the full strategy is available for this engine");
            ExitCode::from(EXIT_PARSE)
        }
        Engine::Ppc => {
            let t = match parse_with::<ppcem::DecidedMatch>(src, bot) {
                Ok(t) => t,
                Err(e) => return parse_error(src, e),
            };
            if !t.is_pure() {
                eprintln!("error: the implicit calculus only reduces pure terms");
                return ExitCode::from(EXIT_PARSE);
            }
            let r = run_ppc(&t, max_steps, bot);
            report(&r, trace, format, serde_json::Value::Null);
            exit_for(r.verdict)
        }
        Engine::Partial => {
            // explicit-calculus syntax is translated; used-name records are read as is
            let t: PTerm = match parse_with::<ppcem::DecidedMatch>(src, bot) {
                Ok(t) => translate(&t),
                Err(first) => match parse_with::<TauMatch>(src, bot) {
                    Ok(t) => t,
                    Err(_) => return parse_error(src, first),
                },
            };
            let r = run_partial(&t, max_steps, bot);
            report(&r, trace, format, serde_json::Value::Null);
            exit_for(r.verdict)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let bot = match &cli.bot {
        None => Bottom::default(),
        Some(src) => match parse(src) {
            Ok(t) => match Bottom::new(t) {
                Ok(b) => b,
                Err(e) => {
                    eprintln!("error: --bot: {e}");
                    return ExitCode::from(EXIT_PARSE);
                }
            },
            Err(e) => return parse_error(src, e),
        },
    };
    match cli.command {
        Command::Reduce { term, engine, strategy, max_steps, trace, format } => {
            let src = match source(term) {
                Ok(s) => s,
                Err(e) => return parse_error("", e),
            };
            reduce(&src, engine, &strategy, max_steps, trace, format, &bot)
        }
        Command::Parse { term } => {
            let src = match source(term) {
                Ok(s) => s,
                Err(e) => return parse_error("", e),
            };
            match parse_with::<ppcem::DecidedMatch>(&src, &bot) {
                Ok(t) => {
                    println!("{t}");
                    ExitCode::SUCCESS
                }
                Err(e) => parse_error(&src, e),
            }
        }
        Command::Compare { term, max_steps } => {
            let src = match source(term) {
                Ok(s) => s,
                Err(e) => return parse_error("", e),
            };
            let t: Term = match parse_with(&src, &bot) {
                Ok(t) => t,
                Err(e) => return parse_error(&src, e),
            };
            match compare(&t, max_steps, &bot) {
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(EXIT_PARSE)
                }
                Ok(r) => {
                    for row in &r.rows {
                        println!("{row}");
                    }
                    println!("ppc result: {}", r.ppc_result);
                    println!("em result:  {}", r.em_result);
                    println!("mismatches: {}", r.mismatches);
                    if r.mismatches == 0 {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(EXIT_PROPERTY)
                    }
                }
            }
        }
        Command::Check { suite, seed, count } => {
            let cfg = SuiteConfig { seed, count, bottom: bot };
            let audit = Audit::new();
            let tally = run_suite(&suite, &cfg, &audit).expect("validated by clap");
            println!("{suite}: {tally}");
            if tally.inconclusive > 0 {
                println!("inconclusive rate: {:.2}%", 100.0 * tally.inconclusive_rate());
            }
            println!("measure audit: {} steps, {} violations", audit.steps(), audit.violations());
            for f in &tally.failures {
                println!("failure: {f}");
            }
            for v in audit.examples() {
                println!("violation: {v}");
            }
            if tally.passed() && audit.violations() == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_PROPERTY)
            }
        }
    }
}
