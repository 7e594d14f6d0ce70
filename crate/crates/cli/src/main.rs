//! Batch front end: typecheck, translate, normalize, interpret, decide,
//! witness, oracle, and render commands over term files.

mod render;

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use bicoh_core::decide::{equal, Verdict};
use bicoh_core::fragment::{fragment_of, parse_fragment, Fragment};
use bicoh_core::graph::interpret;
use bicoh_core::maximality::{collapse_witness, MaximalityError};
use bicoh_core::oracle::{enumerate_terms, equational_closure, AxiomSet};
use bicoh_core::rewrite::{kl_normalize, normalize_with, Limits, RewriteError, Trace};
use bicoh_core::translate::{to_bifunctorial, to_combinator};
use bicoh_core::{parse_formula, parse_term, Term};

const EXIT_USAGE: u8 = 64;
const EXIT_DATA: u8 = 65;
const EXIT_INTERNAL: u8 = 70;

#[derive(Parser)]
#[command(
    name = "bicoh",
    version,
    about = "free categories with binary products and sums: normalization, relational semantics, and equality decisions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = OutFormat::Human)]
    format: OutFormat,
    /// Emit each rewrite step
    #[arg(long, global = true)]
    trace: bool,
    /// Abort rewriting after this many steps
    #[arg(long, global = true)]
    max_steps: Option<usize>,
    /// Signature override, checked against the detected one (e.g. "x,+",
    /// "x,I,+b")
    #[arg(long, global = true)]
    fragment: Option<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutFormat {
    Json,
    Human,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StyleArg {
    /// combinator style
    C,
    /// bifunctorial style
    Cprime,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EmitArg {
    Ascii,
    Dot,
    Svg,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a term and print its type
    Typecheck { file: PathBuf },
    /// Translate between the two calculi
    Translate {
        #[arg(long, value_enum)]
        to: StyleArg,
        file: PathBuf,
    },
    /// Cut-eliminate and reduce to the composition-free normal form
    Normalize { file: PathBuf },
    /// Rewrite into K-L normal form (product part first)
    KlNormalize { file: PathBuf },
    /// Interpret a term as a relation between letter occurrences
    Graph { file: PathBuf },
    /// Decide equality of two terms through their interpretations
    Equal { left: PathBuf, right: PathBuf },
    /// Build the collapse witness for two non-equal terms
    Witness { left: PathBuf, right: PathBuf },
    /// Enumerate small terms of a type and close them under the axioms
    Oracle {
        #[arg(long)]
        src: String,
        #[arg(long)]
        tgt: String,
        #[arg(long)]
        size: usize,
        /// e-node budget for the closure
        #[arg(long, default_value_t = 1_000_000)]
        nodes: usize,
    },
    /// Draw the interpretation of a term as a linkage diagram
    Render {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = EmitArg::Ascii)]
        emit: EmitArg,
    },
}

enum CmdError {
    Data(String),
    Internal(String),
}

impl From<bicoh_core::ParseError> for CmdError {
    fn from(e: bicoh_core::ParseError) -> Self {
        CmdError::Data(e.to_string())
    }
}

impl From<bicoh_core::TypeError> for CmdError {
    fn from(e: bicoh_core::TypeError) -> Self {
        CmdError::Data(e.to_string())
    }
}

impl From<RewriteError> for CmdError {
    fn from(e: RewriteError) -> Self {
        match e {
            RewriteError::Internal(msg) => CmdError::Internal(msg),
            other => CmdError::Data(other.to_string()),
        }
    }
}

impl From<MaximalityError> for CmdError {
    fn from(e: MaximalityError) -> Self {
        match e {
            MaximalityError::Internal(msg) => CmdError::Internal(msg),
            MaximalityError::Rewrite(RewriteError::Internal(msg)) => CmdError::Internal(msg),
            other => CmdError::Data(other.to_string()),
        }
    }
}

fn read_input(path: &PathBuf) -> Result<String, CmdError> {
    if path.as_os_str() == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| CmdError::Data(format!("stdin: {e}")))?;
        Ok(buf)
    } else {
        std::fs::read_to_string(path)
            .map_err(|e| CmdError::Data(format!("{}: {e}", path.display())))
    }
}

fn read_term(path: &PathBuf) -> Result<Term, CmdError> {
    let text = read_input(path)?;
    Ok(parse_term(text.trim())?)
}

/// The fragment to run under: the detected one, or the override after a
/// consistency check.
fn resolve_fragment(cli: &Cli, terms: &[&Term]) -> Result<Fragment, CmdError> {
    let detected = fragment_of(terms.iter().copied());
    match &cli.fragment {
        None => Ok(detected),
        Some(name) => {
            let given = parse_fragment(name)
                .ok_or_else(|| CmdError::Data(format!("unknown fragment name: {name}")))?;
            if !detected.subsumed_by(&given) {
                return Err(CmdError::Data(format!(
                    "terms use signature {detected}, not covered by requested {given}"
                )));
            }
            Ok(given)
        }
    }
}

fn print_trace(cli: &Cli, trace: &Trace) {
    if !cli.trace {
        return;
    }
    for step in trace {
        match cli.format {
            OutFormat::Human => match (step.degree_before, step.degree_after) {
                (Some(b), Some(a)) => eprintln!(
                    "{}: {} -> {}  degree ({},{}) -> ({},{})",
                    step.rule, step.before, step.after, b.n1, b.n2, a.n1, a.n2
                ),
                _ => eprintln!("{}: {} -> {}", step.rule, step.before, step.after),
            },
            OutFormat::Json => {
                eprintln!("{}", serde_json::to_string(step).expect("trace serializes"))
            }
        }
    }
}

fn run(cli: &Cli) -> Result<u8, CmdError> {
    let limits = Limits { max_steps: cli.max_steps };
    match &cli.command {
        Command::Typecheck { file } => {
            let term = read_term(file)?;
            let (src, tgt) = term.infer_type()?;
            let fragment = resolve_fragment(cli, &[&term])?;
            match cli.format {
                OutFormat::Human => println!("{src} -> {tgt}  [{fragment}]"),
                OutFormat::Json => println!(
                    "{}",
                    json!({"source": src, "target": tgt, "fragment": fragment.to_string()})
                ),
            }
            Ok(0)
        }
        Command::Translate { to, file } => {
            let term = read_term(file)?;
            let out = match to {
                StyleArg::Cprime => to_bifunctorial(&term),
                StyleArg::C => to_combinator(&term),
            }
            .map_err(|e| CmdError::Data(e.to_string()))?;
            match cli.format {
                OutFormat::Human => println!("{out}"),
                OutFormat::Json => println!("{}", json!({ "term": out })),
            }
            Ok(0)
        }
        Command::Normalize { file } => {
            let term = read_term(file)?;
            let fragment = resolve_fragment(cli, &[&term])?;
            let mut trace = Trace::new();
            let out = normalize_with(&term, &fragment, limits, cli.trace.then_some(&mut trace))?;
            print_trace(cli, &trace);
            match cli.format {
                OutFormat::Human => println!("{out}"),
                OutFormat::Json => println!("{}", json!({ "term": out })),
            }
            Ok(0)
        }
        Command::KlNormalize { file } => {
            let term = read_term(file)?;
            let (kpart, lpart) = kl_normalize(&term)?;
            match cli.format {
                OutFormat::Human => println!("({kpart};{lpart})"),
                OutFormat::Json => println!("{}", json!({"kpart": kpart, "lpart": lpart})),
            }
            Ok(0)
        }
        Command::Graph { file } => {
            let term = read_term(file)?;
            let rel = interpret(&term)?;
            match cli.format {
                OutFormat::Human => {
                    let pairs: Vec<String> =
                        rel.pairs().map(|(x, y)| format!("({x},{y})")).collect();
                    println!("{} -> {}: {{{}}}", rel.src, rel.tgt, pairs.join(", "));
                }
                OutFormat::Json => {
                    println!("{}", serde_json::to_string(&rel).expect("serializes"))
                }
            }
            Ok(0)
        }
        Command::Equal { left, right } => {
            let f = read_term(left)?;
            let g = read_term(right)?;
            // the override is a consistency check; gating follows detection
            let _ = resolve_fragment(cli, &[&f, &g])?;
            let verdict = equal(&f, &g)?;
            match cli.format {
                OutFormat::Human => match &verdict {
                    Verdict::Equal => println!("equal"),
                    Verdict::NotEqual { witness } => {
                        println!("not equal: pair ({},{}) distinguishes", witness.0, witness.1)
                    }
                    Verdict::Incoherent { fragment, g_equal } => println!(
                        "incoherent fragment {fragment}: graphs {}; theory equality undecided",
                        if *g_equal { "agree" } else { "differ" }
                    ),
                    Verdict::TypeMismatch { .. } => println!("type mismatch"),
                },
                OutFormat::Json => {
                    println!("{}", serde_json::to_string(&verdict).expect("serializes"))
                }
            }
            Ok(verdict.exit_code() as u8)
        }
        Command::Witness { left, right } => {
            let f = read_term(left)?;
            let g = read_term(right)?;
            match collapse_witness(&f, &g) {
                Ok(witness) => {
                    println!("{}", serde_json::to_string_pretty(&witness).expect("serializes"));
                    Ok(0)
                }
                Err(MaximalityError::GraphsEqual) => {
                    eprintln!("graphs coincide after substitution; no witness");
                    Ok(1)
                }
                Err(other) => Err(other.into()),
            }
        }
        Command::Oracle { src, tgt, size, nodes } => {
            let src = parse_formula(src)?;
            let tgt = parse_formula(tgt)?;
            let name = cli
                .fragment
                .as_ref()
                .ok_or_else(|| CmdError::Data("oracle requires --fragment".to_string()))?;
            let fragment = parse_fragment(name)
                .ok_or_else(|| CmdError::Data(format!("unknown fragment name: {name}")))?;
            let seeds = enumerate_terms(&src, &tgt, *size, &fragment);
            let axioms = AxiomSet::for_fragment(&fragment);
            let report = equational_closure(&seeds, &axioms, *nodes)
                .map_err(|e| CmdError::Data(e.to_string()))?;
            println!("{}", serde_json::to_string_pretty(&report).expect("serializes"));
            Ok(0)
        }
        Command::Render { file, emit } => {
            let term = read_term(file)?;
            let (src, tgt) = term.infer_type()?;
            let rel = interpret(&term)?;
            let emit = match emit {
                EmitArg::Ascii => render::Emit::Ascii,
                EmitArg::Dot => render::Emit::Dot,
                EmitArg::Svg => render::Emit::Svg,
            };
            let text = render::render(&rel, &src, &tgt, emit)
                .map_err(|e| CmdError::Data(e.to_string()))?;
            print!("{text}");
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(CmdError::Data(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_DATA)
        }
        Err(CmdError::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(EXIT_INTERNAL)
        }
    }
}
