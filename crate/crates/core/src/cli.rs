//! The `rbb` command line.
//!
//! Exit codes: 0 success or witness found, 1 proof rejected or model
//! invalid, 2 malformed input, 3 search exhausted, 4 budget exceeded.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use thiserror::Error;

use crate::corpus;
use crate::jtb::{analyze_scenario_with, scenario, scenario_from_json, JtbError, SearchVerdict, DEFAULT_WITNESS_CAP};
use crate::parser::{parse, print, Signature};
use crate::proof::{check_proof, derived_library, proof_from_json, ProofError, Verdict};
use crate::search::{check_nonvalidity, find_model, SearchBounds, SearchError, SearchOutcome};
use crate::semantics::{extension, model_from_json, model_to_value, validate_model, Model, SemanticsError};
use crate::syntax::{Formula, Symbol};
use crate::theory::{match_axiom, TheoryConfig, TheoryError, TheoryKind};

pub const EXIT_OK: i32 = 0;
pub const EXIT_REJECTED: i32 = 1;
pub const EXIT_MALFORMED: i32 = 2;
pub const EXIT_EXHAUSTED: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "rbb", version, about = "Reason-based belief: proofs, models and search")]
pub struct Cli {
    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,
    /// Seed for sampled corpora.
    #[arg(long, global = true, default_value_t = corpus::DEFAULT_SEED)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Args)]
pub struct TheoryArgs {
    /// Theory name (RBB, RBBs, RBBs+, QRBB, QRBBs, QRBBs+, RBB+App) or a
    /// theory JSON file.
    #[arg(long, short = 't')]
    pub theory: Option<String>,
    /// Comma-separated basic reasons.
    #[arg(long, value_delimiter = ',')]
    pub reasons: Option<Vec<String>>,
    /// Comma-separated letters.
    #[arg(long, value_delimiter = ',')]
    pub letters: Option<Vec<String>>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a formula and print it in normal form.
    Parse {
        formula: String,
        #[command(flatten)]
        theory: TheoryArgs,
    },
    /// Check a proof file against the bundled library.
    CheckProof { file: PathBuf },
    /// Evaluate a formula at a world of a model.
    Eval {
        #[arg(long)]
        model: PathBuf,
        /// World name; defaults to the model's point.
        #[arg(long)]
        at: Option<String>,
        formula: String,
        #[command(flatten)]
        theory: TheoryArgs,
    },
    /// Check a model file against the frame conditions of a theory.
    ValidateModel {
        file: PathBuf,
        #[command(flatten)]
        theory: TheoryArgs,
    },
    /// Search for a model satisfying every goal at its point.
    FindModel {
        #[arg(required = true)]
        goals: Vec<String>,
        #[command(flatten)]
        theory: TheoryArgs,
        /// e.g. `worlds=3,nbhd=4,budget=30`
        #[arg(long)]
        bounds: Option<String>,
    },
    /// Search for a countermodel to a formula.
    Nonvalid {
        formula: String,
        #[command(flatten)]
        theory: TheoryArgs,
        #[arg(long)]
        bounds: Option<String>,
    },
    /// Analyse a named scenario or a scenario file.
    Scenario {
        name: String,
        #[arg(long)]
        bounds: Option<String>,
        #[arg(long, default_value_t = DEFAULT_WITNESS_CAP)]
        witnesses: usize,
    },
    /// Check every bundled proof.
    Library {
        /// Also check every enabled axiom scheme on this many sampled
        /// models per theory class.
        #[arg(long)]
        sample: Option<usize>,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Parse(String),
    #[error(transparent)]
    Theory(#[from] TheoryError),
    #[error(transparent)]
    Proof(#[from] ProofError),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Jtb(#[from] JtbError),
}

struct Output {
    text: String,
    json: Value,
    code: i32,
}

/// Runs one invocation, writing the report to `out` and diagnostics to
/// `err`, and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_MALFORMED } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let default_format = match cli.command {
        Command::Scenario { .. } => Format::Json,
        _ => Format::Text,
    };
    let format = cli.format.unwrap_or(default_format);
    match dispatch(&cli) {
        Ok(o) => {
            let body = match format {
                Format::Text => o.text,
                Format::Json => {
                    let mut s = serde_json::to_string_pretty(&o.json).expect("json value");
                    s.push('\n');
                    s
                }
            };
            let _ = out.write_all(body.as_bytes());
            o.code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                CliError::Search(SearchError::WitnessRejected(_)) => EXIT_REJECTED,
                _ => EXIT_MALFORMED,
            }
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Resolves the theory: a name or file, then explicit alphabets, then
/// whatever `infer` supplies for missing alphabets.
fn theory(args: &TheoryArgs, infer: impl FnOnce(&[String]) -> (Vec<String>, Vec<String>)) -> Result<TheoryConfig, CliError> {
    let base = match &args.theory {
        Some(t) if t.ends_with(".json") || Path::new(t).is_file() => Some(TheoryConfig::from_json(&read(Path::new(t))?)?),
        _ => None,
    };
    let kind = match (&base, &args.theory) {
        (Some(cfg), _) => cfg.kind(),
        (None, Some(name)) => name.parse::<TheoryKind>()?,
        (None, None) => TheoryKind::Rbb,
    };
    if let Some(cfg) = base {
        if args.reasons.is_none() && args.letters.is_none() {
            return Ok(cfg);
        }
    }
    let (inferred_r, inferred_l) = if args.reasons.is_none() || args.letters.is_none() {
        infer(args.reasons.as_deref().unwrap_or_default())
    } else {
        (Vec::new(), Vec::new())
    };
    let reasons = args.reasons.clone().unwrap_or(inferred_r);
    let letters = args.letters.clone().unwrap_or(inferred_l);
    Ok(TheoryConfig::new(kind, reasons, letters)?)
}

/// Alphabets read off formulas: declared reasons, and every other
/// identifier as a letter.
fn infer_from(reasons: &[String], formulas: &[&str]) -> (Vec<String>, Vec<String>) {
    let sig = Signature::open(reasons);
    let mut letters = BTreeSet::new();
    for text in formulas {
        if let Ok(f) = parse(text, &sig) {
            letters.extend(f.letters().into_iter().map(|s| s.to_string()));
        }
    }
    (reasons.to_vec(), letters.into_iter().collect())
}

fn parse_in(cfg: &TheoryConfig, text: &str) -> Result<Formula, CliError> {
    let f = cfg.parse(text).map_err(|e| CliError::Parse(format!("`{text}`: {e}")))?;
    cfg.check_formula(&f)?;
    Ok(f)
}

fn parse_bounds(text: Option<&str>) -> Result<SearchBounds, CliError> {
    let mut b = SearchBounds::from_env()?;
    let Some(text) = text else { return Ok(b) };
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("bounds entry `{part}` is not key=value")))?;
        let bad = || CliError::Usage(format!("bad value in bounds entry `{part}`"));
        match key.trim() {
            "worlds" => b.max_worlds = value.trim().parse().map_err(|_| bad())?,
            "nbhd" | "seeds" => b.max_neighborhood_size = value.trim().parse().map_err(|_| bad())?,
            "budget" => {
                let secs: f64 = value.trim().parse().map_err(|_| bad())?;
                if !(secs.is_finite() && secs > 0.0) {
                    return Err(bad());
                }
                b.budget = Duration::from_secs_f64(secs);
            }
            other => return Err(CliError::Usage(format!("unknown bounds key `{other}`"))),
        }
    }
    Ok(SearchBounds::new(b.max_worlds, b.max_neighborhood_size, b.budget)?)
}

fn dispatch(cli: &Cli) -> Result<Output, CliError> {
    match &cli.command {
        Command::Parse { formula, theory: t } => {
            let cfg = theory(t, |r| infer_from(r, &[formula]))?;
            let f = parse_in(&cfg, formula)?;
            let printed = print(&f);
            let axiom = match_axiom(&f, &cfg);
            let mut text = format!("{printed}\n");
            if let Some(s) = axiom {
                let _ = writeln!(text, "instance of ({s})");
            }
            Ok(Output {
                text,
                json: json!({
                    "formula": printed,
                    "theory": cfg.to_json_value(),
                    "size": f.size(),
                    "axiom": axiom.map(|s| s.to_string()),
                }),
                code: EXIT_OK,
            })
        }
        Command::CheckProof { file } => {
            let pf = proof_from_json(&read(file)?)?;
            let lib = derived_library()?;
            let verdict = check_proof(&pf, &lib)?;
            let steps = pf.steps.len();
            let kind = pf.theory.kind();
            let (text, code, detail) = match &verdict {
                Verdict::Accepted => (format!("Accepted (theory {kind}, {steps} steps)\n"), EXIT_OK, json!(null)),
                Verdict::Rejected { step, diagnostic } => (
                    format!("Rejected at step {step} (theory {kind}): {diagnostic}\n"),
                    EXIT_REJECTED,
                    json!({"step": step, "diagnostic": diagnostic}),
                ),
            };
            Ok(Output {
                text,
                json: json!({
                    "proof": pf.name,
                    "theory": kind.name(),
                    "steps": steps,
                    "verdict": if verdict.is_accepted() { "accepted" } else { "rejected" },
                    "rejection": detail,
                }),
                code,
            })
        }
        Command::Eval {
            model,
            at,
            formula,
            theory: t,
        } => {
            let m = model_from_json(&read(model)?)?;
            let cfg = theory(t, |r| infer_from_model(&m, r, &[formula]))?;
            let f = parse_in(&cfg, formula)?;
            let w = match at {
                Some(name) => m.world(name)?,
                None => m
                    .point()
                    .ok_or_else(|| CliError::Usage("the model has no point; pass --at".into()))?,
            };
            let ext = extension(&m, &f, &cfg)?;
            let value = ext.contains(w);
            Ok(Output {
                text: format!("{value}\n"),
                json: json!({
                    "world": m.world_name(w),
                    "formula": print(&f),
                    "value": value,
                    "extension": m.names_of(ext),
                }),
                code: EXIT_OK,
            })
        }
        Command::ValidateModel { file, theory: t } => {
            let m = model_from_json(&read(file)?)?;
            let cfg = theory(t, |r| infer_from_model(&m, r, &[]))?;
            let report = validate_model(&m, &cfg)?;
            let violations: Vec<Value> = report
                .violations
                .iter()
                .map(|v| json!({"property": v.property.to_string(), "world": v.world, "detail": v.detail}))
                .collect();
            Ok(Output {
                text: format!("{report}\n"),
                json: json!({"theory": cfg.kind().name(), "valid": report.is_empty(), "violations": violations}),
                code: if report.is_empty() { EXIT_OK } else { EXIT_REJECTED },
            })
        }
        Command::FindModel { goals, theory: t, bounds } => {
            let texts: Vec<&str> = goals.iter().map(String::as_str).collect();
            let cfg = theory(t, |r| infer_from(r, &texts))?;
            let goals = texts.iter().map(|g| parse_in(&cfg, g)).collect::<Result<Vec<_>, _>>()?;
            let b = parse_bounds(bounds.as_deref())?;
            Ok(search_output(find_model(&goals, &cfg, &b)?, &cfg))
        }
        Command::Nonvalid { formula, theory: t, bounds } => {
            let cfg = theory(t, |r| infer_from(r, &[formula]))?;
            let f = parse_in(&cfg, formula)?;
            let b = parse_bounds(bounds.as_deref())?;
            Ok(search_output(check_nonvalidity(&f, &cfg, &b)?, &cfg))
        }
        Command::Scenario { name, bounds, witnesses } => {
            let sc = if name.ends_with(".json") || Path::new(name).is_file() {
                scenario_from_json(&read(Path::new(name))?)?
            } else {
                scenario(name)?
            };
            let b = parse_bounds(bounds.as_deref())?;
            let report = analyze_scenario_with(&sc, &b, *witnesses)?;
            let code = match report.consistency.verdict {
                SearchVerdict::Witness => EXIT_OK,
                SearchVerdict::Exhausted => EXIT_EXHAUSTED,
                SearchVerdict::BudgetExceeded => EXIT_BUDGET,
            };
            Ok(Output {
                text: report.to_text(),
                json: serde_json::to_value(&report).expect("report serializes"),
                code,
            })
        }
        Command::Library { sample } => library(*sample, cli.seed),
    }
}

fn infer_from_model(m: &Model, given: &[String], formulas: &[&str]) -> (Vec<String>, Vec<String>) {
    let reasons: Vec<String> = if given.is_empty() {
        m.reasons().filter_map(|r| r.as_basic()).map(|s| s.to_string()).collect()
    } else {
        given.to_vec()
    };
    let (reasons, mut letters) = infer_from(&reasons, formulas);
    let mut all: BTreeSet<String> = letters.drain(..).collect();
    for w in 0..m.len() {
        all.extend(m.valuation(w).iter().map(Symbol::to_string));
    }
    (reasons, all.into_iter().collect())
}

fn search_output(outcome: SearchOutcome, cfg: &TheoryConfig) -> Output {
    match outcome {
        SearchOutcome::Witness(m) => {
            let model = model_to_value(&m);
            let mut text = format!("witness ({} world(s), theory {})\n", m.len(), cfg.kind());
            text.push_str(&serde_json::to_string_pretty(&model).expect("json value"));
            text.push('\n');
            Output {
                text,
                json: json!({"outcome": "witness", "model": model}),
                code: EXIT_OK,
            }
        }
        SearchOutcome::Exhausted(b) => Output {
            text: format!("exhausted: no model within {b}\n"),
            json: json!({
                "outcome": "exhausted",
                "bounds": {"max_worlds": b.max_worlds, "max_neighborhood_size": b.max_neighborhood_size},
            }),
            code: EXIT_EXHAUSTED,
        },
        SearchOutcome::BudgetExceeded(p) => Output {
            text: format!("budget exceeded: {p}\n"),
            json: json!({
                "outcome": "budget-exceeded",
                "worlds_exhausted": p.worlds_exhausted,
                "nodes": p.nodes,
            }),
            code: EXIT_BUDGET,
        },
    }
}

fn library(sample: Option<usize>, seed: u64) -> Result<Output, CliError> {
    let lib = derived_library()?;
    let mut text = format!("{:<16} {:<8} {:>5}  verdict\n", "proof", "theory", "steps");
    let mut rows = Vec::new();
    let mut ok = true;
    for (name, entry) in lib.iter() {
        let verdict = check_proof(&entry.proof, &lib)?;
        ok &= verdict.is_accepted();
        let kind = entry.proof.theory.kind();
        let steps = entry.proof.steps.len();
        let _ = writeln!(text, "{name:<16} {:<8} {steps:>5}  {verdict}", kind.name());
        rows.push(json!({"proof": name, "theory": kind.name(), "steps": steps, "verdict": verdict.to_string()}));
    }
    let mut sampled = Vec::new();
    if let Some(n) = sample {
        text.push('\n');
        for kind in corpus::MODEL_CLASSES {
            let (checked, failures) = sample_soundness(kind, n, seed)?;
            ok &= failures.is_empty();
            let _ = writeln!(
                text,
                "{:<8} {n} models, {checked} instance checks, {} failures",
                kind.name(),
                failures.len()
            );
            for f in &failures {
                let _ = writeln!(text, "  {f}");
            }
            sampled.push(json!({"theory": kind.name(), "models": n, "checks": checked, "failures": failures}));
        }
    }
    Ok(Output {
        text,
        json: json!({"proofs": rows, "sampling": sampled, "seed": seed}),
        code: if ok { EXIT_OK } else { EXIT_REJECTED },
    })
}

fn sample_soundness(kind: TheoryKind, models: usize, seed: u64) -> Result<(usize, Vec<String>), CliError> {
    let corpus_err = |e: corpus::CorpusError| CliError::Usage(e.to_string());
    let mut checked = 0;
    let mut failures = Vec::new();
    for (cfg, m) in corpus::model_corpus(kind, models, 4, seed).map_err(corpus_err)? {
        for scheme in cfg.enabled_schemes() {
            let instances = match corpus::axiom_corpus(&cfg, scheme, 8, seed) {
                Ok(fs) => fs,
                Err(corpus::CorpusError::NoInstances { .. }) => continue,
                Err(e) => return Err(corpus_err(e)),
            };
            for f in instances {
                checked += 1;
                if extension(&m, &f, &cfg)? != m.all() {
                    failures.push(format!("({scheme}) {}", print(&f)));
                }
            }
        }
    }
    Ok((checked, failures))
}
