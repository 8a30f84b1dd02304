//! The `mythos` command line.
//!
//! Exit status: 0 success or no conflict, 1 conflict found, 2 usage or I/O
//! error, 3 resource limit. `corpus` exits with the number of entries whose
//! verdict differs from the expected one.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::builder::TypedValueParser as _;
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::antipatterns::detect_antipatterns;
use crate::ingest::{fetch, fetch_translation, normalize_fred, parse_ntriples, record_fixture, FetchError, Mode, NtError};
use crate::krss::{parse_concept, serialize_kb, KrssError};
use crate::pipeline::{
    check_claim_with, describe_match, load_kb, load_rules, merge, run_corpus, CheckOptions, ConflictReport,
    CorpusRun, PipelineError, Verdict,
};
use crate::rules::DEFAULT_INFERENCE_CAP;
use crate::tableau::{Reasoner, TableauError, DEFAULT_NODE_CAP};

pub const EXIT_OK: u8 = 0;
pub const EXIT_CONFLICT: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_RESOURCE: u8 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Parser)]
#[command(name = "mythos", version, about = "Check claims against trusted knowledge with a description logic reasoner")]
pub struct Cli {
    /// Maximum completion-graph nodes per reasoning task.
    #[arg(long, global = true, default_value_t = DEFAULT_NODE_CAP, value_parser = clap::value_parser!(u64).range(1..).map(|v| v as usize))]
    pub node_cap: usize,
    /// Maximum assertions the rule engine may infer.
    #[arg(long, global = true, default_value_t = DEFAULT_INFERENCE_CAP)]
    pub inference_cap: usize,
    /// Output format. `check` and `corpus` default to json, the rest to text.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the result here instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Include per-step timings in reports.
    #[arg(long, global = true)]
    pub timings: bool,
    /// Keep the individuals of each input apart by prefixing them.
    #[arg(long, global = true)]
    pub isolate: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Merge a myth with the facts and report conflicts.
    Check {
        myth: PathBuf,
        fact: PathBuf,
        /// Background knowledge base; may be repeated.
        #[arg(long)]
        background: Vec<PathBuf>,
        #[arg(long)]
        rules: Option<PathBuf>,
        /// Identifier written to the report.
        #[arg(long, default_value = "claim")]
        id: String,
    },
    /// Is a concept satisfiable with respect to a knowledge base?
    Sat {
        kb: PathBuf,
        #[arg(long)]
        concept: String,
    },
    /// Is `--sub` subsumed by `--super`?
    Subsumes {
        kb: PathBuf,
        #[arg(long)]
        sub: String,
        #[arg(long = "super")]
        sup: String,
    },
    /// List unsatisfiable concept names.
    Coherent { kb: PathBuf },
    /// Does the knowledge base have a model?
    Consistent { kb: PathBuf },
    /// Detect OIL, UE and disjoint-subsumption patterns.
    Antipatterns { kb: PathBuf },
    /// Normalize an N-Triples file into KRSS.
    Ingest {
        file: PathBuf,
        /// Write the KRSS here. Warnings still go to standard error.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Translate a sentence to RDF, from recorded fixtures or a live endpoint.
    Translate {
        text: String,
        /// Fixture directory. Preferred over an endpoint when both are given.
        #[arg(long)]
        fixtures: Option<PathBuf>,
        /// Live endpoint URL; defaults to the MYTHOS_FRED_ENDPOINT variable.
        #[arg(long)]
        endpoint: Option<String>,
        /// In live mode, also save the answer as a fixture in this directory.
        #[arg(long)]
        record: Option<PathBuf>,
        /// Print the normalized KRSS instead of the triples.
        #[arg(long)]
        krss: bool,
    },
    /// Check every entry of a corpus manifest.
    Corpus { manifest: PathBuf },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}:{source}", path.display())]
    NTriples { path: PathBuf, source: NtError },
    #[error("concept: {0}")]
    Concept(#[from] KrssError),
    #[error(transparent)]
    Tableau(#[from] TableauError),
    #[error(transparent)]
    Fetch(#[from] FetchError),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Tableau(TableauError::ResourceLimit { .. }) => EXIT_RESOURCE,
            _ => EXIT_USAGE,
        }
    }
}

/// Rendered output and exit status of one command.
struct Outcome {
    body: String,
    code: u8,
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report types serialize");
    s.push('\n');
    s
}

impl Cli {
    fn options(&self) -> CheckOptions {
        CheckOptions {
            node_cap: self.node_cap,
            inference_cap: self.inference_cap,
            timings: self.timings,
            isolate: self.isolate,
        }
    }

    fn format(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }

    fn reasoner(&self) -> Reasoner {
        Reasoner::with_node_cap(self.node_cap)
    }

    fn execute(&self) -> Result<Outcome, CliError> {
        match &self.command {
            Command::Check { myth, fact, background, rules, id } => {
                let myth = load_kb(myth)?;
                let fact = load_kb(fact)?;
                let bgs = background.iter().map(|p| load_kb(p)).collect::<Result<Vec<_>, _>>()?;
                let bg = merge(&bgs).map_err(|e| CliError::Usage(format!("background: {e}")))?;
                let rules = rules.as_deref().map(load_rules).transpose()?.unwrap_or_default();
                let report = check_claim_with(id, &myth, &fact, &bg, &rules, &self.options());
                let body = match self.format(Format::Json) {
                    Format::Json => to_json(&report),
                    Format::Text => report_text(&report),
                };
                Ok(Outcome { body, code: report_code(&report) })
            }
            Command::Sat { kb, concept } => {
                let kb = load_kb(kb)?;
                let c = parse_concept(concept)?;
                let sat = self.reasoner().is_satisfiable(&kb, &c)?;
                let word = if sat { "satisfiable" } else { "unsatisfiable" };
                let body = match self.format(Format::Text) {
                    Format::Json => to_json(&json!({ "concept": concept, "satisfiable": sat })),
                    Format::Text => format!("{word}\n"),
                };
                Ok(Outcome { body, code: if sat { EXIT_OK } else { EXIT_CONFLICT } })
            }
            Command::Subsumes { kb, sub, sup } => {
                let kb = load_kb(kb)?;
                let holds = self.reasoner().subsumes(&kb, &parse_concept(sup)?, &parse_concept(sub)?)?;
                let body = match self.format(Format::Text) {
                    Format::Json => to_json(&json!({ "sub": sub, "super": sup, "subsumes": holds })),
                    Format::Text => format!("{}\n", if holds { "subsumed" } else { "not subsumed" }),
                };
                Ok(Outcome { body, code: EXIT_OK })
            }
            Command::Coherent { kb } => {
                let kb = load_kb(kb)?;
                let (ok, unsat) = self.reasoner().is_coherent(&kb)?;
                let body = match self.format(Format::Text) {
                    Format::Json => to_json(&json!({ "coherent": ok, "unsat_concepts": unsat })),
                    Format::Text if ok => "coherent\n".to_owned(),
                    Format::Text => format!("incoherent: {}\n", unsat.join(", ")),
                };
                Ok(Outcome { body, code: if ok { EXIT_OK } else { EXIT_CONFLICT } })
            }
            Command::Consistent { kb } => {
                let kb = load_kb(kb)?;
                let ok = self.reasoner().is_consistent(&kb)?;
                let body = match self.format(Format::Text) {
                    Format::Json => to_json(&json!({ "consistent": ok })),
                    Format::Text => format!("{}\n", if ok { "consistent" } else { "inconsistent" }),
                };
                Ok(Outcome { body, code: if ok { EXIT_OK } else { EXIT_CONFLICT } })
            }
            Command::Antipatterns { kb } => {
                let matches = detect_antipatterns(&load_kb(kb)?);
                let body = match self.format(Format::Text) {
                    Format::Json => to_json(&matches),
                    Format::Text => matches.iter().map(|m| describe_match(m) + "\n\n").collect(),
                };
                Ok(Outcome { body, code: if matches.is_empty() { EXIT_OK } else { EXIT_CONFLICT } })
            }
            Command::Ingest { file, out } => {
                let text = read(file)?;
                let graph = parse_ntriples(&text).map_err(|source| CliError::NTriples { path: file.clone(), source })?;
                let norm = normalize_fred(&graph);
                for w in &norm.warnings {
                    eprintln!("warning: triple {}: {} ({})", w.index + 1, w.reason, w.triple);
                }
                let krss = serialize_kb(&norm.kb);
                if let Some(out) = out {
                    std::fs::write(out, &krss).map_err(|source| CliError::Io { path: out.clone(), source })?;
                }
                let body = match self.format(Format::Text) {
                    Format::Json => to_json(&json!({
                        "krss": krss,
                        "dispositions": norm.dispositions,
                        "warnings": norm.warnings,
                    })),
                    Format::Text if out.is_some() => String::new(),
                    Format::Text => krss,
                };
                Ok(Outcome { body, code: EXIT_OK })
            }
            Command::Translate { text, fixtures, endpoint, record, krss } => {
                let mode = match (fixtures, endpoint.clone().or_else(|| std::env::var(fetch::ENDPOINT_ENV).ok())) {
                    (Some(dir), _) => Mode::Fixtures { dir: dir.clone() },
                    (None, Some(endpoint)) => Mode::Live { endpoint },
                    (None, None) => {
                        return Err(CliError::Usage(format!(
                            "translate needs --fixtures, --endpoint or the {} variable",
                            fetch::ENDPOINT_ENV
                        )))
                    }
                };
                let graph = fetch_translation(text, &mode)?;
                if let (Some(dir), Mode::Live { .. }) = (record, &mode) {
                    let path = record_fixture(dir, text, &graph)?;
                    eprintln!("recorded {}", path.display());
                }
                let body = match (self.format(Format::Text), krss) {
                    (Format::Text, false) => graph.to_ntriples(),
                    (Format::Text, true) => serialize_kb(&normalize_fred(&graph).kb),
                    (Format::Json, false) => to_json(&json!({ "text": text, "graph": graph })),
                    (Format::Json, true) => {
                        to_json(&json!({ "text": text, "krss": serialize_kb(&normalize_fred(&graph).kb) }))
                    }
                };
                Ok(Outcome { body, code: EXIT_OK })
            }
            Command::Corpus { manifest } => {
                let run = run_corpus(manifest, &self.options())?;
                let body = match self.format(Format::Json) {
                    Format::Json => to_json(&run),
                    Format::Text => corpus_text(&run),
                };
                let code = run.summary.unexpected.len().min(u8::MAX as usize) as u8;
                Ok(Outcome { body, code })
            }
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_owned(), source })
}

fn report_code(r: &ConflictReport) -> u8 {
    match r.verdict {
        Verdict::Error if r.is_resource_limit() => EXIT_RESOURCE,
        Verdict::Error => EXIT_USAGE,
        v if v.is_conflict() => EXIT_CONFLICT,
        _ => EXIT_OK,
    }
}

fn report_text(r: &ConflictReport) -> String {
    let mut s = format!("{}: {}\n", r.myth_id, r.verdict.as_str());
    if !r.unsat_concepts.is_empty() {
        let _ = writeln!(s, "unsatisfiable: {}", r.unsat_concepts.join(", "));
    }
    for line in &r.inferred {
        let _ = writeln!(s, "inferred: {line}");
    }
    if !r.explanation.is_empty() {
        let _ = writeln!(s, "\n{}", r.explanation);
    }
    s
}

fn corpus_text(run: &CorpusRun) -> String {
    let mut s = String::new();
    for r in &run.reports {
        let expected = r.expected_verdict.map_or("-", Verdict::as_str);
        let mark = match r.matches_expectation {
            Some(true) => "ok",
            Some(false) => "UNEXPECTED",
            None => "",
        };
        let _ = writeln!(s, "{:<8} {:<17} expected {:<17} {mark}", r.myth_id, r.verdict.as_str(), expected);
    }
    let counts: Vec<String> = run.summary.by_verdict.iter().map(|(v, n)| format!("{} {n}", v.as_str())).collect();
    let _ = writeln!(s, "{} entries: {}; {} unexpected", run.summary.total, counts.join(", "), run.summary.unexpected.len());
    s
}

/// Parses `args` (program name first), runs the command and writes its output.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match cli.execute() {
        Ok(out) => {
            let written = match &cli.output {
                Some(path) => std::fs::write(path, &out.body).map_err(|source| CliError::Io { path: path.clone(), source }),
                None => {
                    print!("{}", out.body);
                    Ok(())
                }
            };
            match written {
                Ok(()) => out.code,
                Err(e) => {
                    eprintln!("error: {e}");
                    EXIT_USAGE
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn main() -> ExitCode {
    ExitCode::from(run(std::env::args_os()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_global_flags_after_subcommand() {
        let cli = Cli::try_parse_from(["mythos", "sat", "kb.krss", "--concept", "A", "--node-cap", "5"]).unwrap();
        assert_eq!(cli.node_cap, 5);
        assert!(matches!(cli.command, Command::Sat { .. }));
    }

    #[test]
    fn node_cap_must_be_positive() {
        assert!(Cli::try_parse_from(["mythos", "--node-cap", "0", "coherent", "kb.krss"]).is_err());
    }

    #[test]
    fn unknown_subcommand_is_usage_error() {
        assert_eq!(run(["mythos", "frobnicate"]), EXIT_USAGE);
        assert_eq!(run(["mythos", "consistent", "/nonexistent/kb.krss"]), EXIT_USAGE);
    }
}
