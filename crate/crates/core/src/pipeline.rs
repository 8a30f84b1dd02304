//! Claim checking: merge a myth, the facts and background knowledge, apply
//! rules, run the reasoner and the linter, and explain what went wrong.

use std::collections::{BTreeMap, HashSet};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::antipatterns::{detect_antipatterns, PatternMatch};
use crate::justify::{
    justify_inconsistency_with, justify_unsat_with, verbalize, verbalize_axiom, Defect, JustifyError, Justification,
};
use crate::krss::{assertion_to_string, parse_kb, parse_rules, KrssError};
use crate::model::{KnowledgeBase, ModelError, Source};
use crate::rules::{apply_rules_capped, Rule, RuleError, DEFAULT_INFERENCE_CAP};
use crate::tableau::{Reasoner, TableauError, DEFAULT_NODE_CAP};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Consistent,
    Incoherent,
    Inconsistent,
    AntipatternOnly,
    /// Corpus entry shipped as text only.
    Unformalized,
    Error,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Consistent => "consistent",
            Verdict::Incoherent => "incoherent",
            Verdict::Inconsistent => "inconsistent",
            Verdict::AntipatternOnly => "antipattern-only",
            Verdict::Unformalized => "unformalized",
            Verdict::Error => "error",
        }
    }

    pub fn is_conflict(self) -> bool {
        matches!(self, Verdict::Incoherent | Verdict::Inconsistent | Verdict::AntipatternOnly)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Step {
    Load,
    Merge,
    Rules,
    Antipatterns,
    Coherence,
    Consistency,
    Justification,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorKind {
    ResourceLimit,
    InvalidInput,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepError {
    pub step: Step,
    pub kind: ErrorKind,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct JustificationReport {
    pub kind: &'static str,
    pub concept: Option<String>,
    /// KRSS lines, axioms first.
    pub statements: Vec<String>,
    pub provenance: Vec<String>,
}

impl From<&Justification> for JustificationReport {
    fn from(j: &Justification) -> Self {
        let (kind, concept) = match &j.defect {
            Defect::UnsatConcept { concept } => ("unsat-concept", Some(concept.clone())),
            Defect::AboxInconsistency => ("abox-inconsistency", None),
        };
        JustificationReport { kind, concept, statements: j.krss_lines(), provenance: j.provenance() }
    }
}

/// Wall-clock milliseconds per step.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Timings {
    pub merge: f64,
    pub rules: f64,
    pub antipatterns: f64,
    pub coherence: f64,
    pub consistency: f64,
    pub justification: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConflictReport {
    pub myth_id: String,
    pub verdict: Verdict,
    pub unsat_concepts: Vec<String>,
    pub pattern_matches: Vec<PatternMatch>,
    /// Assertions added by rules, as KRSS lines.
    pub inferred: Vec<String>,
    pub justifications: Vec<JustificationReport>,
    pub explanation: String,
    pub timings: Option<Timings>,
    pub error: Option<StepError>,
    pub expected_verdict: Option<Verdict>,
    pub matches_expectation: Option<bool>,
}

impl ConflictReport {
    fn new(myth_id: &str, verdict: Verdict) -> Self {
        ConflictReport {
            myth_id: myth_id.to_owned(),
            verdict,
            unsat_concepts: Vec::new(),
            pattern_matches: Vec::new(),
            inferred: Vec::new(),
            justifications: Vec::new(),
            explanation: String::new(),
            timings: None,
            error: None,
            expected_verdict: None,
            matches_expectation: None,
        }
    }

    fn failed(mut self, step: Step, kind: ErrorKind, message: String) -> Self {
        self.verdict = Verdict::Error;
        self.explanation = format!("The {} step failed: {message}", step_name(step));
        self.error = Some(StepError { step, kind, message });
        self
    }

    fn expect(mut self, expected: Option<Verdict>) -> Self {
        self.expected_verdict = expected;
        self.matches_expectation = expected.map(|e| e == self.verdict);
        self
    }

    pub fn is_resource_limit(&self) -> bool {
        matches!(&self.error, Some(e) if e.kind == ErrorKind::ResourceLimit)
    }
}

fn step_name(step: Step) -> &'static str {
    match step {
        Step::Load => "load",
        Step::Merge => "merge",
        Step::Rules => "rules",
        Step::Antipatterns => "antipatterns",
        Step::Coherence => "coherence",
        Step::Consistency => "consistency",
        Step::Justification => "justification",
    }
}

fn tableau_kind(e: &TableauError) -> ErrorKind {
    match e {
        TableauError::ResourceLimit { .. } => ErrorKind::ResourceLimit,
        _ => ErrorKind::InvalidInput,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckOptions {
    pub node_cap: usize,
    pub inference_cap: usize,
    pub timings: bool,
    /// Prefix individuals with `myth_`, `fact_` and `bg_` so inputs share no individuals.
    pub isolate: bool,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions { node_cap: DEFAULT_NODE_CAP, inference_cap: DEFAULT_INFERENCE_CAP, timings: false, isolate: false }
    }
}

/// Union of the inputs in order. Duplicate statements keep the provenance of
/// their first occurrence. Role declarations with the same name are combined.
pub fn merge(kbs: &[KnowledgeBase]) -> Result<KnowledgeBase, ModelError> {
    let mut out = KnowledgeBase::new();
    let mut seen_ax = HashSet::new();
    let mut seen_as = HashSet::new();
    let mut seen_an = HashSet::new();
    for kb in kbs {
        for ax in &kb.tbox {
            if seen_ax.insert(ax.kind.clone()) {
                out.tbox.push(ax.clone());
            }
        }
        for a in &kb.abox {
            if seen_as.insert(a.kind.clone()) {
                out.abox.push(a.clone());
            }
        }
        for d in &kb.rbox {
            let Some(existing) = out.rbox.iter_mut().find(|e| e.name == d.name) else {
                out.rbox.push(d.clone());
                continue;
            };
            existing.parents.extend(d.parents.iter().cloned());
            existing.explicit |= d.explicit;
            match (&existing.inverse_of, &d.inverse_of) {
                (Some(a), Some(b)) if a != b => {
                    return Err(ModelError::InverseConflict {
                        role: d.name.clone(),
                        first: a.clone(),
                        second: b.clone(),
                    })
                }
                (None, Some(b)) => existing.inverse_of = Some(b.clone()),
                _ => {}
            }
        }
        for an in &kb.annotations {
            if seen_an.insert(an.clone()) {
                out.annotations.push(an.clone());
            }
        }
    }
    // Inverse declarations may only conflict once completed symmetrically.
    out.clone().close_roles()?;
    Ok(out)
}

/// [`check_claim_with`] with default options and the id `claim`.
pub fn check_claim(
    myth: &KnowledgeBase,
    fact: &KnowledgeBase,
    background: &KnowledgeBase,
    rules: &[Rule],
) -> ConflictReport {
    check_claim_with("claim", myth, fact, background, rules, &CheckOptions::default())
}

fn timed<T>(slot: &mut f64, f: impl FnOnce() -> T) -> T {
    let start = Instant::now();
    let out = f();
    *slot = start.elapsed().as_secs_f64() * 1000.0;
    out
}

pub fn check_claim_with(
    myth_id: &str,
    myth: &KnowledgeBase,
    fact: &KnowledgeBase,
    background: &KnowledgeBase,
    rules: &[Rule],
    opts: &CheckOptions,
) -> ConflictReport {
    let mut report = ConflictReport::new(myth_id, Verdict::Consistent);
    let mut t = Timings::default();
    let reasoner = Reasoner::with_node_cap(opts.node_cap);

    let inputs: Vec<KnowledgeBase> = [(myth, Source::Myth, "myth_"), (fact, Source::Fact, "fact_"), (background, Source::Background, "bg_")]
        .into_iter()
        .map(|(kb, source, prefix)| {
            let mut kb = kb.clone();
            kb.retag(source);
            if opts.isolate {
                kb.prefix_individuals(prefix);
            }
            kb
        })
        .collect();

    let merged = match timed(&mut t.merge, || merge(&inputs)) {
        Ok(kb) => kb,
        Err(e) => return report.failed(Step::Merge, ErrorKind::InvalidInput, e.to_string()),
    };
    let kb = match timed(&mut t.rules, || apply_rules_capped(&merged, rules, opts.inference_cap)) {
        Ok(kb) => kb,
        Err(e) => {
            let kind = match e {
                RuleError::ResourceLimit { .. } => ErrorKind::ResourceLimit,
                _ => ErrorKind::InvalidInput,
            };
            return report.failed(Step::Rules, kind, e.to_string());
        }
    };
    report.inferred =
        kb.abox.iter().filter(|a| a.source.is_inferred()).map(|a| assertion_to_string(&a.kind)).collect();
    report.pattern_matches = timed(&mut t.antipatterns, || detect_antipatterns(&kb));

    let unsat = match timed(&mut t.coherence, || reasoner.is_coherent(&kb)) {
        Ok((_, unsat)) => unsat,
        Err(e) => return report.failed(Step::Coherence, tableau_kind(&e), e.to_string()),
    };
    let consistent = match timed(&mut t.consistency, || reasoner.is_consistent(&kb)) {
        Ok(c) => c,
        Err(e) => return report.failed(Step::Consistency, tableau_kind(&e), e.to_string()),
    };

    let justified: Result<Vec<Justification>, JustifyError> = timed(&mut t.justification, || {
        let mut js = Vec::new();
        if !consistent {
            js.push(justify_inconsistency_with(&reasoner, &kb)?);
        }
        for c in &unsat {
            js.push(justify_unsat_with(&reasoner, &kb, c)?);
        }
        Ok(js)
    });
    let justs = match justified {
        Ok(js) => js,
        Err(JustifyError::Tableau(e)) => return report.failed(Step::Justification, tableau_kind(&e), e.to_string()),
        Err(e) => return report.failed(Step::Justification, ErrorKind::InvalidInput, e.to_string()),
    };

    report.verdict = if !consistent {
        Verdict::Inconsistent
    } else if !unsat.is_empty() {
        Verdict::Incoherent
    } else if !report.pattern_matches.is_empty() {
        Verdict::AntipatternOnly
    } else {
        Verdict::Consistent
    };
    report.explanation = match report.verdict {
        Verdict::AntipatternOnly => report.pattern_matches.iter().map(describe_match).collect::<Vec<_>>().join("\n\n"),
        _ => justs.iter().map(explain).collect::<Vec<_>>().join("\n\n"),
    };
    report.justifications = justs.iter().map(JustificationReport::from).collect();
    report.unsat_concepts = unsat;
    if opts.timings {
        report.timings = Some(t);
    }
    report
}

fn explain(j: &Justification) -> String {
    let head = match &j.defect {
        Defect::UnsatConcept { concept } => format!("Nothing can be {concept}:"),
        Defect::AboxInconsistency => "The merged knowledge base is inconsistent:".to_owned(),
    };
    format!("{head}\n{}", verbalize(j))
}

/// One paragraph per pattern match: header with the slot bindings, then the axioms.
pub fn describe_match(m: &PatternMatch) -> String {
    let slots: Vec<String> = ["A", "r", "B", "C"]
        .iter()
        .filter_map(|k| m.slot(k).map(|v| format!("{k} = {v}")))
        .collect();
    let mut lines = vec![format!("{} ({}) with {}:", m.pattern_id.as_str(), m.classification, slots.join(", "))];
    lines.extend(m.axioms.iter().map(verbalize_axiom));
    lines.join("\n")
}

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Krss { path: PathBuf, source: KrssError },
    #[error("{path}: {source}")]
    Manifest { path: PathBuf, source: serde_json::Error },
    #[error("duplicate myth id {0} in manifest")]
    DuplicateId(String),
}

fn read(path: &Path) -> Result<String, PipelineError> {
    std::fs::read_to_string(path).map_err(|source| PipelineError::Io { path: path.to_owned(), source })
}

pub fn load_kb(path: &Path) -> Result<KnowledgeBase, PipelineError> {
    parse_kb(&read(path)?).map_err(|source| PipelineError::Krss { path: path.to_owned(), source })
}

pub fn load_rules(path: &Path) -> Result<Vec<Rule>, PipelineError> {
    parse_rules(&read(path)?).map_err(|source| PipelineError::Krss { path: path.to_owned(), source })
}

/// One row of a corpus manifest. Paths are relative to the manifest's directory.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusEntry {
    pub myth_id: String,
    pub myth_text: String,
    pub fact_text: String,
    #[serde(default)]
    pub myth_kb_path: Option<PathBuf>,
    #[serde(default)]
    pub fact_kb_path: Option<PathBuf>,
    #[serde(default)]
    pub background_kb_paths: Vec<PathBuf>,
    #[serde(default)]
    pub rules_path: Option<PathBuf>,
    #[serde(default)]
    pub expected_verdict: Option<Verdict>,
}

impl CorpusEntry {
    pub fn is_formalized(&self) -> bool {
        self.myth_kb_path.is_some() || self.fact_kb_path.is_some()
    }
}

pub fn load_manifest(path: &Path) -> Result<Vec<CorpusEntry>, PipelineError> {
    let entries: Vec<CorpusEntry> = serde_json::from_str(&read(path)?)
        .map_err(|source| PipelineError::Manifest { path: path.to_owned(), source })?;
    let mut ids = HashSet::new();
    for e in &entries {
        if !ids.insert(e.myth_id.as_str()) {
            return Err(PipelineError::DuplicateId(e.myth_id.clone()));
        }
    }
    Ok(entries)
}

struct Loaded {
    myth: KnowledgeBase,
    fact: KnowledgeBase,
    background: KnowledgeBase,
    rules: Vec<Rule>,
}

fn load_entry(base: &Path, e: &CorpusEntry) -> Result<Loaded, String> {
    let kb = |p: &Option<PathBuf>| p.as_ref().map_or(Ok(KnowledgeBase::new()), |p| load_kb(&base.join(p)));
    let err = |e: PipelineError| e.to_string();
    let myth = kb(&e.myth_kb_path).map_err(err)?;
    let fact = kb(&e.fact_kb_path).map_err(err)?;
    let backgrounds = e.background_kb_paths.iter().map(|p| load_kb(&base.join(p))).collect::<Result<Vec<_>, _>>();
    let background = merge(&backgrounds.map_err(err)?).map_err(|e| e.to_string())?;
    let rules = match &e.rules_path {
        Some(p) => load_rules(&base.join(p)).map_err(err)?,
        None => Vec::new(),
    };
    Ok(Loaded { myth, fact, background, rules })
}

/// Checks one manifest entry. File problems become an error report.
pub fn run_entry(base: &Path, e: &CorpusEntry, opts: &CheckOptions) -> ConflictReport {
    if !e.is_formalized() {
        let mut r = ConflictReport::new(&e.myth_id, Verdict::Unformalized);
        r.explanation = "No formalization is available for this entry.".to_owned();
        return r.expect(e.expected_verdict);
    }
    let report = match load_entry(base, e) {
        Ok(l) => check_claim_with(&e.myth_id, &l.myth, &l.fact, &l.background, &l.rules, opts),
        Err(msg) => ConflictReport::new(&e.myth_id, Verdict::Error).failed(Step::Load, ErrorKind::InvalidInput, msg),
    };
    report.expect(e.expected_verdict)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub by_verdict: BTreeMap<Verdict, usize>,
    /// Ids whose verdict differs from the expected one.
    pub unexpected: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusRun {
    pub reports: Vec<ConflictReport>,
    pub summary: Summary,
}

pub fn summarize(reports: &[ConflictReport]) -> Summary {
    let mut by_verdict = BTreeMap::new();
    for r in reports {
        *by_verdict.entry(r.verdict).or_insert(0) += 1;
    }
    let unexpected =
        reports.iter().filter(|r| r.matches_expectation == Some(false)).map(|r| r.myth_id.clone()).collect();
    Summary { total: reports.len(), by_verdict, unexpected }
}

/// Checks every entry of the manifest at `manifest`, in parallel. Reports
/// keep manifest order.
pub fn run_corpus(manifest: &Path, opts: &CheckOptions) -> Result<CorpusRun, PipelineError> {
    let entries = load_manifest(manifest)?;
    let base = manifest.parent().unwrap_or(Path::new("."));
    let reports: Vec<ConflictReport> = entries.par_iter().map(|e| run_entry(base, e, opts)).collect();
    let summary = summarize(&reports);
    Ok(CorpusRun { reports, summary })
}
