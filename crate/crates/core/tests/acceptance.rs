//! Acceptance criteria. Prints one PASS/FAIL line per criterion and fails if
//! any criterion fails or exceeds its time budget.
//!
//! Budgets: 1 s per criterion, 60 s for the oracle comparison.

mod common;

use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use common::{data_dir, random_kb_with, read_data, Flavor};
use mythos::antipatterns::{detect_antipatterns, PatternId};
use mythos::ingest::{fetch_translation, normalize_fred, Disposition, Mode};
use mythos::justify::{justify_inconsistency, justify_unsat};
use mythos::krss::{parse_document, parse_kb, serialize_document};
use mythos::model::{Annotation, AnnotationKey, Assertion, ConceptExpr, KnowledgeBase};
use mythos::pipeline::{check_claim, load_kb, load_rules, merge, ConflictReport, Verdict};
use mythos::tableau::{brute_force_consistent, Reasoner};

const BUDGET: Duration = Duration::from_secs(1);
const ORACLE_BUDGET: Duration = Duration::from_secs(60);
const ORACLE_KBS: u64 = 100;
const ORACLE_BOUND: usize = 3;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Duration);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn example(name: &str) -> KnowledgeBase {
    parse_kb(&read_data(&format!("examples/{name}.krss"))).unwrap()
}

fn reasoner() -> Reasoner {
    Reasoner::default()
}

/// Drops statement `i`, counting axioms first.
fn without(kb: &KnowledgeBase, i: usize) -> KnowledgeBase {
    let mut k = kb.clone();
    if i < k.tbox.len() {
        k.tbox.remove(i);
    } else {
        k.abox.remove(i - k.tbox.len());
    }
    k
}

/// Whether `kb` still shows the defect: `concept` unsatisfiable, or inconsistency.
fn defective(kb: &KnowledgeBase, concept: Option<&str>) -> bool {
    match concept {
        Some(c) => !reasoner().is_satisfiable(kb, &ConceptExpr::atom(c)).unwrap(),
        None => !reasoner().is_consistent(kb).unwrap(),
    }
}

/// The justification shows the defect and no single deletion keeps it.
fn minimal(kb: &KnowledgeBase, concept: Option<&str>) -> Result<(), String> {
    let n = kb.tbox.len() + kb.abox.len();
    ensure!(defective(kb, concept), "the justification alone does not show the defect");
    for i in 0..n {
        ensure!(!defective(&without(kb, i), concept), "statement {i} of {n} is redundant");
    }
    Ok(())
}

struct Claim {
    report: ConflictReport,
    merged_rbox: KnowledgeBase,
}

fn corpus_claim(myth: &str, fact: &str) -> Claim {
    let dir = data_dir().join("corpus");
    let load = |f: &str| load_kb(&dir.join(f)).unwrap();
    let (m, f, bg) = (load(myth), load(fact), load("background.krss"));
    let rules = load_rules(&dir.join("elderly.rules")).unwrap();
    let report = check_claim(&m, &f, &bg, &rules);
    let merged_rbox = KnowledgeBase { rbox: merge(&[m, f, bg]).unwrap().rbox, ..KnowledgeBase::new() };
    Claim { report, merged_rbox }
}

/// Minimality of every justification in a pipeline report.
fn report_minimal(c: &Claim) -> Result<usize, String> {
    ensure!(!c.report.justifications.is_empty(), "no justification reported");
    for j in &c.report.justifications {
        let mut kb = parse_kb(&j.statements.join("\n")).map_err(|e| e.to_string())?;
        kb.rbox = c.merged_rbox.rbox.clone();
        minimal(&kb, j.concept.as_deref())?;
    }
    Ok(c.report.justifications.len())
}

// ---------------------------------------------------------------- criteria

fn c1_incoherence() -> Outcome {
    let (ok, unsat) = reasoner().is_coherent(&example("incoherent")).unwrap();
    ensure!(!ok && unsat == ["Covid-19"], "got ({ok}, {unsat:?})");
    Ok("is_coherent = (false, [Covid-19])".into())
}

fn c2_derived_incoherence() -> Outcome {
    let kb = example("derived-incoherence");
    let c = ConceptExpr::atom("Covid-19");
    ensure!(!reasoner().is_satisfiable(&kb, &c).unwrap(), "Covid-19 is satisfiable");
    let j = justify_unsat(&kb, "Covid-19").unwrap();
    ensure!(j.axioms == kb.tbox && j.assertions.is_empty(), "justification {:?}", j.krss_lines());
    minimal(&j.to_kb(&kb), Some("Covid-19"))?;
    Ok("Covid-19 unsatisfiable, justified by exactly the 3 axioms".into())
}

fn c3_inconsistency() -> Outcome {
    let kb = example("inconsistent");
    ensure!(!reasoner().is_consistent(&kb).unwrap(), "consistent");
    let j = justify_inconsistency(&kb).unwrap();
    ensure!(j.len() == 3 && j.axioms == kb.tbox && j.assertions == kb.abox, "justification {:?}", j.krss_lines());
    Ok("inconsistent, justified by all 3 statements".into())
}

fn slots(m: &mythos::antipatterns::PatternMatch) -> Vec<(&str, &str)> {
    m.participants.iter().map(|(k, v)| (k.as_str(), v.as_str())).collect()
}

fn c4_ue() -> Outcome {
    let kb = example("ue");
    ensure!(!reasoner().is_satisfiable(&kb, &ConceptExpr::atom("Antibiotics")).unwrap(), "Antibiotics satisfiable");
    let ms = detect_antipatterns(&kb);
    let ue: Vec<_> = ms.iter().filter(|m| m.pattern_id == PatternId::Ue).collect();
    ensure!(ue.len() == 1, "{} UE matches", ue.len());
    let want = [("A", "Antibiotics"), ("B", "Bacteria"), ("C", "Virus"), ("r", "kills")];
    let mut got = slots(ue[0]);
    got.sort();
    ensure!(got == want, "slots {got:?}");
    Ok("unsatisfiable and UE(A=Antibiotics, r=kills, B=Bacteria, C=Virus)".into())
}

fn c5_oil() -> Outcome {
    let kb = example("oil");
    let ms = detect_antipatterns(&kb);
    ensure!(ms.iter().any(|m| m.pattern_id == PatternId::Oil), "OIL not flagged");
    ensure!(reasoner().is_satisfiable(&kb, &ConceptExpr::atom("Antibiotics")).unwrap(), "Antibiotics unsatisfiable");
    let probe = kb.clone().with_assertion(Assertion::concept("amoxicillin", ConceptExpr::atom("Antibiotics")));
    let bf = brute_force_consistent(&probe, ORACLE_BOUND);
    let model = bf.model().ok_or("no witness model")?;
    ensure!(model.is_model_of(&probe), "witness is not a model");
    ensure!(model.edge_count("kills") == 0, "witness has {} kills-edges", model.edge_count("kills"));
    Ok(format!("OIL flagged, Antibiotics satisfiable, witness of size {} with 0 kills-edges", model.domain.len()))
}

fn c6_m1() -> Outcome {
    let c = corpus_claim("m1.krss", "f1.krss");
    ensure!(c.report.verdict == Verdict::Inconsistent, "verdict {}", c.report.verdict.as_str());
    Ok("verdict inconsistent".into())
}

fn c7_m33() -> Outcome {
    let c = corpus_claim("m33.krss", "f33.krss");
    let r = &c.report;
    ensure!(r.inferred == ["(INSTANCE person_1 Elderly)"], "inferred {:?}", r.inferred);
    ensure!(r.verdict == Verdict::Inconsistent, "verdict {}", r.verdict.as_str());
    ensure!(
        r.explanation.contains("person_1") && r.explanation.contains("elderly-only"),
        "explanation {:?}",
        r.explanation
    );
    Ok("rule infers person_1:Elderly; inconsistent; explanation names person_1 and elderly-only".into())
}

fn c8_oracle() -> Outcome {
    let (mut definite, mut inconsistent) = (0, 0);
    for seed in 0..ORACLE_KBS {
        let kb = random_kb_with(seed, Flavor::Plain);
        let tab = reasoner().is_consistent(&kb).unwrap();
        if let Some(b) = brute_force_consistent(&kb, ORACLE_BOUND).answer() {
            ensure!(tab == b, "seed {seed}: tableau {tab}, model search {b}");
            definite += 1;
            inconsistent += usize::from(!b);
        }
    }
    Ok(format!("{definite}/{ORACLE_KBS} definite answers agree ({inconsistent} inconsistent)"))
}

fn shipped_krss() -> Vec<std::path::PathBuf> {
    let mut files = Vec::new();
    for sub in ["corpus", "examples"] {
        for e in std::fs::read_dir(data_dir().join(sub)).unwrap() {
            let p = e.unwrap().path();
            if p.extension().is_some_and(|x| x == "krss" || x == "rules") {
                files.push(p);
            }
        }
    }
    files.sort();
    files
}

fn c9_round_trip() -> Outcome {
    let files = shipped_krss();
    for p in &files {
        let name = p.file_name().unwrap().to_string_lossy();
        let first = parse_document(&std::fs::read_to_string(p).unwrap()).map_err(|e| format!("{name}: {e}"))?;
        let second = parse_document(&serialize_document(&first)).map_err(|e| format!("{name}: {e}"))?;
        ensure!(first.kb == second.kb && first.rules == second.rules, "{name} changes on round trip");
    }
    Ok(format!("{} files", files.len()))
}

fn c10_ingestion() -> Outcome {
    let mode = Mode::Fixtures { dir: data_dir().join("fred") };
    let dryers =
        normalize_fred(&fetch_translation("Hand dryers are effective in killing the new coronavirus", &mode).unwrap());
    ensure!(dryers.count(Disposition::DroppedSameAs) == 1, "sameAs not dropped");
    let linked = dryers.kb.abox.iter().any(|a| {
        let inds = a.kind.individuals();
        inds.contains(&"hand_dryers_1") && inds.contains(&"coronavirus_1")
    });
    ensure!(!linked, "a statement links hand_dryers_1 and coronavirus_1");
    ensure!(
        dryers.kb.abox.contains(&Assertion::role("involves", "situation_1", "hand_dryers_1")),
        "involves(situation_1, hand_dryers_1) missing"
    );
    let recovery = normalize_fred(&fetch_translation("You can not recover from the coronavirus infection", &mode).unwrap());
    let want = Annotation { individual: "recover_1".into(), key: AnnotationKey::TruthValue, value: "false".into() };
    ensure!(recovery.kb.annotations.contains(&want), "annotations {:?}", recovery.kb.annotations);
    Ok("sameAs dropped, involves kept; recover_1 truth-value false".into())
}

fn c11_minimality() -> Outcome {
    let kb = example("derived-incoherence");
    minimal(&justify_unsat(&kb, "Covid-19").unwrap().to_kb(&kb), Some("Covid-19"))?;
    let kb = example("inconsistent");
    minimal(&justify_inconsistency(&kb).unwrap().to_kb(&kb), None)?;
    let n1 = report_minimal(&corpus_claim("m1.krss", "f1.krss"))?;
    let n33 = report_minimal(&corpus_claim("m33.krss", "f33.krss"))?;
    Ok(format!("criteria 2, 3, 6 and 7: every deletion repairs ({} justifications)", 2 + n1 + n33))
}

fn c12_cli() -> Outcome {
    let manifest = data_dir().join("corpus/manifest.json");
    let out = Command::new(env!("CARGO_BIN_EXE_mythos")).arg("corpus").arg(&manifest).output().unwrap();
    ensure!(out.status.code() == Some(0), "exit {:?}", out.status.code());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    let reports = v["reports"].as_array().ok_or("no reports")?;
    let count = |pred: &dyn Fn(&str) -> bool| reports.iter().filter(|r| pred(r["verdict"].as_str().unwrap())).count();
    let conflicts = count(&|s| ["inconsistent", "incoherent", "antipattern-only"].contains(&s));
    let consistent = count(&|s| s == "consistent");
    ensure!(reports.len() == 6 && conflicts == 3 && consistent == 3, "{conflicts} conflicts, {consistent} consistent");
    ensure!(reports.iter().all(|r| r["matches_expectation"] == true), "a verdict differs from the manifest");
    Ok("exit 0; 3 conflicts, 3 consistent, all as expected".into())
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 12] = [
        ("incoherence", c1_incoherence, BUDGET),
        ("derived incoherence", c2_derived_incoherence, BUDGET),
        ("inconsistency", c3_inconsistency, BUDGET),
        ("universal existence", c4_ue, BUDGET),
        ("onlyness is loneliness", c5_oil, BUDGET),
        ("m1 pipeline", c6_m1, BUDGET),
        ("m33 pipeline", c7_m33, BUDGET),
        ("oracle agreement", c8_oracle, ORACLE_BUDGET),
        ("round trip", c9_round_trip, BUDGET),
        ("ingestion", c10_ingestion, BUDGET),
        ("justification minimality", c11_minimality, BUDGET),
        ("cli corpus", c12_cli, BUDGET),
    ];
    // Written to the process stdout directly so the lines are not captured.
    let mut stdout = std::io::stdout().lock();
    writeln!(stdout).unwrap();
    let mut failed = Vec::new();
    for (i, (name, run, budget)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(_) if took > budget => Err(format!("took {took:?}, budget {budget:?}")),
            o => o,
        };
        let (status, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        writeln!(stdout, "{status} {:>2} {name}: {detail} [{:.0} ms]", i + 1, took.as_secs_f64() * 1000.0).unwrap();
        if outcome.is_err() {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
