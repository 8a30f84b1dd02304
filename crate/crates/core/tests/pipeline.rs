//! End-to-end behavior of claim checking and corpus runs.

mod common;

use std::path::Path;

use common::{data_dir, random_kb};
use mythos::ingest::{fetch_translation, normalize_fred, Mode};
use mythos::krss::parse_kb;
use mythos::model::{ConceptExpr, KnowledgeBase};
use mythos::pipeline::{
    check_claim, load_kb, load_manifest, load_rules, merge, run_corpus, run_entry, CheckOptions, CorpusEntry,
    ErrorKind, PipelineError, Step, Verdict,
};
use mythos::rules::Rule;
use mythos::tableau::Reasoner;

struct Inputs {
    myth: KnowledgeBase,
    fact: KnowledgeBase,
    background: KnowledgeBase,
    rules: Vec<Rule>,
}

fn corpus(id: &str) -> Inputs {
    let dir = data_dir().join("corpus");
    let entries = load_manifest(&dir.join("manifest.json")).unwrap();
    let e = entries.iter().find(|e| e.myth_id == id).unwrap();
    let load = |p: &Option<std::path::PathBuf>| load_kb(&dir.join(p.as_ref().unwrap())).unwrap();
    Inputs {
        myth: load(&e.myth_kb_path),
        fact: load(&e.fact_kb_path),
        background: load_kb(&dir.join(&e.background_kb_paths[0])).unwrap(),
        rules: load_rules(&dir.join(e.rules_path.as_ref().unwrap())).unwrap(),
    }
}

const IDS: [&str; 6] = ["m1", "m16", "m33", "m1-f16", "m16-f33", "m33-f1"];

#[test]
fn empty_manifest_gives_empty_run() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("manifest.json");
    std::fs::write(&path, "[]").unwrap();
    let run = run_corpus(&path, &CheckOptions::default()).unwrap();
    assert!(run.reports.is_empty());
    assert_eq!(run.summary.total, 0);
    assert!(run.summary.unexpected.is_empty());
}

#[test]
fn missing_manifest_is_an_io_error() {
    let err = run_corpus(Path::new("/nonexistent/manifest.json"), &CheckOptions::default()).unwrap_err();
    assert!(matches!(err, PipelineError::Io { .. }), "{err}");
}

#[test]
fn duplicate_ids_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("manifest.json");
    let row = r#"{"myth_id": "x", "myth_text": "", "fact_text": ""}"#;
    std::fs::write(&path, format!("[{row}, {row}]")).unwrap();
    assert!(matches!(load_manifest(&path), Err(PipelineError::DuplicateId(id)) if id == "x"));
}

#[test]
fn missing_kb_file_becomes_a_load_error_report() {
    let e = CorpusEntry {
        myth_id: "gone".into(),
        myth_text: String::new(),
        fact_text: String::new(),
        myth_kb_path: Some("does-not-exist.krss".into()),
        fact_kb_path: None,
        background_kb_paths: Vec::new(),
        rules_path: None,
        expected_verdict: Some(Verdict::Consistent),
    };
    let r = run_entry(&data_dir(), &e, &CheckOptions::default());
    assert_eq!(r.verdict, Verdict::Error);
    let err = r.error.unwrap();
    assert_eq!((err.step, err.kind), (Step::Load, ErrorKind::InvalidInput));
    assert_eq!(r.matches_expectation, Some(false));
}

#[test]
fn corpus_verdicts_match_the_manifest() {
    let run = run_corpus(&data_dir().join("corpus/manifest.json"), &CheckOptions::default()).unwrap();
    let got: Vec<(&str, Verdict)> = run.reports.iter().map(|r| (r.myth_id.as_str(), r.verdict)).collect();
    assert_eq!(
        got,
        [
            ("m1", Verdict::Inconsistent),
            ("m16", Verdict::Incoherent),
            ("m33", Verdict::Inconsistent),
            ("m1-f16", Verdict::Consistent),
            ("m16-f33", Verdict::Consistent),
            ("m33-f1", Verdict::Consistent),
        ]
    );
    assert!(run.summary.unexpected.is_empty());
    assert!(run.reports.iter().all(|r| r.timings.is_none()));
}

#[test]
fn table_rows_without_formalization_are_reported_as_such() {
    let run = run_corpus(&data_dir().join("corpus/myths.json"), &CheckOptions::default()).unwrap();
    assert_eq!(run.summary.total, 24);
    assert_eq!(run.summary.by_verdict[&Verdict::Unformalized], 21);
    assert!(run.summary.unexpected.is_empty());
}

#[test]
fn swapping_myth_and_fact_keeps_the_verdict() {
    for id in IDS {
        let i = corpus(id);
        let a = check_claim(&i.myth, &i.fact, &i.background, &i.rules);
        let b = check_claim(&i.fact, &i.myth, &i.background, &i.rules);
        assert_eq!(a.verdict, b.verdict, "{id}");
        assert_eq!(a.unsat_concepts, b.unsat_concepts, "{id}");
    }
    for seed in 0..60 {
        let (m, f) = (random_kb(seed), random_kb(seed + 1000));
        let a = check_claim(&m, &f, &KnowledgeBase::new(), &[]);
        let b = check_claim(&f, &m, &KnowledgeBase::new(), &[]);
        assert_eq!(a.verdict, b.verdict, "seed {seed}");
    }
}

/// A coherent, consistent KB over names the corpus never uses.
fn unrelated_kb() -> KnowledgeBase {
    let r = Reasoner::default();
    (0..)
        .map(random_kb)
        .find(|kb| {
            !kb.tbox.is_empty() && r.is_consistent(kb).unwrap() && r.is_coherent(kb).unwrap().0
        })
        .unwrap()
}

#[test]
fn adding_unrelated_background_keeps_the_verdict() {
    let extra = unrelated_kb();
    for id in IDS {
        let i = corpus(id);
        let before = check_claim(&i.myth, &i.fact, &i.background, &i.rules);
        let bg = merge(&[i.background.clone(), extra.clone()]).unwrap();
        let after = check_claim(&i.myth, &i.fact, &bg, &i.rules);
        assert_eq!(before.verdict, after.verdict, "{id}");
        assert_eq!(before.unsat_concepts, after.unsat_concepts, "{id}");
        assert_eq!(before.justifications, after.justifications, "{id}");
    }
}

/// Each reported justification, parsed back on its own, still exhibits the defect.
#[test]
fn justifications_replay() {
    let r = Reasoner::default();
    for id in ["m1", "m16", "m33"] {
        let i = corpus(id);
        let report = check_claim(&i.myth, &i.fact, &i.background, &i.rules);
        assert!(!report.justifications.is_empty(), "{id}");
        let rbox = merge(&[i.myth, i.fact, i.background]).unwrap().rbox;
        for j in &report.justifications {
            let mut kb = parse_kb(&j.statements.join("\n")).unwrap();
            kb.rbox = rbox.clone();
            match &j.concept {
                Some(c) => assert!(!r.is_satisfiable(&kb, &ConceptExpr::atom(c.as_str())).unwrap(), "{id}"),
                None => assert!(!r.is_consistent(&kb).unwrap(), "{id}"),
            }
            assert_eq!(j.statements.len(), j.provenance.len());
        }
    }
}

#[test]
fn isolation_separates_shared_individuals() {
    let i = corpus("m33");
    let opts = CheckOptions { isolate: true, ..CheckOptions::default() };
    let r = mythos::pipeline::check_claim_with("m33", &i.myth, &i.fact, &i.background, &i.rules, &opts);
    // Without the shared event the rule cannot fire.
    assert_eq!(r.verdict, Verdict::Consistent);
    assert!(r.inferred.is_empty());
}

#[test]
fn elderly_claim_from_machine_reading_is_inconsistent() {
    let mode = Mode::Fixtures { dir: data_dir().join("fred") };
    let read = |text: &str| normalize_fred(&fetch_translation(text, &mode).unwrap()).kb;
    let myth = read("Covid-19 can affect elderly only");
    let fact = read("Covid-19 can affect anyone");
    let i = corpus("m33");
    let r = check_claim(&myth, &fact, &i.background, &i.rules);
    assert_eq!(r.verdict, Verdict::Inconsistent);
    assert_eq!(r.inferred, ["(INSTANCE person_1 Elderly)"]);
    assert!(r.explanation.contains("person_1"));
}

#[test]
fn timings_are_reported_on_request() {
    let i = corpus("m16");
    let opts = CheckOptions { timings: true, ..CheckOptions::default() };
    let r = mythos::pipeline::check_claim_with("m16", &i.myth, &i.fact, &i.background, &i.rules, &opts);
    let t = r.timings.unwrap();
    assert!(t.coherence >= 0.0 && t.consistency >= 0.0);
}
