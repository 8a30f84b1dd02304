//! Minimal justifications for unsatisfiable concepts and inconsistent
//! knowledge bases, and their English verbalization.
//!
//! Extraction is black-box: statements are deleted while the defect persists,
//! first in halving windows and then one at a time, with the tableau as the
//! oracle. The final single-statement pass makes the result minimal because
//! the logic is monotone: a statement that was needed in a larger set is still
//! needed in any subset of it.

use serde::Serialize;

use crate::krss::{assertion_to_string, axiom_to_string};
use crate::model::{Assertion, AssertionKind, Axiom, AxiomKind, Comparator, ConceptExpr, KnowledgeBase, Source};
use crate::tableau::{Reasoner, TableauError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Defect {
    UnsatConcept { concept: String },
    AboxInconsistency,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Justification {
    pub defect: Defect,
    pub axioms: Vec<Axiom>,
    pub assertions: Vec<Assertion>,
}

impl Justification {
    pub fn len(&self) -> usize {
        self.axioms.len() + self.assertions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The statements alone, with the RBox of `kb`.
    pub fn to_kb(&self, rbox_from: &KnowledgeBase) -> KnowledgeBase {
        KnowledgeBase {
            tbox: self.axioms.clone(),
            abox: self.assertions.clone(),
            rbox: rbox_from.rbox.clone(),
            annotations: Vec::new(),
        }
    }

    /// One KRSS line per statement, axioms first.
    pub fn krss_lines(&self) -> Vec<String> {
        self.axioms
            .iter()
            .map(|a| axiom_to_string(&a.kind))
            .chain(self.assertions.iter().map(|a| assertion_to_string(&a.kind)))
            .collect()
    }

    /// Provenance label per statement, parallel to [`Self::krss_lines`].
    pub fn provenance(&self) -> Vec<String> {
        self.axioms
            .iter()
            .map(|a| a.source.label())
            .chain(self.assertions.iter().map(|a| a.source.label()))
            .collect()
    }
}

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum JustifyError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Tableau(#[from] TableauError),
}

#[derive(Clone)]
enum Statement {
    Axiom(Axiom),
    Assertion(Assertion),
}

fn build(kb: &KnowledgeBase, stmts: &[Statement]) -> KnowledgeBase {
    let mut out = KnowledgeBase { rbox: kb.rbox.clone(), ..KnowledgeBase::default() };
    for s in stmts {
        match s {
            Statement::Axiom(a) => out.tbox.push(a.clone()),
            Statement::Assertion(a) => out.abox.push(a.clone()),
        }
    }
    out
}

/// Shrinks `stmts` to a minimal subset on which `defect` still holds.
fn shrink(
    mut stmts: Vec<Statement>,
    defect: &mut dyn FnMut(&[Statement]) -> Result<bool, TableauError>,
) -> Result<Vec<Statement>, TableauError> {
    let mut window = stmts.len() / 2;
    while window > 1 {
        let mut i = 0;
        while i < stmts.len() {
            let end = (i + window).min(stmts.len());
            let candidate: Vec<Statement> = stmts[..i].iter().chain(&stmts[end..]).cloned().collect();
            if defect(&candidate)? {
                stmts = candidate;
            } else {
                i = end;
            }
        }
        window /= 2;
    }
    let mut i = 0;
    while i < stmts.len() {
        let mut candidate = stmts.clone();
        candidate.remove(i);
        if defect(&candidate)? {
            stmts = candidate;
        } else {
            i += 1;
        }
    }
    Ok(stmts)
}

fn split(defect: Defect, stmts: Vec<Statement>) -> Justification {
    let mut j = Justification { defect, axioms: Vec::new(), assertions: Vec::new() };
    for s in stmts {
        match s {
            Statement::Axiom(a) => j.axioms.push(a),
            Statement::Assertion(a) => j.assertions.push(a),
        }
    }
    j
}

/// One minimal set of TBox axioms making `concept` unsatisfiable.
pub fn justify_unsat(kb: &KnowledgeBase, concept: &str) -> Result<Justification, JustifyError> {
    justify_unsat_with(&Reasoner::default(), kb, concept)
}

pub fn justify_unsat_with(r: &Reasoner, kb: &KnowledgeBase, concept: &str) -> Result<Justification, JustifyError> {
    let c = ConceptExpr::atom(concept);
    if r.is_satisfiable(kb, &c)? {
        return Err(JustifyError::Precondition(format!("{concept} is satisfiable")));
    }
    let stmts = kb.tbox.iter().cloned().map(Statement::Axiom).collect();
    let mut defect = |s: &[Statement]| r.is_satisfiable(&build(kb, s), &c).map(|sat| !sat);
    let min = shrink(stmts, &mut defect)?;
    Ok(split(Defect::UnsatConcept { concept: concept.to_owned() }, min))
}

/// One minimal set of axioms and assertions with no model.
pub fn justify_inconsistency(kb: &KnowledgeBase) -> Result<Justification, JustifyError> {
    justify_inconsistency_with(&Reasoner::default(), kb)
}

pub fn justify_inconsistency_with(r: &Reasoner, kb: &KnowledgeBase) -> Result<Justification, JustifyError> {
    if r.is_consistent(kb)? {
        return Err(JustifyError::Precondition("the knowledge base is consistent".to_owned()));
    }
    let stmts = kb
        .tbox
        .iter()
        .cloned()
        .map(Statement::Axiom)
        .chain(kb.abox.iter().cloned().map(Statement::Assertion))
        .collect();
    let mut defect = |s: &[Statement]| r.is_consistent(&build(kb, s)).map(|ok| !ok);
    let min = shrink(stmts, &mut defect)?;
    Ok(split(Defect::AboxInconsistency, min))
}

/// English text for a justification: one sentence per statement, then a closing line.
pub fn verbalize(j: &Justification) -> String {
    let mut lines: Vec<String> = j.axioms.iter().map(verbalize_axiom).collect();
    lines.extend(j.assertions.iter().map(verbalize_assertion));
    lines.push("These statements cannot all be true.".to_owned());
    lines.join("\n")
}

pub fn verbalize_axiom(a: &Axiom) -> String {
    match &a.kind {
        AxiomKind::Gci { sub, sup } => match sub {
            ConceptExpr::Atom(name) => format!("Every {name} is {}.", phrase(sup, false)),
            ConceptExpr::Top => format!("Everything is {}.", phrase(sup, false)),
            other => format!("Everything that is {} is {}.", phrase(other, false), phrase(sup, false)),
        },
        AxiomKind::Equiv { left, right } => {
            format!("Being {} is the same as being {}.", phrase(left, false), phrase(right, false))
        }
        AxiomKind::Disjoint { left, right } => match (left.as_atom(), right.as_atom()) {
            (Some(l), Some(r)) => format!("No {l} is {}.", with_article(r)),
            _ => format!("Nothing is both {} and {}.", phrase(left, true), phrase(right, true)),
        },
    }
}

pub fn verbalize_assertion(a: &Assertion) -> String {
    let body = match &a.kind {
        AssertionKind::Concept { individual, concept } => format!("{individual} is {}", phrase(concept, false)),
        AssertionKind::Role { role, subject, object } => format!("{subject} {} {object}", verb(role)),
        AssertionKind::Data { attribute, individual, value } => format!("{individual} has {attribute} {value}"),
    };
    match &a.source {
        Source::Inferred(d) => {
            let bindings: Vec<String> = d.bindings.iter().map(|(v, i)| format!("?{v} = {i}")).collect();
            if bindings.is_empty() {
                format!("{body} (derived by rule {}).", d.rule)
            } else {
                format!("{body} (derived by rule {} with {}).", d.rule, bindings.join(", "))
            }
        }
        _ => format!("{body}."),
    }
}

fn with_article(noun: &str) -> String {
    let vowel = noun.chars().next().is_some_and(|c| "AEIOUaeiou".contains(c));
    format!("{} {noun}", if vowel { "an" } else { "a" })
}

/// Third-person form of a role name: `kill` becomes `kills`; `kills`,
/// `hasAge` and `isPartOf` are kept.
fn verb(role: &str) -> String {
    if role.ends_with('s') || role.starts_with("has") || role.starts_with("is") {
        role.to_owned()
    } else {
        format!("{role}s")
    }
}

fn list(items: &[String], conj: &str) -> String {
    match items {
        [] => String::new(),
        [one] => one.clone(),
        [init @ .., last] => format!("{} {conj} {last}", init.join(", ")),
    }
}

/// Noun phrase for a concept. Nested compound phrases are parenthesized.
fn phrase(c: &ConceptExpr, nested: bool) -> String {
    let wrap = |s: String| if nested { format!("({s})") } else { s };
    match c {
        ConceptExpr::Atom(a) => with_article(a),
        ConceptExpr::Top => "anything".to_owned(),
        ConceptExpr::Bottom => "nothing".to_owned(),
        ConceptExpr::Not(d) => format!("not {}", phrase(d, true)),
        ConceptExpr::And(cs) => {
            let parts: Vec<String> = cs.iter().map(|d| phrase(d, true)).collect();
            if parts.len() == 2 {
                wrap(format!("both {} and {}", parts[0], parts[1]))
            } else {
                wrap(format!("all of {}", list(&parts, "and")))
            }
        }
        ConceptExpr::Or(cs) => {
            let parts: Vec<String> = cs.iter().map(|d| phrase(d, true)).collect();
            if parts.len() == 2 {
                wrap(format!("either {} or {}", parts[0], parts[1]))
            } else {
                wrap(format!("one of {}", list(&parts, "or")))
            }
        }
        ConceptExpr::Exists(r, d) => wrap(format!("something that {} {}", verb(r), phrase(d, true))),
        ConceptExpr::ForAll(r, d) => wrap(format!("something that {} only {}", verb(r), phrase(d, true))),
        ConceptExpr::OneOf(ns) => match ns.as_slice() {
            [one] => format!("the individual {one}"),
            _ => wrap(format!("one of the individuals {}", list(ns, "or"))),
        },
        ConceptExpr::Facet(f) => {
            let rel = match f.comparator {
                Comparator::Gt => "greater than",
                Comparator::Ge => "at least",
                Comparator::Lt => "less than",
                Comparator::Le => "at most",
            };
            wrap(format!("something whose {} is {rel} {}", f.attribute, f.value))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::krss::parse_kb;
    use crate::model::Derivation;

    const EQS_4_6: &str = "(IMPLIES Covid-19 InfectiousDisease)\n\
        (IMPLIES InfectiousDisease (AND Disease (SOME causedBy (OR Bacteria Virus Parasite Fungi))))\n\
        (IMPLIES Covid-19 (NOT Disease))";

    #[test]
    fn derived_incoherence_needs_all_three_axioms() {
        let kb = parse_kb(EQS_4_6).unwrap();
        let j = justify_unsat(&kb, "Covid-19").unwrap();
        assert_eq!(j.axioms, kb.tbox);
        assert!(j.assertions.is_empty());
    }

    #[test]
    fn irrelevant_axioms_are_dropped() {
        let text = format!("(IMPLIES Virus Pathogen)\n{EQS_4_6}\n(DISJOINT Virus Bacteria)\n(IMPLIES Fungi Organism)");
        let kb = parse_kb(&text).unwrap();
        let j = justify_unsat(&kb, "Covid-19").unwrap();
        assert_eq!(j.axioms, parse_kb(EQS_4_6).unwrap().tbox);
    }

    #[test]
    fn satisfiable_concept_is_a_precondition_error() {
        let kb = parse_kb("(IMPLIES A B)").unwrap();
        assert!(matches!(justify_unsat(&kb, "A"), Err(JustifyError::Precondition(_))));
        assert!(matches!(justify_inconsistency(&KnowledgeBase::new()), Err(JustifyError::Precondition(_))));
    }

    #[test]
    fn sars_cov_2_justification_and_text() {
        let kb = parse_kb("(INSTANCE SARS-CoV-2 Virus)\n(INSTANCE SARS-CoV-2 Bacteria)\n(DISJOINT Virus Bacteria)\n(INSTANCE x Virus)").unwrap();
        let j = justify_inconsistency(&kb).unwrap();
        assert_eq!(j.len(), 3);
        assert_eq!(
            verbalize(&j),
            "No Virus is a Bacteria.\nSARS-CoV-2 is a Virus.\nSARS-CoV-2 is a Bacteria.\nThese statements cannot all be true."
        );
    }

    #[test]
    fn templates() {
        let a = |n: &str| ConceptExpr::atom(n);
        assert_eq!(verbalize_axiom(&Axiom::gci(a("Covid-19"), a("Disease"))), "Every Covid-19 is a Disease.");
        assert_eq!(verbalize_assertion(&Assertion::concept("person_1", ConceptExpr::not(a("Elderly")))), "person_1 is not an Elderly.");
        assert_eq!(verbalize_assertion(&Assertion::role("spread", "5G", "covid19")), "5G spreads covid19.");
        assert_eq!(
            verbalize_axiom(&Axiom::gci(a("Antibiotics"), ConceptExpr::exists("kills", a("Bacteria")))),
            "Every Antibiotics is something that kills a Bacteria."
        );
        assert_eq!(
            verbalize_axiom(&Axiom::gci(
                a("Virus"),
                ConceptExpr::not(ConceptExpr::exists("travel", ConceptExpr::Or(vec![a("RadioWaves"), a("MobileNetworks")])))
            )),
            "Every Virus is not (something that travels (either a RadioWaves or a MobileNetworks))."
        );
        let inferred = Assertion::concept("person_1", a("Elderly")).with_source(Source::Inferred(Derivation {
            rule: "elderly-only".into(),
            bindings: vec![("x".into(), "affect_1".into()), ("z".into(), "person_1".into())],
        }));
        assert_eq!(
            verbalize_assertion(&inferred),
            "person_1 is an Elderly (derived by rule elderly-only with ?x = affect_1, ?z = person_1)."
        );
    }
}
