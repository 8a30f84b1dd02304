//! Syntactic detection of three axiom shapes that signal modeling defects.
//!
//! * `OIL`: `A ⊑ ∀r.B`, `A ⊑ ∀r.C` with `B`, `C` disjoint. Only an `A` with
//!   no `r`-successor satisfies both, which is rarely what the author meant.
//! * `UE`: `A ⊑ ∀r.C`, `A ⊑ ∃r.B` with `B`, `C` disjoint. `A` is unsatisfiable.
//! * `DISJOINT_SUBSUMPTION`: `A ⊑ B` and `A ⊑ ¬B`. `A` is unsatisfiable.
//!
//! Matching runs over asserted axioms only. Conjunctions on the right-hand
//! side are split, `EQUIVALENT` counts in both directions, and disjointness
//! is accepted as `B ⊑ ¬C`, `C ⊑ ¬B`, `(DISJOINT B C)` or `(DISJOINT C B)`.
//! No subsumption closure is computed.

use std::collections::BTreeMap;

use serde::{Serialize, Serializer};

use crate::krss::axiom_to_string;
use crate::model::{Axiom, AxiomKind, ConceptExpr, KnowledgeBase};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum PatternId {
    #[serde(rename = "OIL")]
    Oil,
    #[serde(rename = "UE")]
    Ue,
    #[serde(rename = "DISJOINT_SUBSUMPTION")]
    DisjointSubsumption,
}

impl PatternId {
    pub fn as_str(self) -> &'static str {
        match self {
            PatternId::Oil => "OIL",
            PatternId::Ue => "UE",
            PatternId::DisjointSubsumption => "DISJOINT_SUBSUMPTION",
        }
    }

    /// `OIL` does not make `A` unsatisfiable, so it is reported as a smell.
    pub fn classification(self) -> &'static str {
        match self {
            PatternId::Oil => "modeling smell",
            PatternId::Ue | PatternId::DisjointSubsumption => "incoherence",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PatternMatch {
    pub pattern_id: PatternId,
    pub classification: &'static str,
    /// Slot name (`A`, `B`, `C`, `r`) to concept or role name.
    pub participants: BTreeMap<String, String>,
    /// Matched axioms in knowledge-base order. Serialized as KRSS lines.
    #[serde(serialize_with = "krss_lines")]
    pub axioms: Vec<Axiom>,
}

fn krss_lines<S: Serializer>(axioms: &[Axiom], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(axioms.iter().map(|a| axiom_to_string(&a.kind)))
}

impl PatternMatch {
    pub fn slot(&self, name: &str) -> Option<&str> {
        self.participants.get(name).map(String::as_str)
    }

    fn sort_key(&self) -> (PatternId, [&str; 4]) {
        let s = |k| self.slot(k).unwrap_or("");
        (self.pattern_id, [s("A"), s("r"), s("B"), s("C")])
    }
}

/// One normalized inclusion `A ⊑ sup` from the axiom at index `axiom`.
struct Inclusion<'a> {
    sub: &'a str,
    sup: ConceptExpr,
    axiom: usize,
}

fn conjuncts(c: &ConceptExpr) -> Vec<ConceptExpr> {
    match c {
        ConceptExpr::And(cs) => cs.iter().flat_map(conjuncts).collect(),
        other => vec![other.clone()],
    }
}

fn inclusions(kb: &KnowledgeBase) -> Vec<Inclusion<'_>> {
    let mut out = Vec::new();
    for (i, ax) in kb.tbox.iter().enumerate() {
        let pairs: Vec<(&ConceptExpr, ConceptExpr)> = match &ax.kind {
            AxiomKind::Gci { sub, sup } => vec![(sub, sup.clone())],
            AxiomKind::Equiv { left, right } => vec![(left, right.clone()), (right, left.clone())],
            AxiomKind::Disjoint { left, right } => {
                vec![(left, ConceptExpr::not(right.clone())), (right, ConceptExpr::not(left.clone()))]
            }
        };
        for (sub, sup) in pairs {
            if let ConceptExpr::Atom(a) = sub {
                for c in conjuncts(&sup) {
                    out.push(Inclusion { sub: a, sup: c, axiom: i });
                }
            }
        }
    }
    out
}

/// Finds the first axiom stating that atoms `b` and `c` are disjoint.
fn disjointness(incs: &[Inclusion<'_>], b: &str, c: &str) -> Option<usize> {
    incs.iter()
        .filter(|inc| {
            let neg_of = |x: &str| matches!(&inc.sup, ConceptExpr::Not(n) if n.as_atom() == Some(x));
            (inc.sub == b && neg_of(c)) || (inc.sub == c && neg_of(b))
        })
        .map(|inc| inc.axiom)
        .min()
}

fn make(kb: &KnowledgeBase, id: PatternId, slots: &[(&str, &str)], mut axioms: Vec<usize>) -> PatternMatch {
    axioms.sort_unstable();
    axioms.dedup();
    PatternMatch {
        pattern_id: id,
        classification: id.classification(),
        participants: slots.iter().map(|&(k, v)| (k.to_owned(), v.to_owned())).collect(),
        axioms: axioms.into_iter().map(|i| kb.tbox[i].clone()).collect(),
    }
}

/// Every instance of the three patterns, sorted by pattern then slot values.
pub fn detect_antipatterns(kb: &KnowledgeBase) -> Vec<PatternMatch> {
    let incs = inclusions(kb);
    let mut out: Vec<PatternMatch> = Vec::new();
    let mut push = |m: PatternMatch| {
        if !out.iter().any(|o| o.pattern_id == m.pattern_id && o.participants == m.participants) {
            out.push(m);
        }
    };
    for (i, first) in incs.iter().enumerate() {
        match &first.sup {
            ConceptExpr::ForAll(r, b) => {
                let Some(b) = b.as_atom() else { continue };
                for second in &incs[i + 1..] {
                    let ConceptExpr::ForAll(r2, c) = &second.sup else { continue };
                    let Some(c) = c.as_atom() else { continue };
                    if second.sub != first.sub || r2 != r || c == b {
                        continue;
                    }
                    if let Some(d) = disjointness(&incs, b, c) {
                        let slots = [("A", first.sub), ("r", r.as_str()), ("B", b), ("C", c)];
                        push(make(kb, PatternId::Oil, &slots, vec![first.axiom, second.axiom, d]));
                    }
                }
                for second in &incs {
                    let ConceptExpr::Exists(r2, e) = &second.sup else { continue };
                    let Some(e) = e.as_atom() else { continue };
                    if second.sub != first.sub || r2 != r || e == b {
                        continue;
                    }
                    if let Some(d) = disjointness(&incs, e, b) {
                        let slots = [("A", first.sub), ("r", r.as_str()), ("B", e), ("C", b)];
                        push(make(kb, PatternId::Ue, &slots, vec![first.axiom, second.axiom, d]));
                    }
                }
            }
            ConceptExpr::Atom(x) => {
                let neg = incs.iter().find(|other| {
                    other.sub == first.sub && matches!(&other.sup, ConceptExpr::Not(n) if n.as_atom() == Some(x))
                });
                if let Some(neg) = neg {
                    let slots = [("A", first.sub), ("B", x.as_str())];
                    push(make(kb, PatternId::DisjointSubsumption, &slots, vec![first.axiom, neg.axiom]));
                }
            }
            _ => {}
        }
    }
    out.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::krss::parse_kb;

    const OIL: &str = "(IMPLIES Antibiotics (ALL kills Virus))\n(IMPLIES Antibiotics (ALL kills Bacteria))\n(IMPLIES Virus (NOT Bacteria))";
    const UE: &str = "(IMPLIES Antibiotics (ALL kills Virus))\n(IMPLIES Antibiotics (SOME kills Bacteria))\n(IMPLIES Virus (NOT Bacteria))";

    fn slots(m: &PatternMatch) -> Vec<(&str, &str)> {
        ["A", "r", "B", "C"].iter().filter_map(|k| m.slot(k).map(|v| (*k, v))).collect()
    }

    #[test]
    fn oil_example() {
        let ms = detect_antipatterns(&parse_kb(OIL).unwrap());
        assert_eq!(ms.len(), 1);
        assert_eq!(ms[0].pattern_id, PatternId::Oil);
        assert_eq!(slots(&ms[0]), vec![("A", "Antibiotics"), ("r", "kills"), ("B", "Virus"), ("C", "Bacteria")]);
        assert_eq!(ms[0].axioms.len(), 3);
        assert_eq!(ms[0].classification, "modeling smell");
        let json = serde_json::to_value(&ms[0]).unwrap();
        assert_eq!(json["axioms"][2], "(IMPLIES Virus (NOT Bacteria))");
    }

    #[test]
    fn ue_example() {
        let ms = detect_antipatterns(&parse_kb(UE).unwrap());
        assert_eq!(ms.len(), 1);
        assert_eq!(ms[0].pattern_id, PatternId::Ue);
        assert_eq!(slots(&ms[0]), vec![("A", "Antibiotics"), ("r", "kills"), ("B", "Bacteria"), ("C", "Virus")]);
    }

    #[test]
    fn disjoint_subsumption_example() {
        let kb = parse_kb("(IMPLIES Covid-19 InfectionDisease)\n(IMPLIES Covid-19 (NOT InfectionDisease))").unwrap();
        let ms = detect_antipatterns(&kb);
        assert_eq!(ms.len(), 1);
        assert_eq!(ms[0].pattern_id, PatternId::DisjointSubsumption);
        assert_eq!(slots(&ms[0]), vec![("A", "Covid-19"), ("B", "InfectionDisease")]);
    }

    #[test]
    fn no_value_restrictions_no_matches() {
        let kb = parse_kb("(IMPLIES Covid-19 Disease)\n(INSTANCE x Virus)").unwrap();
        assert!(detect_antipatterns(&kb).is_empty());
    }

    #[test]
    fn disjointness_in_any_form_and_orientation() {
        for dj in ["(DISJOINT Virus Bacteria)", "(DISJOINT Bacteria Virus)", "(IMPLIES Bacteria (NOT Virus))"] {
            let text = format!("(IMPLIES Antibiotics (AND (ALL kills Virus) (SOME kills Bacteria)))\n{dj}");
            let ms = detect_antipatterns(&parse_kb(&text).unwrap());
            assert_eq!(ms.len(), 1, "{dj}");
            assert_eq!(ms[0].pattern_id, PatternId::Ue);
        }
    }

    #[test]
    fn equivalence_counts_as_inclusion() {
        let kb = parse_kb("(EQUIVALENT A (AND B (NOT B)))").unwrap();
        assert_eq!(detect_antipatterns(&kb)[0].pattern_id, PatternId::DisjointSubsumption);
    }

    #[test]
    fn sorted_and_deduplicated() {
        let text = format!("{OIL}\n(IMPLIES Antibiotics (SOME kills Bacteria))\n(DISJOINT Virus Bacteria)");
        let ms = detect_antipatterns(&parse_kb(&text).unwrap());
        let ids: Vec<_> = ms.iter().map(|m| m.pattern_id).collect();
        assert_eq!(ids, vec![PatternId::Oil, PatternId::Ue]);
    }
}
