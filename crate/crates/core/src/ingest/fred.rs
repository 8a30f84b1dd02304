//! Normalization of machine-reading RDF graphs into knowledge bases.
//!
//! Every input triple gets exactly one [`Disposition`]. `owl:sameAs` triples
//! are always dropped: the reader emits them for copular sentences ("X are
//! Y") where they wrongly identify distinct entities.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::ntriples::{Graph, Object, Triple};
use crate::model::{Annotation, AnnotationKey, Assertion, Axiom, ConceptExpr, KnowledgeBase};

pub const DEFAULT_PREFIX: &str = "covid19.m:";

/// Prefix table, longest namespaces first where one extends another.
pub const PREFIXES: &[(&str, &str)] = &[
    ("covid19.m:", "http://www.ontologydesignpatterns.org/ont/Covid-19/covid-19-myths.owl#"),
    ("vn.role:", "http://www.ontologydesignpatterns.org/ont/vn/abox/role/"),
    ("vn.data:", "http://www.ontologydesignpatterns.org/ont/vn/data/"),
    ("ff:", "http://www.ontologydesignpatterns.org/ont/framenet/abox/frame/"),
    ("fe:", "http://www.ontologydesignpatterns.org/ont/framenet/abox/fe/"),
    ("dul:", "http://www.ontologydesignpatterns.org/ont/dul/DUL.owl#"),
    ("wn30:", "http://www.w3.org/2006/03/wn/wn30/instances/"),
    ("boxer:", "http://ontologydesignpatterns.org/ont/boxer/boxer.owl#"),
    ("boxing:", "http://ontologydesignpatterns.org/ont/boxer/boxing.owl#"),
    ("dbpedia:", "http://dbpedia.org/resource/"),
    ("schemaorg:", "http://schema.org/"),
    ("q:", "http://www.ontologydesignpatterns.org/ont/fred/quantifiers.owl#"),
    ("rdf:", "http://www.w3.org/1999/02/22-rdf-syntax-ns#"),
    ("rdfs:", "http://www.w3.org/2000/01/rdf-schema#"),
    ("owl:", "http://www.w3.org/2002/07/owl#"),
    ("xsd:", "http://www.w3.org/2001/XMLSchema#"),
];

/// Marker concept for events the reader tagged with truth value false.
pub const FALSE_EVENT: &str = "FalseEvent";
pub const TRUE_EVENT: &str = "TrueEvent";

/// Expands `prefix:local` with the table above.
pub fn expand(curie: &str) -> Option<String> {
    PREFIXES.iter().find_map(|(p, ns)| curie.strip_prefix(p).map(|local| format!("{ns}{local}")))
}

/// Splits an IRI into a known prefix and local name.
pub fn compact(iri: &str) -> Option<(&'static str, &str)> {
    PREFIXES.iter().find_map(|(p, ns)| iri.strip_prefix(ns).filter(|l| !l.is_empty()).map(|l| (*p, l)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Disposition {
    /// Became a TBox axiom or ABox assertion.
    Mapped,
    /// Became an annotation, possibly with a marker assertion.
    Annotated,
    DroppedSameAs,
    /// Listed in the warnings; passed through as a role assertion when the
    /// object is an IRI.
    Warned,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Warning {
    /// Position of the triple in the input graph.
    pub index: usize,
    /// The triple with prefixed names.
    pub triple: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Normalized {
    #[serde(skip)]
    pub kb: KnowledgeBase,
    /// Parallel to the input triples.
    pub dispositions: Vec<Disposition>,
    pub warnings: Vec<Warning>,
}

impl Normalized {
    pub fn count(&self, d: Disposition) -> usize {
        self.dispositions.iter().filter(|&&x| x == d).count()
    }
}

/// Short names for IRIs: the local part, or `prefix_local` when two IRIs from
/// different namespaces share a local part. The default namespace keeps the
/// bare local name. IRIs outside the table get prefixes `ns1`, `ns2`, ...
struct Localizer {
    names: BTreeMap<String, String>,
}

impl Localizer {
    fn new<'a>(iris: impl IntoIterator<Item = &'a str>) -> Self {
        let mut unknown_ns: Vec<String> = Vec::new();
        let mut split: Vec<(String, String, String)> = Vec::new();
        let mut seen = BTreeSet::new();
        for iri in iris {
            if !seen.insert(iri.to_owned()) {
                continue;
            }
            let (prefix, local) = match compact(iri) {
                Some((p, l)) => (p.trim_end_matches(':').to_owned(), l.to_owned()),
                None => {
                    let cut = iri.rfind(['#', '/']).map_or(0, |i| i + 1);
                    let (ns, local) = iri.split_at(cut);
                    let k = match unknown_ns.iter().position(|n| n == ns) {
                        Some(k) => k,
                        None => {
                            unknown_ns.push(ns.to_owned());
                            unknown_ns.len() - 1
                        }
                    };
                    let local = if local.is_empty() { iri } else { local };
                    (format!("ns{}", k + 1), local.to_owned())
                }
            };
            split.push((iri.to_owned(), prefix, local));
        }
        let mut by_local: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        for (iri, _, local) in &split {
            by_local.entry(local).or_default().push(iri);
        }
        let default = DEFAULT_PREFIX.trim_end_matches(':');
        let mut names = BTreeMap::new();
        for (iri, prefix, local) in &split {
            let clash = by_local[local.as_str()].len() > 1;
            let name = if !clash || prefix == default { local.clone() } else { format!("{prefix}_{local}") };
            names.insert(iri.clone(), name);
        }
        Localizer { names }
    }

    fn get(&self, iri: &str) -> String {
        self.names.get(iri).cloned().unwrap_or_else(|| iri.to_owned())
    }
}

fn is(iri: &str, curie: &str) -> bool {
    expand(curie).is_some_and(|e| e == iri)
}

fn in_namespace(iri: &str, prefixes: &[&str]) -> bool {
    compact(iri).is_some_and(|(p, _)| prefixes.contains(&p))
}

const META: &[&str] = &["rdf:", "rdfs:", "owl:", "xsd:"];

/// Maps a machine-reading graph to a knowledge base.
///
/// * `rdf:type` gives concept assertions, `rdfs:subClassOf`,
///   `owl:equivalentClass` and `owl:disjointWith` give axioms.
/// * Predicates from `vn.role:`, `dul:`, the default namespace and
///   `boxing:involves` give role assertions, or data assertions for integer
///   literals.
/// * `boxing:hasTruthValue`, `boxing:hasModality` and `q:hasQuantifier` give
///   annotations. A false truth value also asserts [`FALSE_EVENT`] (and a
///   true one [`TRUE_EVENT`]), with `FalseEvent ⊑ ¬TrueEvent` in the TBox.
/// * Anything else with an IRI object is passed through as a role assertion
///   and warned about; literals that fit nowhere are warned about only.
pub fn normalize_fred(g: &Graph) -> Normalized {
    let kept = g.triples.iter().filter(|t| !is(&t.predicate, "owl:sameAs"));
    let iris = kept.flat_map(|t| {
        let obj = match &t.object {
            Object::Iri(o) => Some(o.as_str()),
            Object::Literal(_) => None,
        };
        [Some(t.subject.as_str()), Some(t.predicate.as_str()), obj].into_iter().flatten()
    });
    let loc = Localizer::new(iris);
    let mut kb = KnowledgeBase::new();
    let mut dispositions = Vec::with_capacity(g.len());
    let mut warnings = Vec::new();
    let mut values: BTreeMap<(String, String), i64> = BTreeMap::new();
    let mut truth_marker = false;
    for (index, t) in g.triples.iter().enumerate() {
        let mut warn = |reason: String| {
            warnings.push(Warning { index, triple: compact_triple(t), reason });
            Disposition::Warned
        };
        let s = loc.get(&t.subject);
        let p = &t.predicate;
        let d = match &t.object {
            _ if is(p, "owl:sameAs") => Disposition::DroppedSameAs,
            Object::Iri(o) if is(p, "rdf:type") => {
                if in_namespace(o, META) {
                    warn("schema declaration ignored".to_owned())
                } else {
                    kb.abox.push(Assertion::concept(s, ConceptExpr::atom(loc.get(o))));
                    Disposition::Mapped
                }
            }
            Object::Iri(o) if is(p, "rdfs:subClassOf") || is(p, "owl:equivalentClass") || is(p, "owl:disjointWith") => {
                let (a, b) = (ConceptExpr::atom(s), ConceptExpr::atom(loc.get(o)));
                kb.tbox.push(if is(p, "rdfs:subClassOf") {
                    Axiom::gci(a, b)
                } else if is(p, "owl:equivalentClass") {
                    Axiom::equiv(a, b)
                } else {
                    Axiom::disjoint(a, b)
                });
                Disposition::Mapped
            }
            o if is(p, "boxing:hasTruthValue") || is(p, "boxing:hasModality") || is(p, "q:hasQuantifier") => {
                let value = match o {
                    Object::Iri(o) => loc.get(o),
                    Object::Literal(l) => l.clone(),
                }
                .to_ascii_lowercase();
                let key = if is(p, "boxing:hasTruthValue") {
                    AnnotationKey::TruthValue
                } else if is(p, "boxing:hasModality") {
                    AnnotationKey::Modality
                } else {
                    AnnotationKey::Quantifier
                };
                if key == AnnotationKey::TruthValue {
                    let marker = match value.as_str() {
                        "false" => Some(FALSE_EVENT),
                        "true" => Some(TRUE_EVENT),
                        _ => None,
                    };
                    if let Some(m) = marker {
                        kb.abox.push(Assertion::concept(s.clone(), ConceptExpr::atom(m)));
                        truth_marker = true;
                    }
                }
                kb.annotations.push(Annotation { individual: s, key, value });
                Disposition::Annotated
            }
            Object::Literal(l) => match l.trim().parse::<i64>() {
                Ok(v) => {
                    let attr = loc.get(p);
                    match values.insert((s.clone(), attr.clone()), v) {
                        Some(old) if old != v => {
                            values.insert((s, attr), old);
                            warn(format!("conflicting value {v} for an attribute already set to {old}"))
                        }
                        Some(_) => Disposition::Mapped,
                        None => {
                            kb.abox.push(Assertion::data(attr, s, v));
                            Disposition::Mapped
                        }
                    }
                }
                Err(_) => warn("literal object has no logical reading".to_owned()),
            },
            Object::Iri(o) => {
                kb.abox.push(Assertion::role(loc.get(p), s, loc.get(o)));
                let known = in_namespace(p, &["vn.role:", "dul:", DEFAULT_PREFIX]) || is(p, "boxing:involves");
                if known {
                    Disposition::Mapped
                } else {
                    warn("unknown vocabulary, passed through as a role assertion".to_owned())
                }
            }
        };
        dispositions.push(d);
    }
    if truth_marker {
        kb.tbox.push(Axiom::gci(ConceptExpr::atom(FALSE_EVENT), ConceptExpr::not(ConceptExpr::atom(TRUE_EVENT))));
    }
    dedup(&mut kb);
    kb.declare_used_roles();
    Normalized { kb, dispositions, warnings }
}

fn dedup(kb: &mut KnowledgeBase) {
    let mut seen = BTreeSet::new();
    kb.abox.retain(|a| seen.insert(format!("{:?}", a.kind)));
    let mut seen = BTreeSet::new();
    kb.tbox.retain(|a| seen.insert(format!("{:?}", a.kind)));
    let mut seen = BTreeSet::new();
    kb.annotations.retain(|a| seen.insert(a.clone()));
}

/// The triple as prefixed names, for messages.
pub fn compact_triple(t: &Triple) -> String {
    let c = |iri: &str| match compact(iri) {
        Some((p, l)) => format!("{p}{l}"),
        None => format!("<{iri}>"),
    };
    let o = match &t.object {
        Object::Iri(o) => c(o),
        Object::Literal(l) => format!("{l:?}"),
    };
    format!("{} {} {}", c(&t.subject), c(&t.predicate), o)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::ntriples::parse_ntriples;
    use crate::model::AssertionKind;

    fn triple(s: &str, p: &str, o: &str) -> String {
        let iri = |c: &str| format!("<{}>", expand(c).unwrap_or_else(|| c.to_owned()));
        let obj = if let Some(lit) = o.strip_prefix('"') { format!("\"{lit}") } else { iri(o) };
        format!("{} {} {obj} .\n", iri(s), iri(p))
    }

    fn graph(lines: &[(&str, &str, &str)]) -> Graph {
        let text: String = lines.iter().map(|(s, p, o)| triple(s, p, o)).collect();
        parse_ntriples(&text).unwrap()
    }

    #[test]
    fn prefixes_round_trip() {
        for (p, _) in PREFIXES {
            let iri = expand(&format!("{p}x")).unwrap();
            assert_eq!(compact(&iri), Some((*p, "x")));
        }
    }

    #[test]
    fn empty_graph_empty_kb() {
        let n = normalize_fred(&Graph::default());
        assert!(n.kb.is_empty());
        assert!(n.dispositions.is_empty());
    }

    #[test]
    fn same_as_is_dropped() {
        let g = graph(&[
            ("covid19.m:hand_dryers_1", "owl:sameAs", "covid19.m:coronavirus_1"),
            ("covid19.m:situation_1", "boxing:involves", "covid19.m:hand_dryers_1"),
        ]);
        let n = normalize_fred(&g);
        assert_eq!(n.dispositions, vec![Disposition::DroppedSameAs, Disposition::Mapped]);
        assert_eq!(n.kb.abox, vec![Assertion::role("involves", "situation_1", "hand_dryers_1")]);
    }

    #[test]
    fn truth_value_false_marks_the_event() {
        let g = graph(&[("covid19.m:recover_1", "boxing:hasTruthValue", "boxing:False")]);
        let n = normalize_fred(&g);
        assert_eq!(
            n.kb.annotations,
            vec![Annotation { individual: "recover_1".into(), key: AnnotationKey::TruthValue, value: "false".into() }]
        );
        assert_eq!(n.kb.abox, vec![Assertion::concept("recover_1", ConceptExpr::atom(FALSE_EVENT))]);
        assert_eq!(n.kb.tbox.len(), 1);
    }

    #[test]
    fn modality_and_quantifier() {
        let g = graph(&[
            ("covid19.m:take_1", "boxing:hasModality", "boxing:Necessary"),
            ("covid19.m:hand_dryers_1", "q:hasQuantifier", "q:multiple"),
        ]);
        let n = normalize_fred(&g);
        let got: Vec<(&str, AnnotationKey, &str)> =
            n.kb.annotations.iter().map(|a| (a.individual.as_str(), a.key, a.value.as_str())).collect();
        assert_eq!(
            got,
            vec![("take_1", AnnotationKey::Modality, "necessary"), ("hand_dryers_1", AnnotationKey::Quantifier, "multiple")]
        );
        assert!(n.kb.abox.is_empty());
    }

    #[test]
    fn classes_and_collisions() {
        let g = graph(&[
            ("covid19.m:coronavirus_1", "rdf:type", "covid19.m:Coronavirus"),
            ("covid19.m:Coronavirus", "rdfs:subClassOf", "dbpedia:Coronavirus"),
            ("covid19.m:Kill", "owl:equivalentClass", "vn.data:Kill_42030000"),
            ("covid19.m:Kill", "rdf:type", "owl:Class"),
        ]);
        let n = normalize_fred(&g);
        assert_eq!(n.kb.tbox[0], Axiom::gci(ConceptExpr::atom("Coronavirus"), ConceptExpr::atom("dbpedia_Coronavirus")));
        assert_eq!(n.kb.tbox[1], Axiom::equiv(ConceptExpr::atom("Kill"), ConceptExpr::atom("Kill_42030000")));
        assert_eq!(n.dispositions[3], Disposition::Warned);
        assert_eq!(n.warnings.len(), 1);
    }

    #[test]
    fn unknown_vocabulary_passes_through_with_warning() {
        let g = graph(&[
            ("covid19.m:kill_1", "http://example.org/other#pertains", "covid19.m:x"),
            ("covid19.m:kill_1", "rdfs:label", "\"kill\""),
            ("covid19.m:jon", "covid19.m:hasAge", "\"40\""),
        ]);
        let n = normalize_fred(&g);
        assert_eq!(n.dispositions, vec![Disposition::Warned, Disposition::Warned, Disposition::Mapped]);
        assert!(matches!(&n.kb.abox[0].kind, AssertionKind::Role { role, .. } if role == "pertains"));
        assert_eq!(n.kb.abox[1], Assertion::data("hasAge", "jon", 40));
        assert_eq!(n.warnings.iter().map(|w| w.index).collect::<Vec<_>>(), vec![0, 1]);
    }
}
