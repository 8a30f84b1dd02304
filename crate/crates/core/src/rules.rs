//! Forward chaining of Horn rules over the ABox.
//!
//! Matching is syntactic: a body atom `(?y Elderly)` matches only asserted or
//! previously inferred `INSTANCE` statements whose concept is exactly the
//! atom `Elderly`. Nothing entailed by the TBox is visible to rules.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::model::{Assertion, AssertionKind, ConceptExpr, Derivation, KnowledgeBase, Source};

/// Default cap on the number of assertions a single `apply_rules` call may infer.
pub const DEFAULT_INFERENCE_CAP: usize = 10_000;

/// Variable (`?x`) or individual constant.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Term {
    Var(String),
    Ind(String),
}

impl Term {
    /// `?x` parses to a variable, anything else to an individual.
    pub fn parse(s: &str) -> Term {
        match s.strip_prefix('?') {
            Some(v) => Term::Var(v.to_owned()),
            None => Term::Ind(s.to_owned()),
        }
    }

    pub fn var(&self) -> Option<&str> {
        match self {
            Term::Var(v) => Some(v),
            Term::Ind(_) => None,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "?{v}"),
            Term::Ind(i) => f.write_str(i),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RuleAtom {
    Concept { term: Term, concept: String },
    Role { role: String, subject: Term, object: Term },
}

impl RuleAtom {
    pub fn concept(term: Term, concept: impl Into<String>) -> Self {
        RuleAtom::Concept { term, concept: concept.into() }
    }

    pub fn role(role: impl Into<String>, subject: Term, object: Term) -> Self {
        RuleAtom::Role { role: role.into(), subject, object }
    }

    /// `(?x Only hasQuality)`: the subject has the reserved quality individual
    /// through the given role.
    pub fn quality(subject: Term, quality: impl Into<String>, role: impl Into<String>) -> Self {
        RuleAtom::Role { role: role.into(), subject, object: Term::Ind(quality.into()) }
    }

    fn vars(&self) -> Vec<&str> {
        match self {
            RuleAtom::Concept { term, .. } => term.var().into_iter().collect(),
            RuleAtom::Role { subject, object, .. } => {
                subject.var().into_iter().chain(object.var()).collect()
            }
        }
    }
}

impl fmt::Display for RuleAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleAtom::Concept { term, concept } => {
                write!(f, "({term} {})", crate::krss::quote_symbol(concept))
            }
            RuleAtom::Role { role, subject, object } => {
                write!(f, "({subject} {object} {})", crate::krss::quote_symbol(role))
            }
        }
    }
}

/// `body → head` with a concept-atom head.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rule {
    pub name: String,
    pub body: Vec<RuleAtom>,
    pub head: RuleAtom,
}

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum RuleError {
    #[error("rule {rule}: head variable ?{var} does not occur in the body")]
    UnboundVariable { rule: String, var: String },
    #[error("rule {rule}: head must be a concept atom")]
    RoleHead { rule: String },
    #[error("forward chaining exceeded the cap of {cap} inferred assertions")]
    ResourceLimit { cap: usize },
}

impl Rule {
    pub fn new(name: impl Into<String>, body: Vec<RuleAtom>, head: RuleAtom) -> Self {
        Rule { name: name.into(), body, head }
    }

    /// Checks the head shape and that every head variable is bound by the body.
    pub fn check_safe(&self) -> Result<(), RuleError> {
        if !matches!(self.head, RuleAtom::Concept { .. }) {
            return Err(RuleError::RoleHead { rule: self.name.clone() });
        }
        let bound: BTreeSet<&str> = self.body.iter().flat_map(RuleAtom::vars).collect();
        for v in self.head.vars() {
            if !bound.contains(v) {
                return Err(RuleError::UnboundVariable { rule: self.name.clone(), var: v.to_owned() });
            }
        }
        Ok(())
    }
}

type Bindings = BTreeMap<String, String>;

/// Indexed view of the atomic facts a rule body can match.
#[derive(Default)]
struct FactIndex {
    concept: HashSet<(String, String)>,
    by_concept: BTreeMap<String, Vec<String>>,
    role: HashSet<(String, String, String)>,
    by_role: BTreeMap<String, Vec<(String, String)>>,
}

impl FactIndex {
    fn from_abox(abox: &[Assertion]) -> Self {
        let mut idx = FactIndex::default();
        for a in abox {
            idx.add(&a.kind);
        }
        idx
    }

    /// Returns true if the fact was new.
    fn add(&mut self, kind: &AssertionKind) -> bool {
        match kind {
            AssertionKind::Concept { individual, concept: ConceptExpr::Atom(c) } => {
                let new = self.concept.insert((individual.clone(), c.clone()));
                if new {
                    self.by_concept.entry(c.clone()).or_default().push(individual.clone());
                }
                new
            }
            AssertionKind::Role { role, subject, object } => {
                let new = self.role.insert((role.clone(), subject.clone(), object.clone()));
                if new {
                    self.by_role.entry(role.clone()).or_default().push((subject.clone(), object.clone()));
                }
                new
            }
            _ => false,
        }
    }

    fn has_concept(&self, ind: &str, concept: &str) -> bool {
        self.concept.contains(&(ind.to_owned(), concept.to_owned()))
    }
}

fn resolve<'a>(t: &'a Term, b: &'a Bindings) -> Option<&'a str> {
    match t {
        Term::Ind(i) => Some(i),
        Term::Var(v) => b.get(v).map(String::as_str),
    }
}

fn bind(t: &Term, value: &str, b: &mut Bindings) -> bool {
    match t {
        Term::Ind(i) => i == value,
        Term::Var(v) => match b.get(v) {
            Some(existing) => existing == value,
            None => {
                b.insert(v.clone(), value.to_owned());
                true
            }
        },
    }
}

/// All bindings satisfying `body[from..]`, extending `b`, in deterministic order.
fn matches(body: &[RuleAtom], idx: &FactIndex, b: &Bindings, out: &mut Vec<Bindings>) {
    let Some((atom, rest)) = body.split_first() else {
        out.push(b.clone());
        return;
    };
    match atom {
        RuleAtom::Concept { term, concept } => {
            if let Some(ind) = resolve(term, b) {
                if idx.has_concept(ind, concept) {
                    matches(rest, idx, b, out);
                }
            } else if let Some(inds) = idx.by_concept.get(concept) {
                for ind in inds {
                    let mut nb = b.clone();
                    if bind(term, ind, &mut nb) {
                        matches(rest, idx, &nb, out);
                    }
                }
            }
        }
        RuleAtom::Role { role, subject, object } => {
            if let Some(pairs) = idx.by_role.get(role) {
                for (s, o) in pairs {
                    let mut nb = b.clone();
                    if bind(subject, s, &mut nb) && bind(object, o, &mut nb) {
                        matches(rest, idx, &nb, out);
                    }
                }
            }
        }
    }
}

/// Forward-chains `rules` over the ABox of `kb` to a fixpoint with the default cap.
pub fn apply_rules(kb: &KnowledgeBase, rules: &[Rule]) -> Result<KnowledgeBase, RuleError> {
    apply_rules_capped(kb, rules, DEFAULT_INFERENCE_CAP)
}

/// Forward chaining with an explicit cap on inferred assertions.
///
/// Inferred assertions are appended to the ABox in derivation order and tagged
/// [`Source::Inferred`] with the rule name and the bindings of the firing.
pub fn apply_rules_capped(kb: &KnowledgeBase, rules: &[Rule], cap: usize) -> Result<KnowledgeBase, RuleError> {
    for r in rules {
        r.check_safe()?;
    }
    let mut out = kb.clone();
    if rules.is_empty() {
        return Ok(out);
    }
    let mut idx = FactIndex::from_abox(&out.abox);
    let mut inferred = 0usize;
    loop {
        let mut changed = false;
        for rule in rules {
            let mut found = Vec::new();
            matches(&rule.body, &idx, &Bindings::new(), &mut found);
            let RuleAtom::Concept { term, concept } = &rule.head else { unreachable!("checked safe") };
            for b in found {
                let ind = resolve(term, &b).expect("safe rule binds head").to_owned();
                let kind = AssertionKind::Concept { individual: ind, concept: ConceptExpr::atom(concept.clone()) };
                if idx.add(&kind) {
                    if inferred == cap {
                        return Err(RuleError::ResourceLimit { cap });
                    }
                    inferred += 1;
                    changed = true;
                    let derivation = Derivation { rule: rule.name.clone(), bindings: b.into_iter().collect() };
                    out.abox.push(Assertion { kind, source: Source::Inferred(derivation) });
                }
            }
        }
        if !changed {
            return Ok(out);
        }
    }
}
