//! Knowledge-representation types: concept expressions, axioms, assertions,
//! role declarations and the knowledge base that holds them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

/// Integer comparison used by numeric facets such as `(> hasAge 65)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Comparator {
    Gt,
    Ge,
    Lt,
    Le,
}

impl Comparator {
    pub fn symbol(self) -> &'static str {
        match self {
            Comparator::Gt => ">",
            Comparator::Ge => ">=",
            Comparator::Lt => "<",
            Comparator::Le => "<=",
        }
    }

    pub fn from_symbol(s: &str) -> Option<Self> {
        match s {
            ">" => Some(Comparator::Gt),
            ">=" => Some(Comparator::Ge),
            "<" => Some(Comparator::Lt),
            "<=" => Some(Comparator::Le),
            _ => None,
        }
    }

    /// The comparator whose integer solution set is the complement of this one.
    pub fn complement(self) -> Self {
        match self {
            Comparator::Gt => Comparator::Le,
            Comparator::Le => Comparator::Gt,
            Comparator::Ge => Comparator::Lt,
            Comparator::Lt => Comparator::Ge,
        }
    }

    pub fn holds(self, value: i64, bound: i64) -> bool {
        match self {
            Comparator::Gt => value > bound,
            Comparator::Ge => value >= bound,
            Comparator::Lt => value < bound,
            Comparator::Le => value <= bound,
        }
    }
}

/// Numeric restriction on an integer-valued attribute.
///
/// Attributes are functional and total: every element carries exactly one
/// integer per attribute, so `¬(> a n)` and `(<= a n)` denote the same set.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Facet {
    pub attribute: String,
    pub comparator: Comparator,
    pub value: i64,
}

impl Facet {
    pub fn new(attribute: impl Into<String>, comparator: Comparator, value: i64) -> Self {
        Facet { attribute: attribute.into(), comparator, value }
    }

    /// Inclusive integer interval `[lo, hi]` satisfying the facet; `None` is unbounded.
    pub fn interval(&self) -> (Option<i64>, Option<i64>) {
        let n = self.value;
        match self.comparator {
            Comparator::Gt => (Some(n.saturating_add(1)), None),
            Comparator::Ge => (Some(n), None),
            Comparator::Lt => (None, Some(n.saturating_sub(1))),
            Comparator::Le => (None, Some(n)),
        }
    }

    pub fn admits(&self, value: i64) -> bool {
        self.comparator.holds(value, self.value)
    }
}

/// Replaces a facet by its integer complement: `¬(> n)` becomes `(<= n)` and so on.
pub fn negate_facet(f: &Facet) -> Facet {
    Facet { attribute: f.attribute.clone(), comparator: f.comparator.complement(), value: f.value }
}

/// Concept description.
///
/// `And`/`Or` hold at least two operands and keep their order; `OneOf` holds at
/// least one individual name.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ConceptExpr {
    Atom(String),
    Top,
    Bottom,
    Not(Box<ConceptExpr>),
    And(Vec<ConceptExpr>),
    Or(Vec<ConceptExpr>),
    Exists(String, Box<ConceptExpr>),
    ForAll(String, Box<ConceptExpr>),
    OneOf(Vec<String>),
    Facet(Facet),
}

impl ConceptExpr {
    pub fn atom(name: impl Into<String>) -> Self {
        ConceptExpr::Atom(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(c: ConceptExpr) -> Self {
        ConceptExpr::Not(Box::new(c))
    }

    pub fn exists(role: impl Into<String>, c: ConceptExpr) -> Self {
        ConceptExpr::Exists(role.into(), Box::new(c))
    }

    pub fn forall(role: impl Into<String>, c: ConceptExpr) -> Self {
        ConceptExpr::ForAll(role.into(), Box::new(c))
    }

    pub fn one_of<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        ConceptExpr::OneOf(names.into_iter().map(Into::into).collect())
    }

    pub fn facet(attribute: impl Into<String>, comparator: Comparator, value: i64) -> Self {
        ConceptExpr::Facet(Facet::new(attribute, comparator, value))
    }

    /// Conjunction that collapses degenerate operand lists: no operand gives
    /// `Top`, one operand gives the operand itself.
    pub fn and(mut items: Vec<ConceptExpr>) -> Self {
        match items.len() {
            0 => ConceptExpr::Top,
            1 => items.pop().unwrap(),
            _ => ConceptExpr::And(items),
        }
    }

    /// Disjunction; no operand gives `Bottom`, one gives the operand itself.
    pub fn or(mut items: Vec<ConceptExpr>) -> Self {
        match items.len() {
            0 => ConceptExpr::Bottom,
            1 => items.pop().unwrap(),
            _ => ConceptExpr::Or(items),
        }
    }

    pub fn is_atom(&self) -> bool {
        matches!(self, ConceptExpr::Atom(_))
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            ConceptExpr::Atom(a) => Some(a),
            _ => None,
        }
    }

    /// Negation normal form.
    pub fn nnf(&self) -> ConceptExpr {
        nnf(self)
    }

    pub fn concept_names(&self, out: &mut BTreeSet<String>) {
        self.walk(&mut |c| {
            if let ConceptExpr::Atom(a) = c {
                out.insert(a.clone());
            }
        });
    }

    pub fn role_names(&self, out: &mut BTreeSet<String>) {
        self.walk(&mut |c| match c {
            ConceptExpr::Exists(r, _) | ConceptExpr::ForAll(r, _) => {
                out.insert(r.clone());
            }
            _ => {}
        });
    }

    pub fn individual_names(&self, out: &mut BTreeSet<String>) {
        self.walk(&mut |c| {
            if let ConceptExpr::OneOf(names) = c {
                out.extend(names.iter().cloned());
            }
        });
    }

    pub fn attribute_names(&self, out: &mut BTreeSet<String>) {
        self.walk(&mut |c| {
            if let ConceptExpr::Facet(f) = c {
                out.insert(f.attribute.clone());
            }
        });
    }

    /// Pre-order traversal over every sub-expression, including `self`.
    pub fn walk(&self, f: &mut impl FnMut(&ConceptExpr)) {
        f(self);
        match self {
            ConceptExpr::Not(c) | ConceptExpr::Exists(_, c) | ConceptExpr::ForAll(_, c) => c.walk(f),
            ConceptExpr::And(cs) | ConceptExpr::Or(cs) => cs.iter().for_each(|c| c.walk(f)),
            ConceptExpr::Atom(_)
            | ConceptExpr::Top
            | ConceptExpr::Bottom
            | ConceptExpr::OneOf(_)
            | ConceptExpr::Facet(_) => {}
        }
    }

    /// Nesting depth of `∃`/`∀` restrictions.
    pub fn quantifier_depth(&self) -> usize {
        match self {
            ConceptExpr::Exists(_, c) | ConceptExpr::ForAll(_, c) => 1 + c.quantifier_depth(),
            ConceptExpr::Not(c) => c.quantifier_depth(),
            ConceptExpr::And(cs) | ConceptExpr::Or(cs) => {
                cs.iter().map(ConceptExpr::quantifier_depth).max().unwrap_or(0)
            }
            _ => 0,
        }
    }
}

impl fmt::Display for ConceptExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::krss::concept_to_string(self))
    }
}

/// Negation normal form: `Not` ends up directly above `Atom` or `OneOf` only.
///
/// Negated facets are replaced by their integer complement (see [`negate_facet`]),
/// and `¬⊤`/`¬⊥` fold to `⊥`/`⊤`.
pub fn nnf(c: &ConceptExpr) -> ConceptExpr {
    use ConceptExpr::*;
    match c {
        Atom(_) | Top | Bottom | OneOf(_) | Facet(_) => c.clone(),
        And(cs) => And(cs.iter().map(nnf).collect()),
        Or(cs) => Or(cs.iter().map(nnf).collect()),
        Exists(r, d) => Exists(r.clone(), Box::new(nnf(d))),
        ForAll(r, d) => ForAll(r.clone(), Box::new(nnf(d))),
        Not(inner) => negated_nnf(inner),
    }
}

/// `nnf(Not(c))` without building the intermediate node.
fn negated_nnf(c: &ConceptExpr) -> ConceptExpr {
    use ConceptExpr::*;
    match c {
        Atom(_) | OneOf(_) => Not(Box::new(c.clone())),
        Top => Bottom,
        Bottom => Top,
        Facet(f) => Facet(negate_facet(f)),
        Not(d) => nnf(d),
        And(cs) => Or(cs.iter().map(negated_nnf).collect()),
        Or(cs) => And(cs.iter().map(negated_nnf).collect()),
        Exists(r, d) => ForAll(r.clone(), Box::new(negated_nnf(d))),
        ForAll(r, d) => Exists(r.clone(), Box::new(negated_nnf(d))),
    }
}

/// Where a statement came from.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case", tag = "tag")]
pub enum Source {
    Myth,
    Fact,
    #[default]
    Background,
    Inferred(Derivation),
}

impl Source {
    pub fn label(&self) -> String {
        match self {
            Source::Myth => "myth".to_owned(),
            Source::Fact => "fact".to_owned(),
            Source::Background => "background".to_owned(),
            Source::Inferred(d) => format!("inferred by rule {}", d.rule),
        }
    }

    pub fn is_inferred(&self) -> bool {
        matches!(self, Source::Inferred(_))
    }
}

/// Rule firing that produced an inferred assertion.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Derivation {
    pub rule: String,
    /// Variable bindings of the firing, ordered by variable name.
    pub bindings: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AxiomKind {
    Gci { sub: ConceptExpr, sup: ConceptExpr },
    Equiv { left: ConceptExpr, right: ConceptExpr },
    Disjoint { left: ConceptExpr, right: ConceptExpr },
}

impl AxiomKind {
    /// Equivalent list of inclusions: `Equiv(A,B)` gives `A ⊑ B, B ⊑ A`,
    /// `Disjoint(A,B)` gives `A ⊑ ¬B`.
    pub fn to_gcis(&self) -> Vec<(ConceptExpr, ConceptExpr)> {
        match self {
            AxiomKind::Gci { sub, sup } => vec![(sub.clone(), sup.clone())],
            AxiomKind::Equiv { left, right } => {
                vec![(left.clone(), right.clone()), (right.clone(), left.clone())]
            }
            AxiomKind::Disjoint { left, right } => {
                vec![(left.clone(), ConceptExpr::not(right.clone()))]
            }
        }
    }

    pub fn concepts(&self) -> [&ConceptExpr; 2] {
        match self {
            AxiomKind::Gci { sub, sup } => [sub, sup],
            AxiomKind::Equiv { left, right } | AxiomKind::Disjoint { left, right } => [left, right],
        }
    }
}

/// Terminological axiom with its provenance.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Axiom {
    pub kind: AxiomKind,
    pub source: Source,
}

impl Axiom {
    pub fn gci(sub: ConceptExpr, sup: ConceptExpr) -> Self {
        Axiom { kind: AxiomKind::Gci { sub, sup }, source: Source::default() }
    }

    pub fn equiv(left: ConceptExpr, right: ConceptExpr) -> Self {
        Axiom { kind: AxiomKind::Equiv { left, right }, source: Source::default() }
    }

    pub fn disjoint(left: ConceptExpr, right: ConceptExpr) -> Self {
        Axiom { kind: AxiomKind::Disjoint { left, right }, source: Source::default() }
    }

    pub fn with_source(mut self, source: Source) -> Self {
        self.source = source;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AssertionKind {
    Concept { individual: String, concept: ConceptExpr },
    Role { role: String, subject: String, object: String },
    Data { attribute: String, individual: String, value: i64 },
}

impl AssertionKind {
    pub fn individuals(&self) -> Vec<&str> {
        match self {
            AssertionKind::Concept { individual, .. } | AssertionKind::Data { individual, .. } => {
                vec![individual]
            }
            AssertionKind::Role { subject, object, .. } => vec![subject, object],
        }
    }
}

/// ABox statement with its provenance.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Assertion {
    pub kind: AssertionKind,
    pub source: Source,
}

impl Assertion {
    pub fn concept(individual: impl Into<String>, concept: ConceptExpr) -> Self {
        Assertion {
            kind: AssertionKind::Concept { individual: individual.into(), concept },
            source: Source::default(),
        }
    }

    pub fn role(role: impl Into<String>, subject: impl Into<String>, object: impl Into<String>) -> Self {
        Assertion {
            kind: AssertionKind::Role {
                role: role.into(),
                subject: subject.into(),
                object: object.into(),
            },
            source: Source::default(),
        }
    }

    pub fn data(attribute: impl Into<String>, individual: impl Into<String>, value: i64) -> Self {
        Assertion {
            kind: AssertionKind::Data {
                attribute: attribute.into(),
                individual: individual.into(),
                value,
            },
            source: Source::default(),
        }
    }

    pub fn with_source(mut self, source: Source) -> Self {
        self.source = source;
        self
    }
}

/// Role declaration. `explicit` is false for roles declared implicitly by use.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RoleDecl {
    pub name: String,
    pub parents: BTreeSet<String>,
    pub inverse_of: Option<String>,
    pub explicit: bool,
}

impl RoleDecl {
    pub fn new(name: impl Into<String>) -> Self {
        RoleDecl { name: name.into(), parents: BTreeSet::new(), inverse_of: None, explicit: true }
    }

    pub fn with_parent(mut self, parent: impl Into<String>) -> Self {
        self.parents.insert(parent.into());
        self
    }

    pub fn with_inverse(mut self, inverse: impl Into<String>) -> Self {
        self.inverse_of = Some(inverse.into());
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AnnotationKey {
    Modality,
    TruthValue,
    Quantifier,
}

impl AnnotationKey {
    pub fn as_str(self) -> &'static str {
        match self {
            AnnotationKey::Modality => "modality",
            AnnotationKey::TruthValue => "truth-value",
            AnnotationKey::Quantifier => "quantifier",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "modality" => Some(AnnotationKey::Modality),
            "truth-value" => Some(AnnotationKey::TruthValue),
            "quantifier" => Some(AnnotationKey::Quantifier),
            _ => None,
        }
    }
}

/// Non-logical metadata attached to an individual.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Annotation {
    pub individual: String,
    pub key: AnnotationKey,
    pub value: String,
}

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("role {role} is declared inverse of both {first} and {second}")]
    InverseConflict { role: String, first: String, second: String },
    #[error("cyclic role hierarchy through {0}")]
    CyclicRoles(String),
}

/// TBox, ABox, RBox and annotations.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct KnowledgeBase {
    pub tbox: Vec<Axiom>,
    pub abox: Vec<Assertion>,
    pub rbox: Vec<RoleDecl>,
    pub annotations: Vec<Annotation>,
}

impl KnowledgeBase {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.tbox.is_empty() && self.abox.is_empty() && self.rbox.is_empty() && self.annotations.is_empty()
    }

    pub fn with_axiom(mut self, axiom: Axiom) -> Self {
        self.tbox.push(axiom);
        self
    }

    pub fn with_assertion(mut self, assertion: Assertion) -> Self {
        self.abox.push(assertion);
        self
    }

    pub fn with_role(mut self, decl: RoleDecl) -> Self {
        self.rbox.push(decl);
        self
    }

    pub fn role(&self, name: &str) -> Option<&RoleDecl> {
        self.rbox.iter().find(|r| r.name == name)
    }

    /// Named concepts of the signature, sorted.
    pub fn concept_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for ax in &self.tbox {
            for c in ax.kind.concepts() {
                c.concept_names(&mut out);
            }
        }
        for a in &self.abox {
            if let AssertionKind::Concept { concept, .. } = &a.kind {
                concept.concept_names(&mut out);
            }
        }
        out
    }

    /// Individuals in order of first appearance in the ABox.
    pub fn individuals(&self) -> Vec<String> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for a in &self.abox {
            for i in a.kind.individuals() {
                if seen.insert(i.to_owned()) {
                    out.push(i.to_owned());
                }
            }
        }
        out
    }

    pub fn role_names_used(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for ax in &self.tbox {
            for c in ax.kind.concepts() {
                c.role_names(&mut out);
            }
        }
        for a in &self.abox {
            match &a.kind {
                AssertionKind::Concept { concept, .. } => concept.role_names(&mut out),
                AssertionKind::Role { role, .. } => {
                    out.insert(role.clone());
                }
                AssertionKind::Data { .. } => {}
            }
        }
        out
    }

    /// Adds an implicit declaration for every role that is used but not declared.
    pub fn declare_used_roles(&mut self) {
        let mut used = self.role_names_used();
        for d in &self.rbox {
            used.extend(d.parents.iter().cloned());
            used.extend(d.inverse_of.iter().cloned());
        }
        for name in used {
            if self.role(&name).is_none() {
                self.rbox.push(RoleDecl { explicit: false, ..RoleDecl::new(name) });
            }
        }
    }

    /// Completes inverse declarations symmetrically and checks the role
    /// hierarchy for cycles.
    pub fn close_roles(&mut self) -> Result<(), ModelError> {
        self.declare_used_roles();
        let pairs: Vec<(String, String)> = self
            .rbox
            .iter()
            .filter_map(|d| d.inverse_of.clone().map(|inv| (d.name.clone(), inv)))
            .collect();
        for (name, inv) in pairs {
            let other = self.rbox.iter_mut().find(|d| d.name == inv).expect("declared above");
            match &other.inverse_of {
                None => other.inverse_of = Some(name),
                Some(existing) if *existing == name => {}
                Some(existing) => {
                    return Err(ModelError::InverseConflict {
                        role: inv.clone(),
                        first: existing.clone(),
                        second: name,
                    })
                }
            }
        }
        self.check_role_cycles()
    }

    fn check_role_cycles(&self) -> Result<(), ModelError> {
        let parents: BTreeMap<&str, &BTreeSet<String>> =
            self.rbox.iter().map(|d| (d.name.as_str(), &d.parents)).collect();
        // 0 = unvisited, 1 = on stack, 2 = done
        let mut state: BTreeMap<&str, u8> = BTreeMap::new();
        fn visit<'a>(
            r: &'a str,
            parents: &BTreeMap<&'a str, &'a BTreeSet<String>>,
            state: &mut BTreeMap<&'a str, u8>,
        ) -> Result<(), ModelError> {
            match state.get(r) {
                Some(1) => return Err(ModelError::CyclicRoles(r.to_owned())),
                Some(2) => return Ok(()),
                _ => {}
            }
            state.insert(r, 1);
            if let Some(ps) = parents.get(r) {
                for p in ps.iter() {
                    visit(p.as_str(), parents, state)?;
                }
            }
            state.insert(r, 2);
            Ok(())
        }
        for d in &self.rbox {
            visit(&d.name, &parents, &mut state)?;
        }
        Ok(())
    }

    /// Sets the provenance of every non-inferred statement.
    pub fn retag(&mut self, source: Source) {
        for ax in &mut self.tbox {
            if !ax.source.is_inferred() {
                ax.source = source.clone();
            }
        }
        for a in &mut self.abox {
            if !a.source.is_inferred() {
                a.source = source.clone();
            }
        }
    }

    /// Renames every individual `i` to `{prefix}{i}`, nominals included.
    pub fn prefix_individuals(&mut self, prefix: &str) {
        let p = |s: &mut String| *s = format!("{prefix}{s}");
        fn rename_concept(c: &mut ConceptExpr, prefix: &str) {
            match c {
                ConceptExpr::OneOf(names) => {
                    for n in names {
                        *n = format!("{prefix}{n}");
                    }
                }
                ConceptExpr::Not(d) | ConceptExpr::Exists(_, d) | ConceptExpr::ForAll(_, d) => {
                    rename_concept(d, prefix)
                }
                ConceptExpr::And(cs) | ConceptExpr::Or(cs) => {
                    cs.iter_mut().for_each(|d| rename_concept(d, prefix))
                }
                _ => {}
            }
        }
        for ax in &mut self.tbox {
            match &mut ax.kind {
                AxiomKind::Gci { sub: a, sup: b }
                | AxiomKind::Equiv { left: a, right: b }
                | AxiomKind::Disjoint { left: a, right: b } => {
                    rename_concept(a, prefix);
                    rename_concept(b, prefix);
                }
            }
        }
        for a in &mut self.abox {
            match &mut a.kind {
                AssertionKind::Concept { individual, concept } => {
                    p(individual);
                    rename_concept(concept, prefix);
                }
                AssertionKind::Role { subject, object, .. } => {
                    p(subject);
                    p(object);
                }
                AssertionKind::Data { individual, .. } => p(individual),
            }
        }
        for ann in &mut self.annotations {
            p(&mut ann.individual);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(n: &str) -> ConceptExpr {
        ConceptExpr::atom(n)
    }

    #[test]
    fn nnf_de_morgan() {
        let c = ConceptExpr::not(ConceptExpr::And(vec![a("A"), a("B")]));
        assert_eq!(
            nnf(&c),
            ConceptExpr::Or(vec![ConceptExpr::not(a("A")), ConceptExpr::not(a("B"))])
        );
    }

    #[test]
    fn nnf_pushes_negation_through_exists() {
        let c = ConceptExpr::not(ConceptExpr::exists("travel", a("MobileNetworks")));
        assert_eq!(nnf(&c), ConceptExpr::forall("travel", ConceptExpr::not(a("MobileNetworks"))));
    }

    #[test]
    fn nnf_identity_on_atom() {
        assert_eq!(nnf(&a("Virus")), a("Virus"));
    }

    #[test]
    fn nnf_folds_facets_and_constants() {
        let c = ConceptExpr::not(ConceptExpr::facet("hasAge", Comparator::Gt, 65));
        assert_eq!(nnf(&c), ConceptExpr::facet("hasAge", Comparator::Le, 65));
        assert_eq!(nnf(&ConceptExpr::not(ConceptExpr::Top)), ConceptExpr::Bottom);
        assert_eq!(nnf(&ConceptExpr::not(ConceptExpr::not(a("A")))), a("A"));
    }

    #[test]
    fn facet_negation_examples() {
        let f = Facet::new("hasAge", Comparator::Gt, 65);
        assert_eq!(negate_facet(&f), Facet::new("hasAge", Comparator::Le, 65));
        let g = Facet::new("hasAge", Comparator::Le, 65);
        assert_eq!(negate_facet(&g), Facet::new("hasAge", Comparator::Gt, 65));
        for c in [Comparator::Gt, Comparator::Ge, Comparator::Lt, Comparator::Le] {
            let f = Facet::new("x", c, 3);
            assert_eq!(negate_facet(&negate_facet(&f)), f);
            for v in -2..8 {
                assert_ne!(f.admits(v), negate_facet(&f).admits(v));
            }
        }
    }

    #[test]
    fn close_roles_completes_inverses() {
        let mut kb = KnowledgeBase::new().with_role(RoleDecl::new("affects").with_inverse("affectedBy"));
        kb.close_roles().unwrap();
        assert_eq!(kb.role("affectedBy").unwrap().inverse_of.as_deref(), Some("affects"));
        assert!(!kb.role("affectedBy").unwrap().explicit);
    }

    #[test]
    fn close_roles_rejects_conflicts_and_cycles() {
        let mut kb = KnowledgeBase::new()
            .with_role(RoleDecl::new("r").with_inverse("s"))
            .with_role(RoleDecl::new("t").with_inverse("s"));
        assert!(matches!(kb.close_roles(), Err(ModelError::InverseConflict { .. })));

        let mut kb = KnowledgeBase::new()
            .with_role(RoleDecl::new("r").with_parent("s"))
            .with_role(RoleDecl::new("s").with_parent("r"));
        assert!(matches!(kb.close_roles(), Err(ModelError::CyclicRoles(_))));
    }

    #[test]
    fn equiv_and_disjoint_expand_to_gcis() {
        let eq = AxiomKind::Equiv { left: a("A"), right: a("B") };
        assert_eq!(eq.to_gcis(), vec![(a("A"), a("B")), (a("B"), a("A"))]);
        let dj = AxiomKind::Disjoint { left: a("Virus"), right: a("Bacteria") };
        assert_eq!(dj.to_gcis(), vec![(a("Virus"), ConceptExpr::not(a("Bacteria")))]);
    }
}
