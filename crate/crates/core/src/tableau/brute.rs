//! Finite-model search that evaluates the set semantics directly.
//!
//! The search assigns concept memberships, role edges and attribute values
//! element by element and evaluates every constraint in three-valued (Kleene)
//! logic after each assignment, backtracking as soon as one is definitely
//! false. It is meant as an independent oracle for the tableau, so it shares
//! no code with it beyond the knowledge-base types.

use std::collections::{BTreeMap, BTreeSet};

use crate::model::{nnf, AssertionKind, ConceptExpr, KnowledgeBase};

/// Upper bound on search nodes visited per call before giving up with `Unknown`.
pub const SEARCH_BUDGET: u64 = 2_000_000;

/// A finite interpretation: domain, extensions, individual and attribute maps.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Interpretation {
    pub domain: BTreeSet<usize>,
    pub concept_ext: BTreeMap<String, BTreeSet<usize>>,
    pub role_ext: BTreeMap<String, BTreeSet<(usize, usize)>>,
    pub ind_map: BTreeMap<String, usize>,
    pub attr_val: BTreeMap<(usize, String), i64>,
}

impl Interpretation {
    /// Two-valued evaluation of `c` at element `x`. A facet on an attribute
    /// with no value at `x` is false.
    pub fn satisfies(&self, x: usize, c: &ConceptExpr) -> bool {
        match c {
            ConceptExpr::Top => true,
            ConceptExpr::Bottom => false,
            ConceptExpr::Atom(a) => self.concept_ext.get(a).is_some_and(|s| s.contains(&x)),
            ConceptExpr::Not(d) => !self.satisfies(x, d),
            ConceptExpr::And(cs) => cs.iter().all(|d| self.satisfies(x, d)),
            ConceptExpr::Or(cs) => cs.iter().any(|d| self.satisfies(x, d)),
            ConceptExpr::Exists(r, d) => self.successors(r, x).any(|y| self.satisfies(y, d)),
            ConceptExpr::ForAll(r, d) => self.successors(r, x).all(|y| self.satisfies(y, d)),
            ConceptExpr::OneOf(ns) => ns.iter().any(|n| self.ind_map.get(n) == Some(&x)),
            ConceptExpr::Facet(f) => {
                self.attr_val.get(&(x, f.attribute.clone())).is_some_and(|&v| f.admits(v))
            }
        }
    }

    fn successors<'a>(&'a self, r: &str, x: usize) -> impl Iterator<Item = usize> + 'a {
        self.role_ext.get(r).into_iter().flatten().filter(move |&&(a, _)| a == x).map(|&(_, b)| b)
    }

    /// Elements of the domain satisfying `c`.
    pub fn extension(&self, c: &ConceptExpr) -> BTreeSet<usize> {
        self.domain.iter().copied().filter(|&x| self.satisfies(x, c)).collect()
    }

    /// Number of pairs in the extension of role `r`.
    pub fn edge_count(&self, r: &str) -> usize {
        self.role_ext.get(r).map_or(0, BTreeSet::len)
    }

    /// Checks every TBox axiom, ABox assertion and RBox declaration of `kb`.
    pub fn is_model_of(&self, kb: &KnowledgeBase) -> bool {
        if self.domain.is_empty() {
            return false;
        }
        for ax in &kb.tbox {
            for (sub, sup) in ax.kind.to_gcis() {
                if !self.extension(&sub).is_subset(&self.extension(&sup)) {
                    return false;
                }
            }
        }
        for a in &kb.abox {
            let ok = match &a.kind {
                AssertionKind::Concept { individual, concept } => {
                    self.ind_map.get(individual).is_some_and(|&x| self.satisfies(x, concept))
                }
                AssertionKind::Role { role, subject, object } => {
                    match (self.ind_map.get(subject), self.ind_map.get(object)) {
                        (Some(&x), Some(&y)) => self.role_ext.get(role).is_some_and(|s| s.contains(&(x, y))),
                        _ => false,
                    }
                }
                AssertionKind::Data { attribute, individual, value } => self
                    .ind_map
                    .get(individual)
                    .is_some_and(|&x| self.attr_val.get(&(x, attribute.clone())) == Some(value)),
            };
            if !ok {
                return false;
            }
        }
        let empty = BTreeSet::new();
        for d in &kb.rbox {
            let ext = self.role_ext.get(&d.name).unwrap_or(&empty);
            for p in &d.parents {
                let pext = self.role_ext.get(p).unwrap_or(&empty);
                if !ext.is_subset(pext) {
                    return false;
                }
            }
            if let Some(q) = &d.inverse_of {
                let qext = self.role_ext.get(q).unwrap_or(&empty);
                let flipped: BTreeSet<(usize, usize)> = qext.iter().map(|&(a, b)| (b, a)).collect();
                if *ext != flipped {
                    return false;
                }
            }
        }
        true
    }
}

/// Outcome of [`brute_force_consistent`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BruteForce {
    Model(Interpretation),
    /// No model exists at all: none was found up to a bound known to suffice.
    NoModel,
    Unknown,
}

impl BruteForce {
    pub fn answer(&self) -> Option<bool> {
        match self {
            BruteForce::Model(_) => Some(true),
            BruteForce::NoModel => Some(false),
            BruteForce::Unknown => None,
        }
    }

    pub fn model(&self) -> Option<&Interpretation> {
        match self {
            BruteForce::Model(m) => Some(m),
            _ => None,
        }
    }
}

/// Searches for a model with at most `max_domain` elements.
///
/// `NoModel` is returned only if no model was found and a small-model bound
/// holds: every TBox axiom, written as `nnf(¬C ⊔ D)`, is free of `∃`, and no
/// `∃` in an ABox concept assertion sits under a `∀`. Such a KB has a model
/// iff it has one whose domain holds only the individuals plus one witness
/// per `∃` occurrence in the ABox, since the remaining constraints survive
/// restriction to a sub-domain.
pub fn brute_force_consistent(kb: &KnowledgeBase, max_domain: usize) -> BruteForce {
    let mut kb = kb.clone();
    if kb.close_roles().is_err() {
        return BruteForce::Unknown;
    }
    let Some(problem) = Problem::new(&kb) else {
        return BruteForce::NoModel;
    };
    let mut budget = SEARCH_BUDGET;
    for n in 1..=max_domain.max(1) {
        let mut ind_map = vec![0usize; problem.individuals.len()];
        match problem.each_ind_map(n, 0, 0, &mut ind_map, &mut budget) {
            Search::Found(m) => return BruteForce::Model(m),
            Search::OutOfBudget => return BruteForce::Unknown,
            Search::Exhausted => {}
        }
    }
    match exhaustive_bound(&kb, problem.individuals.len()) {
        Some(bound) if bound <= max_domain => BruteForce::NoModel,
        _ => BruteForce::Unknown,
    }
}

fn exhaustive_bound(kb: &KnowledgeBase, individuals: usize) -> Option<usize> {
    for ax in &kb.tbox {
        for (sub, sup) in ax.kind.to_gcis() {
            let g = nnf(&ConceptExpr::Or(vec![ConceptExpr::not(sub), sup]));
            if count_exists(&g, false)? > 0 {
                return None;
            }
        }
    }
    let mut extra = 0;
    for a in &kb.abox {
        if let AssertionKind::Concept { concept, .. } = &a.kind {
            extra += count_exists(&nnf(concept), false)?;
        }
    }
    Some(individuals.max(1) + extra)
}

/// Counts `∃` occurrences; `None` if one occurs under a `∀`.
fn count_exists(c: &ConceptExpr, under_forall: bool) -> Option<usize> {
    let n = match c {
        ConceptExpr::Exists(_, d) => {
            if under_forall {
                return None;
            }
            1 + count_exists(d, false)?
        }
        ConceptExpr::ForAll(_, d) => count_exists(d, true)?,
        ConceptExpr::Not(d) => count_exists(d, under_forall)?,
        ConceptExpr::And(cs) | ConceptExpr::Or(cs) => {
            let mut n = 0;
            for d in cs {
                n += count_exists(d, under_forall)?;
            }
            n
        }
        _ => 0,
    };
    Some(n)
}

enum Search {
    Found(Interpretation),
    Exhausted,
    OutOfBudget,
}

#[derive(Debug, Clone, Copy)]
enum Var {
    Concept(usize, usize),
    Attr(usize, usize),
    Role(usize, usize, usize),
}

struct Problem {
    individuals: Vec<String>,
    concepts: Vec<String>,
    concept_index: BTreeMap<String, usize>,
    /// Role name → (variable class, transposed).
    role_class: BTreeMap<String, (usize, bool)>,
    classes: usize,
    attributes: Vec<String>,
    attr_index: BTreeMap<String, usize>,
    candidates: Vec<Vec<i64>>,
    universal: Vec<ConceptExpr>,
    concept_assertions: Vec<(usize, ConceptExpr)>,
    role_assertions: Vec<(String, usize, usize)>,
    data_assertions: Vec<(usize, usize, i64)>,
    parents: Vec<(String, String)>,
}

struct Assign {
    n: usize,
    ind_map: Vec<usize>,
    concept: Vec<Option<bool>>,
    role: Vec<Option<bool>>,
    attr: Vec<Option<i64>>,
}

fn and3(a: Option<bool>, b: Option<bool>) -> Option<bool> {
    match (a, b) {
        (Some(false), _) | (_, Some(false)) => Some(false),
        (Some(true), Some(true)) => Some(true),
        _ => None,
    }
}

fn or3(a: Option<bool>, b: Option<bool>) -> Option<bool> {
    match (a, b) {
        (Some(true), _) | (_, Some(true)) => Some(true),
        (Some(false), Some(false)) => Some(false),
        _ => None,
    }
}

impl Problem {
    /// `None` if the KB is trivially inconsistent (conflicting data values).
    fn new(kb: &KnowledgeBase) -> Option<Self> {
        let mut individuals = kb.individuals();
        let mut nominals = BTreeSet::new();
        for ax in &kb.tbox {
            for c in ax.kind.concepts() {
                c.individual_names(&mut nominals);
            }
        }
        for a in &kb.abox {
            if let AssertionKind::Concept { concept, .. } = &a.kind {
                concept.individual_names(&mut nominals);
            }
        }
        for n in nominals {
            if !individuals.contains(&n) {
                individuals.push(n);
            }
        }
        let ind_index: BTreeMap<String, usize> =
            individuals.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();

        let concepts: Vec<String> = kb.concept_names().into_iter().collect();
        let concept_index = concepts.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect();

        let mut role_class = BTreeMap::new();
        let mut classes = 0;
        for d in &kb.rbox {
            if role_class.contains_key(&d.name) {
                continue;
            }
            role_class.insert(d.name.clone(), (classes, false));
            if let Some(q) = &d.inverse_of {
                role_class.insert(q.clone(), (classes, true));
            }
            classes += 1;
        }

        let mut attrs = BTreeSet::new();
        let mut consts: BTreeMap<String, BTreeSet<i64>> = BTreeMap::new();
        let mut note = |c: &ConceptExpr| {
            c.walk(&mut |d| {
                if let ConceptExpr::Facet(f) = d {
                    attrs.insert(f.attribute.clone());
                    let e = consts.entry(f.attribute.clone()).or_default();
                    e.insert(f.value.saturating_sub(1));
                    e.insert(f.value);
                    e.insert(f.value.saturating_add(1));
                }
            })
        };
        for ax in &kb.tbox {
            for c in ax.kind.concepts() {
                note(c);
            }
        }
        let mut universal = Vec::new();
        let mut concept_assertions = Vec::new();
        let mut role_assertions = Vec::new();
        let mut data = Vec::new();
        for a in &kb.abox {
            match &a.kind {
                AssertionKind::Concept { individual, concept } => {
                    note(concept);
                    concept_assertions.push((ind_index[individual], nnf(concept)));
                }
                AssertionKind::Role { role, subject, object } => {
                    role_assertions.push((role.clone(), ind_index[subject], ind_index[object]));
                }
                AssertionKind::Data { attribute, individual, value } => {
                    data.push((attribute.clone(), ind_index[individual], *value));
                }
            }
        }
        for (attr, _, v) in &data {
            attrs.insert(attr.clone());
            consts.entry(attr.clone()).or_default().insert(*v);
        }
        let attributes: Vec<String> = attrs.into_iter().collect();
        let attr_index: BTreeMap<String, usize> =
            attributes.iter().enumerate().map(|(i, a)| (a.clone(), i)).collect();
        let candidates = attributes
            .iter()
            .map(|a| consts.get(a).map(|s| s.iter().copied().collect()).unwrap_or_else(|| vec![0]))
            .collect();
        let mut data_assertions = Vec::new();
        for (attr, i, v) in data {
            let ai = attr_index[&attr];
            if data_assertions.iter().any(|&(a, j, w)| a == ai && j == i && w != v) {
                return None;
            }
            data_assertions.push((ai, i, v));
        }

        for ax in &kb.tbox {
            for (sub, sup) in ax.kind.to_gcis() {
                universal.push(nnf(&ConceptExpr::Or(vec![ConceptExpr::not(sub), sup])));
            }
        }
        let parents = kb
            .rbox
            .iter()
            .flat_map(|d| d.parents.iter().map(move |p| (d.name.clone(), p.clone())))
            .collect();
        Some(Problem {
            individuals,
            concepts,
            concept_index,
            role_class,
            classes,
            attributes,
            attr_index,
            candidates,
            universal,
            concept_assertions,
            role_assertions,
            data_assertions,
            parents,
        })
    }

    /// Enumerates individual maps in restricted-growth order.
    fn each_ind_map(&self, n: usize, k: usize, used: usize, map: &mut Vec<usize>, budget: &mut u64) -> Search {
        if k == self.individuals.len() {
            return self.search_with(n, map.clone(), budget);
        }
        for e in 0..n.min(used + 1) {
            map[k] = e;
            match self.each_ind_map(n, k + 1, used.max(e + 1), map, budget) {
                Search::Exhausted => {}
                other => return other,
            }
        }
        Search::Exhausted
    }

    fn search_with(&self, n: usize, ind_map: Vec<usize>, budget: &mut u64) -> Search {
        let mut a = Assign {
            n,
            concept: vec![None; self.concepts.len() * n],
            role: vec![None; self.classes * n * n],
            attr: vec![None; self.attributes.len() * n],
            ind_map,
        };
        for (role, s, o) in &self.role_assertions {
            let (x, y) = (a.ind_map[*s], a.ind_map[*o]);
            let idx = self.role_slot(&a, role, x, y);
            a.role[idx] = Some(true);
        }
        for &(ai, i, v) in &self.data_assertions {
            let slot = ai * n + a.ind_map[i];
            match a.attr[slot] {
                Some(w) if w != v => return Search::Exhausted,
                _ => a.attr[slot] = Some(v),
            }
        }
        let mut vars = Vec::new();
        for x in 0..n {
            vars.extend((0..self.concepts.len()).map(|c| Var::Concept(c, x)));
            vars.extend((0..self.attributes.len()).map(|at| Var::Attr(at, x)));
            for y in 0..=x {
                for class in 0..self.classes {
                    vars.push(Var::Role(class, x, y));
                    if y != x {
                        vars.push(Var::Role(class, y, x));
                    }
                }
            }
        }
        if self.check(&a) == Some(false) {
            return Search::Exhausted;
        }
        self.dfs(&mut a, &vars, 0, budget)
    }

    fn dfs(&self, a: &mut Assign, vars: &[Var], k: usize, budget: &mut u64) -> Search {
        if *budget == 0 {
            return Search::OutOfBudget;
        }
        *budget -= 1;
        let Some(&var) = vars.get(k) else {
            return if self.check(a) == Some(true) { Search::Found(self.to_interpretation(a)) } else { Search::Exhausted };
        };
        let n = a.n;
        match var {
            Var::Concept(c, x) => {
                for v in [false, true] {
                    a.concept[c * n + x] = Some(v);
                    if let r @ (Search::Found(_) | Search::OutOfBudget) = self.step(a, vars, k, budget) {
                        return r;
                    }
                }
                a.concept[c * n + x] = None;
            }
            Var::Role(class, x, y) => {
                let slot = class * n * n + x * n + y;
                if a.role[slot].is_some() {
                    return self.dfs(a, vars, k + 1, budget);
                }
                for v in [false, true] {
                    a.role[slot] = Some(v);
                    if let r @ (Search::Found(_) | Search::OutOfBudget) = self.step(a, vars, k, budget) {
                        return r;
                    }
                }
                a.role[slot] = None;
            }
            Var::Attr(at, x) => {
                let slot = at * n + x;
                if a.attr[slot].is_some() {
                    return self.dfs(a, vars, k + 1, budget);
                }
                for &v in &self.candidates[at] {
                    a.attr[slot] = Some(v);
                    if let r @ (Search::Found(_) | Search::OutOfBudget) = self.step(a, vars, k, budget) {
                        return r;
                    }
                }
                a.attr[slot] = None;
            }
        }
        Search::Exhausted
    }

    fn step(&self, a: &mut Assign, vars: &[Var], k: usize, budget: &mut u64) -> Search {
        if self.check(a) == Some(false) {
            return Search::Exhausted;
        }
        self.dfs(a, vars, k + 1, budget)
    }

    fn role_slot(&self, a: &Assign, role: &str, x: usize, y: usize) -> usize {
        let (class, flipped) = self.role_class[role];
        let (x, y) = if flipped { (y, x) } else { (x, y) };
        class * a.n * a.n + x * a.n + y
    }

    fn rel(&self, a: &Assign, role: &str, x: usize, y: usize) -> Option<bool> {
        a.role[self.role_slot(a, role, x, y)]
    }

    /// Kleene value of the conjunction of all constraints.
    fn check(&self, a: &Assign) -> Option<bool> {
        let mut acc = Some(true);
        for g in &self.universal {
            for x in 0..a.n {
                acc = and3(acc, self.eval(a, g, x));
                if acc == Some(false) {
                    return acc;
                }
            }
        }
        for (i, c) in &self.concept_assertions {
            acc = and3(acc, self.eval(a, c, a.ind_map[*i]));
            if acc == Some(false) {
                return acc;
            }
        }
        for (s, p) in &self.parents {
            for x in 0..a.n {
                for y in 0..a.n {
                    let v = or3(self.rel(a, s, x, y).map(|b| !b), self.rel(a, p, x, y));
                    acc = and3(acc, v);
                    if acc == Some(false) {
                        return acc;
                    }
                }
            }
        }
        acc
    }

    fn eval(&self, a: &Assign, c: &ConceptExpr, x: usize) -> Option<bool> {
        match c {
            ConceptExpr::Top => Some(true),
            ConceptExpr::Bottom => Some(false),
            ConceptExpr::Atom(name) => a.concept[self.concept_index[name] * a.n + x],
            ConceptExpr::Not(d) => self.eval(a, d, x).map(|b| !b),
            ConceptExpr::And(cs) => {
                let mut acc = Some(true);
                for d in cs {
                    acc = and3(acc, self.eval(a, d, x));
                    if acc == Some(false) {
                        break;
                    }
                }
                acc
            }
            ConceptExpr::Or(cs) => {
                let mut acc = Some(false);
                for d in cs {
                    acc = or3(acc, self.eval(a, d, x));
                    if acc == Some(true) {
                        break;
                    }
                }
                acc
            }
            ConceptExpr::Exists(r, d) => {
                let mut acc = Some(false);
                for y in 0..a.n {
                    acc = or3(acc, and3(self.rel(a, r, x, y), self.eval(a, d, y)));
                    if acc == Some(true) {
                        break;
                    }
                }
                acc
            }
            ConceptExpr::ForAll(r, d) => {
                let mut acc = Some(true);
                for y in 0..a.n {
                    acc = and3(acc, or3(self.rel(a, r, x, y).map(|b| !b), self.eval(a, d, y)));
                    if acc == Some(false) {
                        break;
                    }
                }
                acc
            }
            ConceptExpr::OneOf(ns) => Some(
                ns.iter().any(|n| self.individuals.iter().position(|i| i == n).is_some_and(|k| a.ind_map[k] == x)),
            ),
            ConceptExpr::Facet(f) => a.attr[self.attr_index[&f.attribute] * a.n + x].map(|v| f.admits(v)),
        }
    }

    fn to_interpretation(&self, a: &Assign) -> Interpretation {
        let n = a.n;
        let mut m = Interpretation { domain: (0..n).collect(), ..Interpretation::default() };
        for (ci, c) in self.concepts.iter().enumerate() {
            let ext = (0..n).filter(|&x| a.concept[ci * n + x] == Some(true)).collect();
            m.concept_ext.insert(c.clone(), ext);
        }
        for role in self.role_class.keys() {
            let mut ext = BTreeSet::new();
            for x in 0..n {
                for y in 0..n {
                    if self.rel(a, role, x, y) == Some(true) {
                        ext.insert((x, y));
                    }
                }
            }
            m.role_ext.insert(role.clone(), ext);
        }
        for (k, ind) in self.individuals.iter().enumerate() {
            m.ind_map.insert(ind.clone(), a.ind_map[k]);
        }
        for (ai, attr) in self.attributes.iter().enumerate() {
            for x in 0..n {
                if let Some(v) = a.attr[ai * n + x] {
                    m.attr_val.insert((x, attr.clone()), v);
                }
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Assertion, Axiom};

    fn a(n: &str) -> ConceptExpr {
        ConceptExpr::atom(n)
    }

    #[test]
    fn empty_kb_has_a_one_element_model() {
        let r = brute_force_consistent(&KnowledgeBase::new(), 1);
        assert_eq!(r.model().unwrap().domain.len(), 1);
    }

    #[test]
    fn disjoint_membership_has_no_model() {
        let kb = KnowledgeBase::new()
            .with_axiom(Axiom::disjoint(a("Virus"), a("Bacteria")))
            .with_assertion(Assertion::concept("SARS-CoV-2", a("Virus")))
            .with_assertion(Assertion::concept("SARS-CoV-2", a("Bacteria")));
        assert_eq!(brute_force_consistent(&kb, 3), BruteForce::NoModel);
    }

    #[test]
    fn existential_tbox_failure_is_unknown() {
        // A ⊑ ∃r.B, B ⊑ ⊥: no model, but the bound does not apply.
        let kb = KnowledgeBase::new()
            .with_axiom(Axiom::gci(a("A"), ConceptExpr::exists("r", a("B"))))
            .with_axiom(Axiom::gci(a("B"), ConceptExpr::Bottom))
            .with_assertion(Assertion::concept("i", a("A")));
        assert_eq!(brute_force_consistent(&kb, 2), BruteForce::Unknown);
    }

    #[test]
    fn witnesses_are_models() {
        let kb = KnowledgeBase::new()
            .with_axiom(Axiom::gci(a("A"), ConceptExpr::exists("r", a("B"))))
            .with_assertion(Assertion::concept("i", a("A")))
            .with_assertion(Assertion::data("hasAge", "i", 40));
        let r = brute_force_consistent(&kb, 2);
        let m = r.model().expect("model");
        assert!(m.is_model_of(&kb));
        assert_eq!(m.attr_val.get(&(m.ind_map["i"], "hasAge".to_owned())), Some(&40));
    }

    #[test]
    fn no_unique_names() {
        // i and j may denote the same element.
        let kb = KnowledgeBase::new()
            .with_axiom(Axiom::gci(ConceptExpr::Top, ConceptExpr::one_of(["i"])))
            .with_assertion(Assertion::concept("j", a("A")));
        let m = brute_force_consistent(&kb, 2).model().cloned().expect("model");
        assert_eq!(m.ind_map["i"], m.ind_map["j"]);
    }
}
