//! Completion-graph expansion with backtracking.
//!
//! Concepts are interned in negation normal form. TBox axioms are absorbed
//! where the left-hand side allows it (atoms, nominals, conjunctions with an
//! atom, disjunctions) and internalized into a universal concept otherwise.
//! Termination uses dynamic blocking between a generated node and its
//! generated ancestors: subset blocking when no role has an inverse, equality
//! blocking otherwise.
//!
//! Every label entry and edge records the branch points it depends on. A
//! clash backjumps to the latest branch point among its dependencies instead
//! of the latest one overall.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::rc::Rc;

use indexmap::IndexMap;

use super::roles::RoleHierarchy;
use super::TableauError;
use crate::model::{nnf, AssertionKind, AxiomKind, ConceptExpr, Facet, KnowledgeBase};

pub(crate) type CId = u32;
type NodeId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Shape {
    Top,
    Bottom,
    Atom(String),
    NotAtom(String),
    And(Vec<CId>),
    Or(Vec<CId>),
    Exists(String, CId),
    ForAll(String, CId),
    OneOf(Vec<String>),
    NotOneOf(Vec<String>),
    Facet(Facet),
}

/// `⊤` is interned first and never stored in a label.
const TOP: CId = 0;

#[derive(Debug)]
struct Interner {
    ids: HashMap<ConceptExpr, CId>,
    exprs: Vec<ConceptExpr>,
    shapes: Vec<Rc<Shape>>,
}

impl Interner {
    fn new() -> Self {
        let mut i = Interner { ids: HashMap::new(), exprs: Vec::new(), shapes: Vec::new() };
        i.intern(&ConceptExpr::Top);
        i
    }

    /// Interns a concept that is already in negation normal form.
    fn intern(&mut self, c: &ConceptExpr) -> CId {
        if let Some(&id) = self.ids.get(c) {
            return id;
        }
        let shape = match c {
            ConceptExpr::Top => Shape::Top,
            ConceptExpr::Bottom => Shape::Bottom,
            ConceptExpr::Atom(a) => Shape::Atom(a.clone()),
            ConceptExpr::Not(inner) => match inner.as_ref() {
                ConceptExpr::Atom(a) => Shape::NotAtom(a.clone()),
                ConceptExpr::OneOf(ns) => Shape::NotOneOf(ns.clone()),
                _ => return self.intern(&nnf(c)),
            },
            ConceptExpr::And(cs) => {
                let ids: Vec<CId> = cs.iter().map(|d| self.intern(d)).collect();
                if ids.iter().any(|&d| *self.shapes[d as usize] == Shape::Bottom) {
                    Shape::Bottom
                } else {
                    Shape::And(ids)
                }
            }
            ConceptExpr::Or(cs) => {
                let ids: Vec<CId> = cs.iter().map(|d| self.intern(d)).collect();
                if ids.iter().any(|&d| *self.shapes[d as usize] == Shape::Top) {
                    Shape::Top
                } else {
                    Shape::Or(ids)
                }
            }
            ConceptExpr::Exists(r, d) => match self.intern(d) {
                d if *self.shapes[d as usize] == Shape::Bottom => Shape::Bottom,
                d => Shape::Exists(r.clone(), d),
            },
            ConceptExpr::ForAll(r, d) => match self.intern(d) {
                d if *self.shapes[d as usize] == Shape::Top => Shape::Top,
                d => Shape::ForAll(r.clone(), d),
            },
            ConceptExpr::OneOf(ns) => Shape::OneOf(ns.clone()),
            ConceptExpr::Facet(f) => Shape::Facet(f.clone()),
        };
        let id = self.shapes.len() as CId;
        self.shapes.push(Rc::new(shape));
        self.exprs.push(c.clone());
        self.ids.insert(c.clone(), id);
        id
    }

    fn lookup(&self, c: &ConceptExpr) -> Option<CId> {
        self.ids.get(c).copied()
    }

    fn negation(&mut self, id: CId) -> CId {
        let neg = nnf(&ConceptExpr::not(self.exprs[id as usize].clone()));
        self.intern(&neg)
    }

    fn shape(&self, id: CId) -> &Shape {
        &self.shapes[id as usize]
    }

    fn shared_shape(&self, id: CId) -> Rc<Shape> {
        Rc::clone(&self.shapes[id as usize])
    }
}

/// TBox and RBox compiled for expansion.
#[derive(Debug)]
pub(crate) struct Prepared {
    interner: Interner,
    universal: Vec<CId>,
    unfold: HashMap<String, Vec<CId>>,
    nominal_axioms: BTreeMap<String, Vec<CId>>,
    tbox_individuals: Vec<String>,
    roles: RoleHierarchy,
    node_cap: usize,
}

impl Prepared {
    pub(crate) fn new(kb: &KnowledgeBase, node_cap: usize) -> Result<Self, TableauError> {
        let mut kb = kb.clone();
        kb.close_roles().map_err(TableauError::Roles)?;
        let mut p = Prepared {
            interner: Interner::new(),
            universal: Vec::new(),
            unfold: HashMap::new(),
            nominal_axioms: BTreeMap::new(),
            tbox_individuals: Vec::new(),
            roles: RoleHierarchy::new(&kb),
            node_cap,
        };
        let mut inds = BTreeSet::new();
        for ax in &kb.tbox {
            for c in ax.kind.concepts() {
                c.individual_names(&mut inds);
            }
            let gcis = match &ax.kind {
                AxiomKind::Disjoint { left, right } => vec![(left.clone(), ConceptExpr::not(right.clone()))],
                other => other.to_gcis(),
            };
            for (sub, sup) in gcis {
                p.absorb(&sub, &sup);
            }
        }
        p.tbox_individuals = inds.into_iter().collect();
        Ok(p)
    }

    fn absorb(&mut self, sub: &ConceptExpr, sup: &ConceptExpr) {
        match sub {
            ConceptExpr::Top => {
                let id = self.interner.intern(&nnf(sup));
                self.universal.push(id);
            }
            ConceptExpr::Bottom => {}
            ConceptExpr::Atom(a) => {
                let id = self.interner.intern(&nnf(sup));
                self.unfold.entry(a.clone()).or_default().push(id);
            }
            ConceptExpr::OneOf(names) => {
                let id = self.interner.intern(&nnf(sup));
                for n in names {
                    self.nominal_axioms.entry(n.clone()).or_default().push(id);
                }
            }
            ConceptExpr::Or(ds) => {
                for d in ds {
                    self.absorb(d, sup);
                }
            }
            ConceptExpr::And(cs) if cs.iter().any(ConceptExpr::is_atom) => {
                let k = cs.iter().position(ConceptExpr::is_atom).expect("checked");
                let rest: Vec<ConceptExpr> =
                    cs.iter().enumerate().filter(|&(i, _)| i != k).map(|(_, c)| c.clone()).collect();
                let body = ConceptExpr::or(vec![ConceptExpr::not(ConceptExpr::and(rest)), sup.clone()]);
                self.absorb(&cs[k], &body);
            }
            _ => {
                let gci = ConceptExpr::Or(vec![ConceptExpr::not(sub.clone()), sup.clone()]);
                let id = self.interner.intern(&nnf(&gci));
                self.universal.push(id);
            }
        }
    }

    /// Is `c` satisfiable with respect to the TBox and RBox?
    pub(crate) fn satisfiable(&mut self, c: &ConceptExpr) -> Result<bool, TableauError> {
        let mut st = State::default();
        self.seed_tbox_individuals(&mut st)?;
        let id = self.interner.intern(&nnf(c));
        let root = self.new_node(&mut st, None, &Deps::default())?;
        st.insert(root, id, &Deps::default());
        self.run(st)
    }

    /// Does the whole knowledge base (ABox included) have a model?
    pub(crate) fn consistent(&mut self, kb: &KnowledgeBase) -> Result<bool, TableauError> {
        let none = Deps::default();
        let mut st = State::default();
        for ind in kb.individuals() {
            self.named_node(&mut st, &ind)?;
        }
        self.seed_tbox_individuals(&mut st)?;
        if st.nodes.is_empty() {
            // The domain is never empty.
            self.new_node(&mut st, None, &none)?;
        }
        for a in &kb.abox {
            match &a.kind {
                AssertionKind::Concept { individual, concept } => {
                    let x = self.named_node(&mut st, individual)?;
                    let id = self.interner.intern(&nnf(concept));
                    st.insert(x, id, &none);
                }
                AssertionKind::Role { role, subject, object } => {
                    let x = self.named_node(&mut st, subject)?;
                    let y = self.named_node(&mut st, object)?;
                    st.add_edge(x, y, role, &none);
                }
                AssertionKind::Data { attribute, individual, value } => {
                    let x = self.named_node(&mut st, individual)?;
                    if let Some((old, _)) = st.nodes[x].values.insert(attribute.clone(), (*value, none.clone())) {
                        if old != *value {
                            return Ok(false);
                        }
                    }
                }
            }
        }
        self.run(st)
    }

    fn seed_tbox_individuals(&mut self, st: &mut State) -> Result<(), TableauError> {
        for ind in self.tbox_individuals.clone() {
            self.named_node(st, &ind)?;
        }
        Ok(())
    }

    /// A node whose existence depends on `deps`.
    fn new_node(&mut self, st: &mut State, parent: Option<NodeId>, deps: &Deps) -> Result<NodeId, TableauError> {
        if st.nodes.len() >= self.node_cap {
            return Err(TableauError::ResourceLimit { cap: self.node_cap });
        }
        let mut node = Node { parent, alive: true, ..Node::default() };
        node.label.extend(self.universal.iter().map(|&c| (c, deps.clone())));
        st.nodes.push(node);
        Ok(st.nodes.len() - 1)
    }

    /// Node for a named individual, created on first use.
    fn named_node(&mut self, st: &mut State, name: &str) -> Result<NodeId, TableauError> {
        if let Some(&x) = st.ind.get(name) {
            return Ok(x);
        }
        let x = self.new_node(st, None, &Deps::default())?;
        st.nodes[x].named = true;
        self.name_node(st, x, name, &Deps::default());
        Ok(x)
    }

    fn name_node(&mut self, st: &mut State, x: NodeId, name: &str, deps: &Deps) {
        let own = self.interner.intern(&ConceptExpr::OneOf(vec![name.to_owned()]));
        st.insert(x, own, deps);
        if let Some(extra) = self.nominal_axioms.get(name) {
            st.insert_all(x, extra, deps);
        }
        st.ind.insert(name.to_owned(), x);
    }

    fn run(&mut self, initial: State) -> Result<bool, TableauError> {
        // Pending alternatives tagged with their branch level, innermost last.
        let mut stack: Vec<(u32, State)> = Vec::new();
        // Dependencies of the failed alternatives of each branch level.
        let mut failed: Vec<Deps> = Vec::new();
        let mut next = initial;
        loop {
            let mut st = next;
            let mut clash = loop {
                self.saturate(&mut st)?;
                if let Some(d) = st.clash.take().or_else(|| self.find_clash(&st)) {
                    break d;
                }
                let level = failed.len() as u32;
                if let Some(mut alts) = self.choose(&mut st, level) {
                    failed.push(Deps::default());
                    let first = alts.remove(0);
                    stack.extend(alts.into_iter().rev().map(|s| (level, s)));
                    st = first;
                    continue;
                }
                if !self.generate(&mut st)? {
                    return Ok(true);
                }
            };
            next = loop {
                let Some(m) = clash.max() else { return Ok(false) };
                failed[m as usize].absorb_without(&clash, m);
                while stack.last().is_some_and(|(l, _)| *l > m) {
                    stack.pop();
                }
                match stack.last() {
                    Some((l, _)) if *l == m => break stack.pop().expect("checked").1,
                    // Every alternative of level m failed.
                    _ => clash = failed[m as usize].clone(),
                }
            };
        }
    }

    /// Applies the deterministic rules until nothing changes.
    fn saturate(&mut self, st: &mut State) -> Result<(), TableauError> {
        loop {
            let mut changed = false;
            for x in 0..st.nodes.len() {
                let mut i = 0;
                while st.nodes[x].alive && i < st.nodes[x].label.len() {
                    changed |= self.apply(st, x, i)?;
                    if st.clash.is_some() {
                        return Ok(());
                    }
                    i += 1;
                }
            }
            if !changed {
                return Ok(());
            }
        }
    }

    /// Applies the rule for the `i`-th label entry of node `x`.
    fn apply(&mut self, st: &mut State, x: NodeId, i: usize) -> Result<bool, TableauError> {
        let (&c, deps) = st.nodes[x].label.get_index(i).expect("in range");
        let deps = deps.clone();
        match &*self.interner.shared_shape(c) {
            Shape::And(cs) => Ok(st.insert_all(x, cs, &deps)),
            Shape::Atom(a) => match self.unfold.get(a) {
                Some(ds) => {
                    let ds = ds.clone();
                    Ok(st.insert_all(x, &ds, &deps))
                }
                None => Ok(false),
            },
            Shape::ForAll(r, d) => {
                let mut changed = false;
                for (y, edge) in st.neighbours(x, r, &self.roles) {
                    changed |= st.insert(y, *d, &deps.union(&edge));
                }
                Ok(changed)
            }
            Shape::Or(ds) => {
                // Unit propagation: one open disjunct left, the others refuted.
                let label = &st.nodes[x].label;
                if ds.iter().any(|d| label.contains_key(d)) {
                    return Ok(false);
                }
                let mut open = None;
                let mut why = deps;
                for &d in ds {
                    let neg = self.interner.negation(d);
                    match holds(label, neg) {
                        Some(nd) => why = why.union(&nd),
                        None if open.is_none() => open = Some(d),
                        None => return Ok(false),
                    }
                }
                match open {
                    Some(d) => Ok(st.insert(x, d, &why)),
                    None => {
                        st.clash = Some(why);
                        Ok(true)
                    }
                }
            }
            Shape::OneOf(names) if names.len() == 1 => {
                let name = &names[0];
                match st.ind.get(name).copied() {
                    Some(n) if n == x => Ok(false),
                    Some(n) => {
                        // `n` may hold the name only because of an earlier merge.
                        let held = st.nodes[n].label.get(&c).cloned().unwrap_or_default();
                        self.merge(st, x, n, &deps.union(&held));
                        Ok(true)
                    }
                    None => {
                        // First node to carry the nominal becomes its named node.
                        st.nodes[x].named = true;
                        st.nodes[x].parent = None;
                        self.name_node(st, x, name, &deps);
                        Ok(true)
                    }
                }
            }
            _ => Ok(false),
        }
    }

    /// Merges node `x` into node `n` because of a nominal with dependencies
    /// `deps`: labels and values are unioned, edges to `x`'s generated
    /// children are pruned, all other edges are rerouted.
    fn merge(&mut self, st: &mut State, x: NodeId, n: NodeId, deps: &Deps) {
        let label = std::mem::take(&mut st.nodes[x].label);
        for (c, d) in label {
            st.insert(n, c, &d.union(deps));
        }
        let values = std::mem::take(&mut st.nodes[x].values);
        for (attr, (v, d)) in values {
            let d = d.union(deps);
            match st.nodes[n].values.get(&attr) {
                Some((old, od)) if *old != v => st.clash = Some(d.union(od)),
                Some(_) => {}
                None => {
                    st.nodes[n].values.insert(attr, (v, d));
                }
            }
        }
        let edges = std::mem::take(&mut st.nodes[x].edges);
        for e in edges {
            let d = e.deps.union(deps);
            if e.other == x {
                st.add_edge(n, n, &e.role, &d);
                continue;
            }
            if !st.nodes[e.other].alive {
                continue;
            }
            st.nodes[e.other].edges.retain(|f| f.other != x);
            if st.nodes[e.other].parent == Some(x) {
                st.prune(e.other);
            } else if e.outgoing {
                st.add_edge(n, e.other, &e.role, &d);
            } else {
                st.add_edge(e.other, n, &e.role, &d);
            }
        }
        // Generated children reachable only through parent links.
        let children: Vec<NodeId> =
            (0..st.nodes.len()).filter(|&y| st.nodes[y].alive && st.nodes[y].parent == Some(x)).collect();
        for y in children {
            st.prune(y);
        }
        for v in st.ind.values_mut() {
            if *v == x {
                *v = n;
            }
        }
        st.nodes[x].alive = false;
    }

    /// Dependencies of the first clash found, if any.
    fn find_clash(&self, st: &State) -> Option<Deps> {
        st.nodes.iter().filter(|n| n.alive).find_map(|n| self.node_clash(n))
    }

    fn node_clash(&self, node: &Node) -> Option<Deps> {
        let mut names: Vec<(&str, &Deps)> = Vec::new();
        let mut bounds: BTreeMap<&str, (i64, i64, Deps)> = BTreeMap::new();
        for (&c, deps) in &node.label {
            match self.interner.shape(c) {
                Shape::Bottom => return Some(deps.clone()),
                Shape::NotAtom(a) => {
                    let pos = self.interner.lookup(&ConceptExpr::Atom(a.clone()));
                    if let Some(pd) = pos.and_then(|p| node.label.get(&p)) {
                        return Some(deps.union(pd));
                    }
                }
                Shape::OneOf(ns) if ns.len() == 1 => names.push((&ns[0], deps)),
                Shape::Facet(f) => {
                    let (lo, hi) = f.interval();
                    let e = bounds.entry(&f.attribute).or_insert((i64::MIN, i64::MAX, Deps::default()));
                    e.0 = e.0.max(lo.unwrap_or(i64::MIN));
                    e.1 = e.1.min(hi.unwrap_or(i64::MAX));
                    e.2 = e.2.union(deps);
                }
                _ => {}
            }
        }
        for (&c, deps) in &node.label {
            if let Shape::NotOneOf(ns) = self.interner.shape(c) {
                if let Some((_, nd)) = names.iter().find(|(n, _)| ns.iter().any(|m| m == n)) {
                    return Some(deps.union(nd));
                }
            }
        }
        for (attr, (lo, hi, deps)) in bounds {
            if lo > hi {
                return Some(deps);
            }
            if let Some((v, vd)) = node.values.get(attr) {
                if *v < lo || *v > hi {
                    return Some(deps.union(vd));
                }
            }
        }
        None
    }

    /// Finds the first non-deterministic choice and returns one state per
    /// alternative, each depending on branch `level`.
    fn choose(&mut self, st: &mut State, level: u32) -> Option<Vec<State>> {
        let blocked = self.blocking(st);
        // Under subset blocking the blocker already holds every concept of a
        // directly blocked node, so only equality blocking branches there.
        let skip_direct = !self.roles.has_inverses();
        for (x, b) in blocked.iter().enumerate() {
            let skip = match b {
                Blocked::No => false,
                Blocked::Directly => skip_direct,
                Blocked::Indirectly => true,
            };
            if !st.nodes[x].alive || skip {
                continue;
            }
            for (&c, deps) in &st.nodes[x].label {
                let deps = deps.with(level);
                match self.interner.shape(c) {
                    Shape::Or(ds) if !ds.iter().any(|d| st.nodes[x].label.contains_key(d)) => {
                        let ds = ds.clone();
                        let mut out = Vec::with_capacity(ds.len());
                        for (i, &d) in ds.iter().enumerate() {
                            let mut branch = st.clone();
                            branch.insert(x, d, &deps);
                            // Semantic branching: later branches exclude earlier disjuncts.
                            for &prev in &ds[..i] {
                                let neg = self.interner.negation(prev);
                                branch.insert(x, neg, &deps);
                            }
                            out.push(branch);
                        }
                        return Some(out);
                    }
                    Shape::OneOf(ns) if ns.len() > 1 => {
                        let ns = ns.clone();
                        let present = ns.iter().any(|n| {
                            let single = ConceptExpr::OneOf(vec![n.clone()]);
                            self.interner.lookup(&single).is_some_and(|id| st.nodes[x].label.contains_key(&id))
                        });
                        if present {
                            continue;
                        }
                        let mut out = Vec::with_capacity(ns.len());
                        for n in ns {
                            let mut branch = st.clone();
                            let id = self.interner.intern(&ConceptExpr::OneOf(vec![n]));
                            branch.insert(x, id, &deps);
                            out.push(branch);
                        }
                        return Some(out);
                    }
                    _ => {}
                }
            }
        }
        None
    }

    /// Applies the ∃ rule once. Returns false when the graph is complete.
    fn generate(&mut self, st: &mut State) -> Result<bool, TableauError> {
        let blocked = self.blocking(st);
        for (x, b) in blocked.iter().enumerate() {
            if !st.nodes[x].alive || *b != Blocked::No {
                continue;
            }
            for i in 0..st.nodes[x].label.len() {
                let (&c, deps) = st.nodes[x].label.get_index(i).expect("in range");
                if let Shape::Exists(r, d) = self.interner.shape(c) {
                    let (r, d, deps) = (r.clone(), *d, deps.clone());
                    let has_witness = st
                        .neighbours(x, &r, &self.roles)
                        .into_iter()
                        .any(|(y, _)| holds(&st.nodes[y].label, d).is_some());
                    if !has_witness {
                        let y = self.new_node(st, Some(x), &deps)?;
                        st.insert(y, d, &deps);
                        st.add_edge(x, y, &r, &deps);
                        return Ok(true);
                    }
                }
            }
        }
        Ok(false)
    }

    fn blocking(&self, st: &State) -> Vec<Blocked> {
        let inverses = self.roles.has_inverses();
        let mut out = vec![Blocked::No; st.nodes.len()];
        for x in 0..st.nodes.len() {
            let node = &st.nodes[x];
            if !node.alive || node.named {
                continue;
            }
            let Some(p) = node.parent else { continue };
            if out[p] != Blocked::No {
                out[x] = Blocked::Indirectly;
                continue;
            }
            let mut anc = Some(p);
            while let Some(a) = anc {
                let an = &st.nodes[a];
                if an.named {
                    break;
                }
                let blocks = if inverses {
                    same_concepts(&an.label, &node.label)
                } else {
                    node.label.keys().all(|c| an.label.contains_key(c))
                };
                if blocks {
                    out[x] = Blocked::Directly;
                    break;
                }
                anc = an.parent;
            }
        }
        out
    }
}

/// Dependencies of `c` in `label`, if present. `⊤` holds everywhere.
fn holds(label: &Label, c: CId) -> Option<Deps> {
    if c == TOP {
        return Some(Deps::default());
    }
    label.get(&c).cloned()
}

fn same_concepts(a: &Label, b: &Label) -> bool {
    a.len() == b.len() && a.keys().all(|c| b.contains_key(c))
}

/// Branch levels a label entry, edge or value depends on. Sorted, no duplicates.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
struct Deps(Vec<u32>);

impl Deps {
    fn union(&self, other: &Deps) -> Deps {
        if other.0.is_empty() {
            return self.clone();
        }
        if self.0.is_empty() {
            return other.clone();
        }
        let mut v: Vec<u32> = self.0.iter().chain(&other.0).copied().collect();
        v.sort_unstable();
        v.dedup();
        Deps(v)
    }

    fn with(&self, level: u32) -> Deps {
        self.union(&Deps(vec![level]))
    }

    fn max(&self) -> Option<u32> {
        self.0.last().copied()
    }

    /// Adds every level of `other` except `skip`.
    fn absorb_without(&mut self, other: &Deps, skip: u32) {
        let rest = Deps(other.0.iter().copied().filter(|&l| l != skip).collect());
        *self = self.union(&rest);
    }
}

type Label = IndexMap<CId, Deps>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Blocked {
    No,
    Directly,
    Indirectly,
}

#[derive(Debug, Clone)]
struct Edge {
    role: String,
    other: NodeId,
    /// True if the edge points from this node to `other`.
    outgoing: bool,
    deps: Deps,
}

#[derive(Debug, Clone, Default)]
struct Node {
    label: Label,
    parent: Option<NodeId>,
    named: bool,
    alive: bool,
    edges: Vec<Edge>,
    values: BTreeMap<String, (i64, Deps)>,
}

#[derive(Debug, Clone, Default)]
struct State {
    nodes: Vec<Node>,
    ind: BTreeMap<String, NodeId>,
    clash: Option<Deps>,
}

impl State {
    /// Adds `c` to the label of `x`. An entry already present keeps its dependencies.
    fn insert(&mut self, x: NodeId, c: CId, deps: &Deps) -> bool {
        if c == TOP {
            return false;
        }
        match self.nodes[x].label.entry(c) {
            indexmap::map::Entry::Occupied(_) => false,
            indexmap::map::Entry::Vacant(v) => {
                v.insert(deps.clone());
                true
            }
        }
    }

    fn insert_all(&mut self, x: NodeId, cs: &[CId], deps: &Deps) -> bool {
        let mut changed = false;
        for &c in cs {
            changed |= self.insert(x, c, deps);
        }
        changed
    }

    fn add_edge(&mut self, from: NodeId, to: NodeId, role: &str, deps: &Deps) {
        let exists = self.nodes[from].edges.iter().any(|e| e.outgoing && e.other == to && e.role == role);
        if exists {
            return;
        }
        let edge = |other, outgoing| Edge { role: role.to_owned(), other, outgoing, deps: deps.clone() };
        self.nodes[from].edges.push(edge(to, true));
        self.nodes[to].edges.push(edge(from, false));
    }

    /// Nodes `y` with `(x, y)` in the extension of `r`, in edge order, with
    /// the dependencies of the first edge that connects them.
    fn neighbours(&self, x: NodeId, r: &str, roles: &RoleHierarchy) -> Vec<(NodeId, Deps)> {
        let mut out: Vec<(NodeId, Deps)> = Vec::new();
        for e in &self.nodes[x].edges {
            let ok = if e.outgoing { roles.forward_implies(&e.role, r) } else { roles.backward_implies(&e.role, r) };
            if ok && !out.iter().any(|(y, _)| *y == e.other) {
                out.push((e.other, e.deps.clone()));
            }
        }
        out
    }

    /// Removes a generated node and its descendants.
    fn prune(&mut self, root: NodeId) {
        let mut todo = vec![root];
        while let Some(y) = todo.pop() {
            if !self.nodes[y].alive {
                continue;
            }
            self.nodes[y].alive = false;
            self.nodes[y].label.clear();
            let edges = std::mem::take(&mut self.nodes[y].edges);
            for e in edges {
                self.nodes[e.other].edges.retain(|f| f.other != y);
                if self.nodes[e.other].parent == Some(y) {
                    todo.push(e.other);
                }
            }
        }
    }
}
