//! Satisfiability, subsumption, coherence and consistency checking.

mod brute;
mod engine;
mod roles;

pub use brute::{brute_force_consistent, BruteForce, Interpretation, SEARCH_BUDGET};
pub use roles::{RoleExpr, RoleHierarchy};

use engine::Prepared;

use crate::model::{Assertion, ConceptExpr, KnowledgeBase, ModelError};

pub const DEFAULT_NODE_CAP: usize = 10_000;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum TableauError {
    #[error("completion graph exceeded the cap of {cap} nodes")]
    ResourceLimit { cap: usize },
    #[error("unknown individual {0}")]
    UnknownIndividual(String),
    #[error(transparent)]
    Roles(#[from] ModelError),
}

/// Reasoning entry point with a configurable node cap.
///
/// Every call builds its own completion graphs, so one `Reasoner` may be
/// shared freely between threads.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Reasoner {
    pub node_cap: usize,
}

impl Default for Reasoner {
    fn default() -> Self {
        Reasoner { node_cap: DEFAULT_NODE_CAP }
    }
}

impl Reasoner {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_node_cap(node_cap: usize) -> Self {
        Reasoner { node_cap: node_cap.max(1) }
    }

    /// Can `c` be non-empty in some model of the TBox and RBox? The ABox is ignored.
    pub fn is_satisfiable(&self, kb: &KnowledgeBase, c: &ConceptExpr) -> Result<bool, TableauError> {
        Prepared::new(kb, self.node_cap)?.satisfiable(c)
    }

    /// Returns whether every named concept is satisfiable, and the sorted
    /// list of those that are not.
    pub fn is_coherent(&self, kb: &KnowledgeBase) -> Result<(bool, Vec<String>), TableauError> {
        let mut p = Prepared::new(kb, self.node_cap)?;
        let mut unsat = Vec::new();
        for name in kb.concept_names() {
            if !p.satisfiable(&ConceptExpr::Atom(name.clone()))? {
                unsat.push(name);
            }
        }
        Ok((unsat.is_empty(), unsat))
    }

    /// Does the whole knowledge base have a model?
    pub fn is_consistent(&self, kb: &KnowledgeBase) -> Result<bool, TableauError> {
        Prepared::new(kb, self.node_cap)?.consistent(kb)
    }

    /// Is `sub ⊑ sup` entailed by the TBox and RBox?
    pub fn subsumes(&self, kb: &KnowledgeBase, sup: &ConceptExpr, sub: &ConceptExpr) -> Result<bool, TableauError> {
        let test = ConceptExpr::And(vec![sub.clone(), ConceptExpr::not(sup.clone())]);
        Ok(!self.is_satisfiable(kb, &test)?)
    }

    /// Is `ind : c` entailed by the knowledge base?
    pub fn instance_of(&self, kb: &KnowledgeBase, ind: &str, c: &ConceptExpr) -> Result<bool, TableauError> {
        if !kb.individuals().iter().any(|i| i == ind) {
            return Err(TableauError::UnknownIndividual(ind.to_owned()));
        }
        let probe = kb.clone().with_assertion(Assertion::concept(ind, ConceptExpr::not(c.clone())));
        Ok(!self.is_consistent(&probe)?)
    }
}

pub fn is_satisfiable(kb: &KnowledgeBase, c: &ConceptExpr) -> Result<bool, TableauError> {
    Reasoner::default().is_satisfiable(kb, c)
}

pub fn is_coherent(kb: &KnowledgeBase) -> Result<(bool, Vec<String>), TableauError> {
    Reasoner::default().is_coherent(kb)
}

pub fn is_consistent(kb: &KnowledgeBase) -> Result<bool, TableauError> {
    Reasoner::default().is_consistent(kb)
}

pub fn subsumes(kb: &KnowledgeBase, sup: &ConceptExpr, sub: &ConceptExpr) -> Result<bool, TableauError> {
    Reasoner::default().subsumes(kb, sup, sub)
}

pub fn instance_of(kb: &KnowledgeBase, ind: &str, c: &ConceptExpr) -> Result<bool, TableauError> {
    Reasoner::default().instance_of(kb, ind, c)
}
