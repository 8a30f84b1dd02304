//! Shared helpers for integration tests: fixture paths and a seeded generator
//! of small random knowledge bases.

#![allow(dead_code)]

use std::path::PathBuf;

use mythos::model::{Assertion, Axiom, Comparator, ConceptExpr, KnowledgeBase, RoleDecl};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

pub fn read_data(rel: &str) -> String {
    let path = data_dir().join(rel);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("reading {}: {e}", path.display()))
}

const CONCEPTS: [&str; 4] = ["A", "B", "C", "D"];
const ROLES: [&str; 2] = ["r", "s"];
const INDIVIDUALS: [&str; 3] = ["a", "b", "c"];

const COMPARATORS: [Comparator; 4] = [Comparator::Gt, Comparator::Ge, Comparator::Lt, Comparator::Le];

/// Which optional constructors the generator may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flavor {
    Plain,
    /// Adds nominals over `a`..`c`, facets on `age` and data assertions.
    Rich,
}

/// Random concept of quantifier depth at most `depth`, without nominals or facets.
pub fn random_concept(rng: &mut ChaCha8Rng, n_concepts: usize, n_roles: usize, depth: usize) -> ConceptExpr {
    random_concept_with(rng, Flavor::Plain, n_concepts, n_roles, depth)
}

pub fn random_concept_with(
    rng: &mut ChaCha8Rng,
    flavor: Flavor,
    n_concepts: usize,
    n_roles: usize,
    depth: usize,
) -> ConceptExpr {
    let leaf = |rng: &mut ChaCha8Rng| {
        let atom = ConceptExpr::atom(CONCEPTS[rng.random_range(0..n_concepts)]);
        if flavor == Flavor::Rich {
            match rng.random_range(0..6) {
                0 => {
                    let k = rng.random_range(1..=2);
                    let names: Vec<&str> = (0..k).map(|_| INDIVIDUALS[rng.random_range(0..3)]).collect();
                    return ConceptExpr::one_of(names);
                }
                1 => {
                    let cmp = COMPARATORS[rng.random_range(0..4)];
                    return ConceptExpr::facet("age", cmp, rng.random_range(0..3));
                }
                _ => {}
            }
        }
        match rng.random_range(0..10) {
            0 => ConceptExpr::Top,
            1 => ConceptExpr::Bottom,
            2..=4 => ConceptExpr::not(atom),
            _ => atom,
        }
    };
    if depth == 0 {
        return leaf(rng);
    }
    let sub = |rng: &mut ChaCha8Rng| random_concept_with(rng, flavor, n_concepts, n_roles, depth - 1);
    match rng.random_range(0..8) {
        0..=2 => leaf(rng),
        3 => ConceptExpr::And(vec![sub(rng), sub(rng)]),
        4 => ConceptExpr::Or(vec![sub(rng), sub(rng)]),
        5 => ConceptExpr::not(sub(rng)),
        6 => {
            let r = ROLES[rng.random_range(0..n_roles)];
            ConceptExpr::exists(r, sub(rng))
        }
        _ => {
            let r = ROLES[rng.random_range(0..n_roles)];
            ConceptExpr::forall(r, sub(rng))
        }
    }
}

/// Random KB with at most 4 concept names, 2 roles, 3 individuals and 6
/// TBox/ABox statements. The RBox may relate the two roles by inclusion or
/// inversion.
pub fn random_kb(seed: u64) -> KnowledgeBase {
    random_kb_with(seed, Flavor::Plain)
}

pub fn random_kb_with(seed: u64, flavor: Flavor) -> KnowledgeBase {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_concepts = rng.random_range(1..=4);
    let n_roles = rng.random_range(1..=2);
    let n_inds = rng.random_range(1..=3);
    let n_statements = rng.random_range(1..=6);
    let mut kb = KnowledgeBase::new();
    if n_roles == 2 {
        match rng.random_range(0..4) {
            0 => kb.rbox.push(RoleDecl::new("s").with_parent("r")),
            1 => kb.rbox.push(RoleDecl::new("s").with_inverse("r")),
            _ => {}
        }
    }
    for _ in 0..n_statements {
        let ind = |rng: &mut ChaCha8Rng| INDIVIDUALS[rng.random_range(0..n_inds)];
        match rng.random_range(0..10) {
            0..=3 => {
                let sub = random_concept_with(&mut rng, flavor, n_concepts, n_roles, 1);
                let sup = random_concept_with(&mut rng, flavor, n_concepts, n_roles, 2);
                kb.tbox.push(Axiom::gci(sub, sup));
            }
            4 => {
                let l = ConceptExpr::atom(CONCEPTS[rng.random_range(0..n_concepts)]);
                let r = random_concept_with(&mut rng, flavor, n_concepts, n_roles, 1);
                kb.tbox.push(Axiom::equiv(l, r));
            }
            5 => {
                let l = ConceptExpr::atom(CONCEPTS[rng.random_range(0..n_concepts)]);
                let r = ConceptExpr::atom(CONCEPTS[rng.random_range(0..n_concepts)]);
                kb.tbox.push(Axiom::disjoint(l, r));
            }
            6 | 7 => {
                let role = ROLES[rng.random_range(0..n_roles)];
                let (s, o) = (ind(&mut rng), ind(&mut rng));
                kb.abox.push(Assertion::role(role, s, o));
            }
            8 if flavor == Flavor::Rich => {
                let i = ind(&mut rng);
                kb.abox.push(Assertion::data("age", i, rng.random_range(0..3)));
            }
            _ => {
                let i = ind(&mut rng);
                let c = random_concept_with(&mut rng, flavor, n_concepts, n_roles, 1);
                kb.abox.push(Assertion::concept(i, c));
            }
        }
    }
    kb
}
