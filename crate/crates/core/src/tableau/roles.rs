//! Role hierarchy closed under declared parents and inverses.

use std::collections::{BTreeMap, BTreeSet};

use crate::model::KnowledgeBase;

/// A role name, possibly inverted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RoleExpr {
    pub name: String,
    pub inverse: bool,
}

impl RoleExpr {
    fn new(name: &str, inverse: bool) -> Self {
        RoleExpr { name: name.to_owned(), inverse }
    }

    fn flip(&self) -> Self {
        RoleExpr { name: self.name.clone(), inverse: !self.inverse }
    }
}

/// Reflexive-transitive closure of the role inclusions of an RBox.
///
/// `s ⊑ p` also gives `s⁻ ⊑ p⁻`; `inv(r) = q` gives `q ≡ r⁻`.
#[derive(Debug, Clone, Default)]
pub struct RoleHierarchy {
    supers: BTreeMap<RoleExpr, BTreeSet<RoleExpr>>,
    inverses: bool,
}

impl RoleHierarchy {
    /// Builds the closure; `kb` should have had `close_roles` applied.
    pub fn new(kb: &KnowledgeBase) -> Self {
        let mut names: BTreeSet<String> = kb.role_names_used();
        for d in &kb.rbox {
            names.insert(d.name.clone());
            names.extend(d.parents.iter().cloned());
            names.extend(d.inverse_of.iter().cloned());
        }
        let mut direct: BTreeMap<RoleExpr, BTreeSet<RoleExpr>> = BTreeMap::new();
        let mut edge = |a: RoleExpr, b: RoleExpr| {
            direct.entry(a).or_default().insert(b);
        };
        for d in &kb.rbox {
            for p in &d.parents {
                edge(RoleExpr::new(&d.name, false), RoleExpr::new(p, false));
                edge(RoleExpr::new(&d.name, true), RoleExpr::new(p, true));
            }
            if let Some(q) = &d.inverse_of {
                for inv in [false, true] {
                    edge(RoleExpr::new(q, inv), RoleExpr::new(&d.name, !inv));
                    edge(RoleExpr::new(&d.name, !inv), RoleExpr::new(q, inv));
                }
            }
        }
        let mut supers = BTreeMap::new();
        for n in &names {
            for inv in [false, true] {
                let start = RoleExpr::new(n, inv);
                let mut seen = BTreeSet::from([start.clone()]);
                let mut todo = vec![start.clone()];
                while let Some(r) = todo.pop() {
                    if let Some(next) = direct.get(&r) {
                        for s in next {
                            if seen.insert(s.clone()) {
                                todo.push(s.clone());
                            }
                        }
                    }
                }
                supers.insert(start, seen);
            }
        }
        RoleHierarchy { supers, inverses: kb.rbox.iter().any(|d| d.inverse_of.is_some()) }
    }

    /// True if some role is declared the inverse of another.
    pub fn has_inverses(&self) -> bool {
        self.inverses
    }

    /// True if `sub ⊑* sup`.
    pub fn is_sub(&self, sub: &RoleExpr, sup: &RoleExpr) -> bool {
        if sub == sup {
            return true;
        }
        self.supers.get(sub).is_some_and(|s| s.contains(sup))
    }

    /// Does an edge `x →s y` make `y` an `r`-neighbour of `x`?
    pub fn forward_implies(&self, edge_role: &str, r: &str) -> bool {
        self.is_sub(&RoleExpr::new(edge_role, false), &RoleExpr::new(r, false))
    }

    /// Does an edge `y →s x` make `y` an `r`-neighbour of `x`?
    pub fn backward_implies(&self, edge_role: &str, r: &str) -> bool {
        self.is_sub(&RoleExpr::new(edge_role, true), &RoleExpr::new(r, false))
    }

    /// Every role expression implied by `r`, including `r`.
    pub fn supers_of(&self, r: &RoleExpr) -> BTreeSet<RoleExpr> {
        self.supers.get(r).cloned().unwrap_or_else(|| BTreeSet::from([r.clone()]))
    }

    pub fn inverse_supers_of(&self, r: &RoleExpr) -> BTreeSet<RoleExpr> {
        self.supers_of(&r.flip())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::RoleDecl;

    #[test]
    fn bridge_direction() {
        // spreadBy ≡ spread⁻ and spreadBy ⊑ travel, so spread(a,b) gives travel(b,a).
        let mut kb = KnowledgeBase::new()
            .with_role(RoleDecl::new("spreadBy").with_parent("travel").with_inverse("spread"));
        kb.close_roles().unwrap();
        let h = RoleHierarchy::new(&kb);
        assert!(h.backward_implies("spread", "travel"));
        assert!(!h.forward_implies("spread", "travel"));
        assert!(h.forward_implies("spreadBy", "travel"));
        assert!(h.is_sub(&RoleExpr::new("travel", true), &RoleExpr::new("travel", true)));
        assert!(h.is_sub(&RoleExpr::new("spreadBy", true), &RoleExpr::new("travel", true)));
    }

    #[test]
    fn parents_are_transitive() {
        let mut kb = KnowledgeBase::new()
            .with_role(RoleDecl::new("a").with_parent("b"))
            .with_role(RoleDecl::new("b").with_parent("c"));
        kb.close_roles().unwrap();
        let h = RoleHierarchy::new(&kb);
        assert!(h.forward_implies("a", "c"));
        assert!(!h.forward_implies("c", "a"));
    }
}
