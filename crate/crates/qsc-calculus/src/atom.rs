//! Symbolic entropic constants: H(G), H(G1|G2), I(G1;G2), I(G1⟩G2),
//! I(G1;G2|G3), each evaluated on a named state context.

use crate::error::{CalcError, Result};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

pub type Label = String;
pub type Group = Vec<Label>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum AtomKind {
    H,
    Hcond,
    Imutual,
    Icoh,
    Icmi,
}

/// Atoms compare equal iff kind, groups and state tag agree after canonical
/// group ordering (the two arguments of I(·;·) commute, as do the first two
/// of I(·;·|·)).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EntropicAtom {
    pub kind: AtomKind,
    pub groups: Vec<Group>,
    pub tag: String,
}

fn norm_group(g: &[Label]) -> Group {
    let mut g: Group = g.to_vec();
    g.sort();
    g.dedup();
    g
}

impl EntropicAtom {
    pub fn new(kind: AtomKind, groups: Vec<Group>, tag: impl Into<String>) -> Result<Self> {
        let expected = match kind {
            AtomKind::H => 1,
            AtomKind::Hcond | AtomKind::Imutual | AtomKind::Icoh => 2,
            AtomKind::Icmi => 3,
        };
        if groups.len() != expected {
            return Err(CalcError::Malformed(format!(
                "{kind:?} takes {expected} groups, got {}",
                groups.len()
            )));
        }
        let mut groups: Vec<Group> = groups.iter().map(|g| norm_group(g)).collect();
        if groups.iter().any(|g| g.is_empty()) {
            return Err(CalcError::Malformed("empty label group in atom".into()));
        }
        match kind {
            AtomKind::Imutual => groups.sort(),
            AtomKind::Icmi => groups[..2].sort(),
            _ => {}
        }
        Ok(EntropicAtom { kind, groups, tag: tag.into() })
    }

    pub fn h(g: &[&str], tag: &str) -> Self {
        Self::new(AtomKind::H, vec![to_group(g)], tag).unwrap()
    }

    pub fn h_cond(g1: &[&str], g2: &[&str], tag: &str) -> Self {
        Self::new(AtomKind::Hcond, vec![to_group(g1), to_group(g2)], tag).unwrap()
    }

    pub fn mutual(g1: &[&str], g2: &[&str], tag: &str) -> Self {
        Self::new(AtomKind::Imutual, vec![to_group(g1), to_group(g2)], tag).unwrap()
    }

    pub fn coherent(g1: &[&str], g2: &[&str], tag: &str) -> Self {
        Self::new(AtomKind::Icoh, vec![to_group(g1), to_group(g2)], tag).unwrap()
    }

    pub fn cond_mutual(g1: &[&str], g2: &[&str], g3: &[&str], tag: &str) -> Self {
        Self::new(
            AtomKind::Icmi,
            vec![to_group(g1), to_group(g2), to_group(g3)],
            tag,
        )
        .unwrap()
    }

    /// Nonnegativity whitelist: H, H(·|·), I(·;·), I(·;·|·) scale resources;
    /// I(·⟩·) can be negative and does not.
    pub fn is_whitelisted(&self) -> bool {
        !matches!(self.kind, AtomKind::Icoh)
    }

    /// Decomposition into subset entropies: pairs (subset, weight) such that
    /// the atom equals Σ weight · H(subset).
    pub fn primitive_terms(&self) -> Vec<(BTreeSet<Label>, i64)> {
        let set = |gs: &[&Group]| -> BTreeSet<Label> {
            gs.iter().flat_map(|g| g.iter().cloned()).collect()
        };
        let g: Vec<&Group> = self.groups.iter().collect();
        match self.kind {
            AtomKind::H => vec![(set(&[g[0]]), 1)],
            AtomKind::Hcond => vec![(set(&[g[0], g[1]]), 1), (set(&[g[1]]), -1)],
            AtomKind::Imutual => vec![
                (set(&[g[0]]), 1),
                (set(&[g[1]]), 1),
                (set(&[g[0], g[1]]), -1),
            ],
            AtomKind::Icoh => vec![(set(&[g[1]]), 1), (set(&[g[0], g[1]]), -1)],
            AtomKind::Icmi => vec![
                (set(&[g[0], g[2]]), 1),
                (set(&[g[1], g[2]]), 1),
                (set(&[g[0], g[1], g[2]]), -1),
                (set(&[g[2]]), -1),
            ],
        }
    }

    /// Apply a label rename inside every group.
    pub fn map_labels(&self, map: &BTreeMap<String, Vec<String>>) -> Self {
        let groups = self
            .groups
            .iter()
            .map(|g| {
                let mut out = Vec::new();
                for l in g {
                    match map.get(l) {
                        Some(repl) => out.extend(repl.iter().cloned()),
                        None => out.push(l.clone()),
                    }
                }
                out
            })
            .collect();
        EntropicAtom::new(self.kind, groups, self.tag.clone()).expect("shape preserved")
    }

    pub fn with_tag(&self, tag: &str) -> Self {
        EntropicAtom { tag: tag.to_string(), ..self.clone() }
    }

    /// Condition on a classical label: averaging over the branch index.
    pub fn conditioned_on(&self, x: &str) -> Self {
        let add_x = |g: &Group| -> Group {
            let mut g = g.clone();
            if !g.contains(&x.to_string()) {
                g.push(x.to_string());
            }
            g
        };
        match self.kind {
            AtomKind::H => EntropicAtom::new(
                AtomKind::Hcond,
                vec![self.groups[0].clone(), vec![x.to_string()]],
                self.tag.clone(),
            ),
            AtomKind::Hcond => EntropicAtom::new(
                AtomKind::Hcond,
                vec![self.groups[0].clone(), add_x(&self.groups[1])],
                self.tag.clone(),
            ),
            AtomKind::Imutual => EntropicAtom::new(
                AtomKind::Icmi,
                vec![
                    self.groups[0].clone(),
                    self.groups[1].clone(),
                    vec![x.to_string()],
                ],
                self.tag.clone(),
            ),
            AtomKind::Icoh => EntropicAtom::new(
                AtomKind::Icoh,
                vec![self.groups[0].clone(), add_x(&self.groups[1])],
                self.tag.clone(),
            ),
            AtomKind::Icmi => EntropicAtom::new(
                AtomKind::Icmi,
                vec![
                    self.groups[0].clone(),
                    self.groups[1].clone(),
                    add_x(&self.groups[2]),
                ],
                self.tag.clone(),
            ),
        }
        .expect("shape preserved")
    }
}

fn to_group(g: &[&str]) -> Group {
    g.iter().map(|s| s.to_string()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mutual_information_is_symmetric() {
        let a = EntropicAtom::mutual(&["A"], &["B"], "psi");
        let b = EntropicAtom::mutual(&["B"], &["A"], "psi");
        assert_eq!(a, b);
    }

    #[test]
    fn coherent_is_not_symmetric() {
        let a = EntropicAtom::coherent(&["A"], &["B"], "psi");
        let b = EntropicAtom::coherent(&["B"], &["A"], "psi");
        assert_ne!(a, b);
    }

    #[test]
    fn conditioning_turns_h_into_hcond() {
        let a = EntropicAtom::h(&["A"], "s").conditioned_on("X");
        assert_eq!(a, EntropicAtom::h_cond(&["A"], &["X"], "s"));
        let m = EntropicAtom::mutual(&["A"], &["B"], "s").conditioned_on("X");
        assert_eq!(m, EntropicAtom::cond_mutual(&["A"], &["B"], &["X"], "s"));
    }
}
