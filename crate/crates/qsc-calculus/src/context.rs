//! Declared state contexts: structural facts about named states and channels
//! that derivations are allowed to use. Purity declarations feed the identity
//! basis; coefficient facts feed the nonnegativity certifier; named
//! declarations back the relativization and source rules.

use crate::atom::Label;
use crate::coeff::{Coefficient, Rat};
use crate::symbol::ResourceSymbol;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// Purity of a label family, possibly conditional on classical labels:
/// for S ⊆ family, H(S ∪ given) = H((family∖S) ∪ given) and
/// H(family ∪ given) = H(given).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PureFamily {
    pub family: BTreeSet<Label>,
    pub given: BTreeSet<Label>,
}

/// Classical-quantum ensemble structure of a tag: classical label, and the
/// per-branch content, either symbolic (for the conditional convex-split
/// rule) or explicit rational weights on component tags.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CqComponents {
    Symbolic,
    Explicit(Vec<(Rat, String)>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CqDecl {
    pub class_label: Label,
    pub components: CqComponents,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TagContext {
    pub pure_families: Vec<PureFamily>,
    pub classical: BTreeSet<Label>,
    pub cq: Option<CqDecl>,
}

/// Declarations about named dynamic resources.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NamedDecl {
    /// The named operation is an isometry (a pure resource).
    Pure { name: String },
    /// ⟨name : test⟩ applied to its test state yields the state `result`
    /// (also used with protected sources).
    Application { name: String, test: String, result: String },
    /// outer ∘ inner = composed, with the outer channel's test state `mid`.
    Composition { inner: String, outer: String, mid: Option<String>, composed: String },
    /// A declared reduction: `from` simulates `to` with free local coding.
    Reduction { from: ResourceSymbol, to: ResourceSymbol },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextSet {
    pub tags: BTreeMap<String, TagContext>,
    pub named: Vec<NamedDecl>,
    /// Declared coefficient facts, each asserting `coefficient ≥ 0`.
    pub facts: Vec<Coefficient>,
}

impl ContextSet {
    pub fn new() -> Self {
        ContextSet::default()
    }

    pub fn declare_pure(&mut self, tag: &str, family: &[&str], given: &[&str]) {
        let entry = self.tags.entry(tag.to_string()).or_default();
        entry.pure_families.push(PureFamily {
            family: family.iter().map(|s| s.to_string()).collect(),
            given: given.iter().map(|s| s.to_string()).collect(),
        });
    }

    pub fn declare_classical(&mut self, tag: &str, labels: &[&str]) {
        let entry = self.tags.entry(tag.to_string()).or_default();
        entry
            .classical
            .extend(labels.iter().map(|s| s.to_string()));
    }

    pub fn declare_cq(&mut self, tag: &str, class_label: &str, components: CqComponents) {
        let entry = self.tags.entry(tag.to_string()).or_default();
        entry.cq = Some(CqDecl { class_label: class_label.to_string(), components });
        entry.classical.insert(class_label.to_string());
    }

    pub fn declare_fact(&mut self, fact: Coefficient) {
        self.facts.push(fact);
    }

    pub fn declare_named(&mut self, d: NamedDecl) {
        self.named.push(d);
    }

    pub fn is_pure_named(&self, name: &str) -> bool {
        self.named
            .iter()
            .any(|d| matches!(d, NamedDecl::Pure { name: n } if n == name))
    }

    pub fn application_result(&self, name: &str, test: &str) -> Option<&str> {
        self.named.iter().find_map(|d| match d {
            NamedDecl::Application { name: n, test: t, result } if n == name && t == test => {
                Some(result.as_str())
            }
            _ => None,
        })
    }

    pub fn composition(&self, inner: &str, outer: &str) -> Option<(&Option<String>, &str)> {
        self.named.iter().find_map(|d| match d {
            NamedDecl::Composition { inner: i, outer: o, mid, composed } if i == inner && o == outer => {
                Some((mid, composed.as_str()))
            }
            _ => None,
        })
    }

    pub fn has_reduction(&self, from: &ResourceSymbol, to: &ResourceSymbol) -> bool {
        self.named.iter().any(
            |d| matches!(d, NamedDecl::Reduction { from: f, to: t } if f == from && t == to),
        )
    }

    /// Canonical representative of a subset entropy H(S) on `tag`, reduced by
    /// declared purity. Returns None when the entropy is identically zero.
    pub fn canonical_subset(&self, tag: &str, s: &BTreeSet<Label>) -> Option<BTreeSet<Label>> {
        if s.is_empty() {
            return None;
        }
        let Some(tc) = self.tags.get(tag) else {
            return Some(s.clone());
        };
        let mut current = s.clone();
        // iterate until no purity rule fires (families can chain)
        let mut changed = true;
        let mut guard = 0;
        while changed && guard < 8 {
            changed = false;
            guard += 1;
            for pf in &tc.pure_families {
                if !pf.given.is_subset(&current) {
                    continue;
                }
                let upart: BTreeSet<Label> = current.difference(&pf.given).cloned().collect();
                if !upart.is_subset(&pf.family) {
                    continue;
                }
                if upart == pf.family {
                    // full pure part conditioned on `given`: H = H(given)
                    if pf.given.is_empty() {
                        return None;
                    }
                    if current != pf.given {
                        current = pf.given.clone();
                        changed = true;
                    }
                    continue;
                }
                let complement: BTreeSet<Label> =
                    pf.family.difference(&upart).cloned().collect();
                let alt: BTreeSet<Label> = complement.union(&pf.given).cloned().collect();
                if subset_key(&alt) < subset_key(&current) {
                    current = alt;
                    changed = true;
                }
            }
        }
        if current.is_empty() {
            None
        } else {
            Some(current)
        }
    }

    /// Merge another context set into this one (used when instantiating an
    /// axiom's requirements into a proof's ambient contexts).
    pub fn merge(&mut self, other: &ContextSet) {
        for (tag, tc) in &other.tags {
            let entry = self.tags.entry(tag.clone()).or_default();
            for pf in &tc.pure_families {
                if !entry.pure_families.contains(pf) {
                    entry.pure_families.push(pf.clone());
                }
            }
            entry.classical.extend(tc.classical.iter().cloned());
            if entry.cq.is_none() {
                entry.cq = tc.cq.clone();
            }
        }
        for d in &other.named {
            if !self.named.contains(d) {
                self.named.push(d.clone());
            }
        }
        for f in &other.facts {
            if !self.facts.contains(f) {
                self.facts.push(f.clone());
            }
        }
    }

    /// Does this context set contain everything `required` declares?
    pub fn satisfies(&self, required: &ContextSet) -> bool {
        for (tag, tc) in &required.tags {
            let Some(have) = self.tags.get(tag) else {
                if tc.pure_families.is_empty() && tc.classical.is_empty() && tc.cq.is_none() {
                    continue;
                }
                return false;
            };
            for pf in &tc.pure_families {
                if !have.pure_families.contains(pf) {
                    return false;
                }
            }
            if !tc.classical.is_subset(&have.classical) {
                return false;
            }
            if let Some(cq) = &tc.cq {
                match &have.cq {
                    Some(h) if h.class_label == cq.class_label => {}
                    _ => return false,
                }
            }
        }
        required.named.iter().all(|d| self.named.contains(d))
    }
}

fn subset_key(s: &BTreeSet<Label>) -> (usize, String) {
    (
        s.len(),
        s.iter().cloned().collect::<Vec<_>>().join("\u{1}"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(labels: &[&str]) -> BTreeSet<Label> {
        labels.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn pure_reduction_picks_smaller_side() {
        let mut ctx = ContextSet::new();
        ctx.declare_pure("psi", &["A", "B", "E"], &[]);
        assert_eq!(
            ctx.canonical_subset("psi", &set(&["A", "B"])),
            Some(set(&["E"]))
        );
        assert_eq!(ctx.canonical_subset("psi", &set(&["A", "B", "E"])), None);
        assert_eq!(ctx.canonical_subset("psi", &set(&["A"])), Some(set(&["A"])));
    }

    #[test]
    fn conditional_purity() {
        let mut ctx = ContextSet::new();
        ctx.declare_pure("s", &["A", "B", "E"], &["X"]);
        assert_eq!(
            ctx.canonical_subset("s", &set(&["A", "B", "X"])),
            Some(set(&["E", "X"]))
        );
        assert_eq!(
            ctx.canonical_subset("s", &set(&["A", "B", "E", "X"])),
            Some(set(&["X"]))
        );
        // without X the rule does not fire
        assert_eq!(
            ctx.canonical_subset("s", &set(&["A", "B"])),
            Some(set(&["A", "B"]))
        );
    }
}
