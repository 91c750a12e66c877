//! Resource expressions: coefficient-weighted bags of resource symbols with
//! sublinear (o) and unbounded-rate (∞) parts, and inequalities between them.

use crate::coeff::{certify_nonneg, Coefficient, Rat};
use crate::context::ContextSet;
use crate::error::{CalcError, Result};
use crate::symbol::ResourceSymbol;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ResourceExpr {
    pub terms: BTreeMap<ResourceSymbol, Coefficient>,
    pub o_terms: BTreeSet<ResourceSymbol>,
    pub inf_terms: BTreeSet<ResourceSymbol>,
}

impl ResourceExpr {
    pub fn empty() -> Self {
        ResourceExpr::default()
    }

    pub fn term(sym: ResourceSymbol, coeff: Coefficient) -> Self {
        let mut e = ResourceExpr::empty();
        if !(coeff.rational.is_zero() && coeff.atoms.is_empty()) {
            e.terms.insert(sym, coeff);
        }
        e
    }

    pub fn unit(sym: ResourceSymbol) -> Self {
        Self::term(sym, Coefficient::one())
    }

    pub fn o(sym: ResourceSymbol) -> Self {
        let mut e = ResourceExpr::empty();
        e.o_terms.insert(sym);
        e
    }

    pub fn inf(sym: ResourceSymbol) -> Self {
        let mut e = ResourceExpr::empty();
        e.inf_terms.insert(sym);
        e
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty() && self.o_terms.is_empty() && self.inf_terms.is_empty()
    }

    pub fn coeff_of(&self, sym: &ResourceSymbol) -> Coefficient {
        self.terms.get(sym).cloned().unwrap_or_else(Coefficient::zero)
    }

    /// Coefficient-wise sum; o-sets and ∞-sets union.
    pub fn add(&self, other: &ResourceExpr) -> ResourceExpr {
        let mut out = self.clone();
        for (s, c) in &other.terms {
            let e = out.terms.entry(s.clone()).or_insert_with(Coefficient::zero);
            *e = e.add(c);
        }
        out.o_terms.extend(other.o_terms.iter().cloned());
        out.inf_terms.extend(other.inf_terms.iter().cloned());
        out
    }

    pub fn neg(&self) -> ResourceExpr {
        ResourceExpr {
            terms: self.terms.iter().map(|(s, c)| (s.clone(), c.neg())).collect(),
            o_terms: self.o_terms.clone(),
            inf_terms: self.inf_terms.clone(),
        }
    }

    /// Catalytic subtraction: a − b, with o-terms recorded for every symbol
    /// taken away (α − α = o α).
    pub fn sub_catalytic(&self, other: &ResourceExpr) -> ResourceExpr {
        let mut out = self.add(&other.neg());
        for s in other.terms.keys() {
            out.o_terms.insert(s.clone());
        }
        out
    }

    /// Plain arithmetic difference (used for comparisons).
    pub fn sub(&self, other: &ResourceExpr) -> ResourceExpr {
        self.add(&other.neg())
    }

    /// Scale by a coefficient. Positive scaling keeps o and ∞ parts; the
    /// scale must be nonnegativity-certified (rational ≥ 0 or whitelisted
    /// atoms, optionally discharged by declared facts); atom-valued scales
    /// require purely rational term coefficients.
    pub fn scale(&self, z: &Coefficient, facts: &[Coefficient]) -> Result<ResourceExpr> {
        if !certify_nonneg(z, facts) {
            return Err(CalcError::NegativeScale(format!("{z:?}")));
        }
        if z.rational.is_zero() && z.atoms.is_empty() {
            return Ok(ResourceExpr::empty());
        }
        let mut terms = BTreeMap::new();
        for (s, c) in &self.terms {
            let scaled = z.mul(c)?;
            terms.insert(s.clone(), scaled);
        }
        Ok(ResourceExpr {
            terms,
            o_terms: self.o_terms.clone(),
            inf_terms: self.inf_terms.clone(),
        })
    }

    pub fn symbols(&self) -> BTreeSet<ResourceSymbol> {
        let mut s: BTreeSet<ResourceSymbol> = self.terms.keys().cloned().collect();
        s.extend(self.o_terms.iter().cloned());
        s.extend(self.inf_terms.iter().cloned());
        s
    }

    pub fn substitute(
        &self,
        tag_map: &BTreeMap<String, String>,
        label_map: &BTreeMap<String, Vec<String>>,
        name_map: &BTreeMap<String, String>,
    ) -> ResourceExpr {
        let map_sym = |s: &ResourceSymbol| -> ResourceSymbol {
            match s {
                ResourceSymbol::Static { tag } => ResourceSymbol::Static {
                    tag: name_map
                        .get(tag)
                        .or_else(|| tag_map.get(tag))
                        .cloned()
                        .unwrap_or_else(|| tag.clone()),
                },
                ResourceSymbol::Dynamic { name, test } => ResourceSymbol::Dynamic {
                    name: name_map.get(name).cloned().unwrap_or_else(|| name.clone()),
                    test: test.as_ref().map(|t| {
                        name_map
                            .get(t)
                            .or_else(|| tag_map.get(t))
                            .cloned()
                            .unwrap_or_else(|| t.clone())
                    }),
                },
                ResourceSymbol::Protected { name, source } => ResourceSymbol::Protected {
                    name: name_map.get(name).cloned().unwrap_or_else(|| name.clone()),
                    source: name_map
                        .get(source)
                        .or_else(|| tag_map.get(source))
                        .cloned()
                        .unwrap_or_else(|| source.clone()),
                },
                unit => unit.clone(),
            }
        };
        let mut terms: BTreeMap<ResourceSymbol, Coefficient> = BTreeMap::new();
        for (s, c) in &self.terms {
            let ns = map_sym(s);
            let nc = c.substitute(tag_map, label_map);
            let e = terms.entry(ns).or_insert_with(Coefficient::zero);
            *e = e.add(&nc);
        }
        ResourceExpr {
            terms,
            o_terms: self.o_terms.iter().map(map_sym).collect(),
            inf_terms: self.inf_terms.iter().map(map_sym).collect(),
        }
    }
}

/// Linear relations among unit symbols with rational coefficients (each
/// expression is declared equal to zero), e.g. the coherent communication
/// identity [q→qq] − ½[q→q] − ½[q q].
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityBasis {
    pub symbol_relations: Vec<ResourceExpr>,
}

impl IdentityBasis {
    pub fn empty() -> Self {
        IdentityBasis::default()
    }

    pub fn with_relations(rels: Vec<ResourceExpr>) -> Self {
        IdentityBasis { symbol_relations: rels }
    }
}

fn pivot_symbol(rel: &ResourceExpr) -> Option<ResourceSymbol> {
    rel.terms
        .iter()
        .filter(|(_, c)| c.is_rational() && !c.rational.is_zero())
        .min_by_key(|(s, _)| (s.elimination_priority(), (*s).clone()))
        .map(|(s, _)| s.clone())
}

/// Canonical form: symbol relations eliminated, like terms merged,
/// coefficients tested against the declared identity structure, exact zeros
/// dropped, o-terms absorbed by strictly positive matching terms, ∞-absorbed
/// finite parts dropped.
pub fn normalize(e: &ResourceExpr, basis: &IdentityBasis, ctx: &ContextSet) -> ResourceExpr {
    let mut out = e.clone();
    // eliminate pivot symbols using the declared relations
    for rel in &basis.symbol_relations {
        let Some(pivot) = pivot_symbol(rel) else { continue };
        let rel_c = rel.terms.get(&pivot).expect("pivot in relation").clone();
        if let Some(c) = out.terms.get(&pivot).cloned() {
            // out := out − (c / rel_c) · rel
            let scale = c.scale_rat(&(Rat::from_integer(1.into()) / rel_c.rational.clone()));
            for (s, rc) in &rel.terms {
                let delta = match scale.mul(rc) {
                    Ok(d) => d,
                    Err(_) => continue, // atom×atom: relation not applicable
                };
                let entry = out.terms.entry(s.clone()).or_insert_with(Coefficient::zero);
                *entry = entry.sub(&delta);
            }
        }
        // o/∞ markers on the pivot follow the relation's support
        if out.o_terms.remove(&pivot) {
            for s in rel.terms.keys() {
                if *s != pivot {
                    out.o_terms.insert(s.clone());
                }
            }
        }
    }
    // drop exact zeros (modulo declared identities)
    out.terms.retain(|_, c| !c.is_zero_mod(ctx));
    // ∞ absorbs finite coefficients of the same symbol
    let inf: Vec<ResourceSymbol> = out.inf_terms.iter().cloned().collect();
    for s in inf {
        out.terms.remove(&s);
        out.o_terms.remove(&s);
    }
    // strictly positive terms absorb their own o-markers
    let absorbed: Vec<ResourceSymbol> = out
        .o_terms
        .iter()
        .filter(|s| {
            out.terms
                .get(*s)
                .map(|c| c.rational.is_positive() && c.plain_nonneg())
                .unwrap_or(false)
        })
        .cloned()
        .collect();
    for s in absorbed {
        out.o_terms.remove(&s);
    }
    out
}

/// Equality modulo normalize and the canonical coefficient embedding.
pub fn expr_eq(a: &ResourceExpr, b: &ResourceExpr, basis: &IdentityBasis, ctx: &ContextSet) -> bool {
    let na = normalize(a, basis, ctx);
    let nb = normalize(b, basis, ctx);
    if na.o_terms != nb.o_terms || na.inf_terms != nb.inf_terms {
        return false;
    }
    let syms: BTreeSet<ResourceSymbol> = na
        .terms
        .keys()
        .chain(nb.terms.keys())
        .cloned()
        .collect();
    syms.iter()
        .all(|s| na.coeff_of(s).eq_mod(&nb.coeff_of(s), ctx))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Certainty {
    Certified,
    Unknown,
}

/// a ≤ b: every coefficient of b − a certifiably ≥ 0 (whitelist plus declared
/// facts), o-terms and ∞-terms by containment, with ∞ on the b side
/// dominating any finite coefficient.
pub fn expr_leq(
    a: &ResourceExpr,
    b: &ResourceExpr,
    basis: &IdentityBasis,
    ctx: &ContextSet,
    facts: &[Coefficient],
) -> Certainty {
    let na = normalize(a, basis, ctx);
    let nb = normalize(b, basis, ctx);
    if !na.inf_terms.is_subset(&nb.inf_terms) {
        return Certainty::Unknown;
    }
    for o in &na.o_terms {
        let covered = nb.o_terms.contains(o)
            || nb.inf_terms.contains(o)
            || nb
                .terms
                .get(o)
                .map(|c| c.rational.is_positive() && c.plain_nonneg())
                .unwrap_or(false);
        if !covered {
            return Certainty::Unknown;
        }
    }
    let syms: BTreeSet<ResourceSymbol> = na
        .terms
        .keys()
        .chain(nb.terms.keys())
        .cloned()
        .collect();
    for s in syms {
        if nb.inf_terms.contains(&s) {
            continue;
        }
        let diff = nb.coeff_of(&s).sub(&na.coeff_of(&s));
        if diff.is_zero_mod(ctx) {
            continue;
        }
        if !certify_nonneg(&diff, facts) {
            return Certainty::Unknown;
        }
    }
    Certainty::Certified
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Relation {
    Geq,
    Eq,
    GeqS,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    Lhs,
    Rhs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DecouplingFlag {
    Incoherent,
    Coherent,
}

/// A resource inequality: lhs ≥ rhs (or =, or the source-coding ≥s), with
/// per-term decoupling annotations on classical resources.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ResourceInequality {
    pub lhs: ResourceExpr,
    pub rhs: ResourceExpr,
    pub relation: Relation,
    pub flags: BTreeMap<(Side, ResourceSymbol), DecouplingFlag>,
}

impl Default for Relation {
    fn default() -> Self {
        Relation::Geq
    }
}

impl ResourceInequality {
    pub fn new(lhs: ResourceExpr, relation: Relation, rhs: ResourceExpr) -> Result<Self> {
        let ri = ResourceInequality { lhs, rhs, relation, flags: BTreeMap::new() };
        ri.validate()?;
        Ok(ri)
    }

    pub fn with_flag(mut self, side: Side, sym: ResourceSymbol, flag: DecouplingFlag) -> Result<Self> {
        if !sym.is_classical_unit() {
            return Err(CalcError::Malformed(
                "decoupling flags only attach to classical resources".into(),
            ));
        }
        self.flags.insert((side, sym), flag);
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.relation == Relation::GeqS {
            let has_protected = self
                .lhs
                .symbols()
                .iter()
                .chain(self.rhs.symbols().iter())
                .any(|s| s.is_protected());
            if !has_protected {
                return Err(CalcError::Malformed(
                    "≥s requires a protected resource".into(),
                ));
            }
        }
        for ((_, sym), _) in &self.flags {
            if !sym.is_classical_unit() {
                return Err(CalcError::Malformed(
                    "decoupling flags only attach to classical resources".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn normalized(&self, basis: &IdentityBasis, ctx: &ContextSet) -> ResourceInequality {
        ResourceInequality {
            lhs: normalize(&self.lhs, basis, ctx),
            rhs: normalize(&self.rhs, basis, ctx),
            relation: self.relation,
            flags: self.flags.clone(),
        }
    }

    /// Equality modulo normalize; flags must agree exactly.
    pub fn eq_mod(&self, other: &ResourceInequality, basis: &IdentityBasis, ctx: &ContextSet) -> bool {
        self.relation == other.relation
            && self.flags == other.flags
            && expr_eq(&self.lhs, &other.lhs, basis, ctx)
            && expr_eq(&self.rhs, &other.rhs, basis, ctx)
    }

    pub fn substitute(
        &self,
        tag_map: &BTreeMap<String, String>,
        label_map: &BTreeMap<String, Vec<String>>,
        name_map: &BTreeMap<String, String>,
    ) -> ResourceInequality {
        ResourceInequality {
            lhs: self.lhs.substitute(tag_map, label_map, name_map),
            rhs: self.rhs.substitute(tag_map, label_map, name_map),
            relation: self.relation,
            flags: self.flags.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::rat;

    fn ccc_relation() -> ResourceExpr {
        // [q→qq] − ½[q→q] − ½[q q]
        ResourceExpr::unit(ResourceSymbol::Cobit)
            .add(&ResourceExpr::term(
                ResourceSymbol::Qubit,
                Coefficient::from_rat(rat(-1, 2)),
            ))
            .add(&ResourceExpr::term(
                ResourceSymbol::Ebit,
                Coefficient::from_rat(rat(-1, 2)),
            ))
    }

    #[test]
    fn ccc_reduces_to_zero_in_basis() {
        let basis = IdentityBasis::with_relations(vec![ccc_relation()]);
        let ctx = ContextSet::new();
        let n = normalize(&ccc_relation(), &basis, &ctx);
        assert!(n.is_empty(), "{n:?}");
    }

    #[test]
    fn catalytic_subtraction_leaves_o() {
        let ctx = ContextSet::new();
        let basis = IdentityBasis::empty();
        let a = ResourceExpr::unit(ResourceSymbol::Ebit);
        let diff = normalize(&a.sub_catalytic(&a), &basis, &ctx);
        assert!(diff.terms.is_empty());
        assert!(diff.o_terms.contains(&ResourceSymbol::Ebit));
    }

    #[test]
    fn o_absorption_under_addition() {
        let a = ResourceExpr::o(ResourceSymbol::Ebit);
        let sum = a.add(&a);
        assert_eq!(sum.o_terms.len(), 1);
    }

    #[test]
    fn scale_by_zero_gives_empty() {
        let a = ResourceExpr::unit(ResourceSymbol::Qubit);
        let z = Coefficient::zero();
        assert!(a.scale(&z, &[]).unwrap().is_empty());
    }

    #[test]
    fn scale_degree_guard() {
        let atom = crate::atom::EntropicAtom::h(&["A"], "s");
        let a = ResourceExpr::term(
            ResourceSymbol::Qubit,
            Coefficient::from_atom(atom.clone()),
        );
        let z = Coefficient::from_atom(atom);
        assert!(matches!(a.scale(&z, &[]), Err(CalcError::DegreeOverflow)));
    }

    #[test]
    fn leq_needs_rule_for_distinct_symbols() {
        let ctx = ContextSet::new();
        let basis = IdentityBasis::empty();
        let cbit = ResourceExpr::unit(ResourceSymbol::Cbit);
        let qubit = ResourceExpr::unit(ResourceSymbol::Qubit);
        assert_eq!(
            expr_leq(&cbit, &qubit, &basis, &ctx, &[]),
            Certainty::Unknown
        );
        assert_eq!(
            expr_leq(&cbit, &cbit, &basis, &ctx, &[]),
            Certainty::Certified
        );
    }

    #[test]
    fn leq_with_declared_fact() {
        // 1[q q] ≤ H(A)[q q] only with the declared fact H(A) ≥ 1
        let ctx = ContextSet::new();
        let basis = IdentityBasis::empty();
        let ha = crate::atom::EntropicAtom::h(&["A"], "s");
        let lhs = ResourceExpr::unit(ResourceSymbol::Ebit);
        let rhs = ResourceExpr::term(ResourceSymbol::Ebit, Coefficient::from_atom(ha.clone()));
        assert_eq!(expr_leq(&lhs, &rhs, &basis, &ctx, &[]), Certainty::Unknown);
        let fact = Coefficient::from_atom(ha).add(&Coefficient::from_rat(rat(-1, 1)));
        assert_eq!(
            expr_leq(&lhs, &rhs, &basis, &ctx, &[fact]),
            Certainty::Certified
        );
    }
}
