//! Scalar coefficients: an exact rational plus an exact-rational linear
//! combination of entropic atoms. Equality is decided through the canonical
//! subset-entropy embedding, so declared purity identities are built in.

use crate::atom::{EntropicAtom, Label};
use crate::context::ContextSet;
use crate::error::{CalcError, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::{BTreeMap, BTreeSet};

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    BigRational::from(BigInt::from(n))
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Coefficient {
    pub rational: Rat,
    pub atoms: BTreeMap<EntropicAtom, Rat>,
}

impl Coefficient {
    pub fn zero() -> Self {
        Coefficient::default()
    }

    pub fn one() -> Self {
        Coefficient { rational: Rat::one(), atoms: BTreeMap::new() }
    }

    pub fn from_rat(r: Rat) -> Self {
        Coefficient { rational: r, atoms: BTreeMap::new() }
    }

    pub fn from_atom(a: EntropicAtom) -> Self {
        let mut atoms = BTreeMap::new();
        atoms.insert(a, Rat::one());
        Coefficient { rational: Rat::zero(), atoms }
    }

    pub fn atom_scaled(a: EntropicAtom, r: Rat) -> Self {
        let mut atoms = BTreeMap::new();
        if !r.is_zero() {
            atoms.insert(a, r);
        }
        Coefficient { rational: Rat::zero(), atoms }
    }

    pub fn is_rational(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn add(&self, other: &Coefficient) -> Coefficient {
        let mut out = self.clone();
        out.rational += &other.rational;
        for (a, r) in &other.atoms {
            let e = out.atoms.entry(a.clone()).or_insert_with(Rat::zero);
            *e += r;
            if e.is_zero() {
                out.atoms.remove(a);
            }
        }
        out
    }

    pub fn neg(&self) -> Coefficient {
        Coefficient {
            rational: -self.rational.clone(),
            atoms: self.atoms.iter().map(|(a, r)| (a.clone(), -r.clone())).collect(),
        }
    }

    pub fn sub(&self, other: &Coefficient) -> Coefficient {
        self.add(&other.neg())
    }

    pub fn scale_rat(&self, z: &Rat) -> Coefficient {
        if z.is_zero() {
            return Coefficient::zero();
        }
        Coefficient {
            rational: &self.rational * z,
            atoms: self.atoms.iter().map(|(a, r)| (a.clone(), r * z)).collect(),
        }
    }

    /// Product, guarded against atom × atom (degree overflow).
    pub fn mul(&self, other: &Coefficient) -> Result<Coefficient> {
        if !self.atoms.is_empty() && !other.atoms.is_empty() {
            return Err(CalcError::DegreeOverflow);
        }
        if self.atoms.is_empty() {
            Ok(other.scale_rat(&self.rational))
        } else {
            Ok(self.scale_rat(&other.rational))
        }
    }

    /// Canonical subset-entropy coordinates modulo declared purity identities.
    pub fn canonical(&self, ctx: &ContextSet) -> CanonicalCoeff {
        let mut prim: BTreeMap<(String, BTreeSet<Label>), Rat> = BTreeMap::new();
        for (atom, weight) in &self.atoms {
            for (subset, w) in atom.primitive_terms() {
                if let Some(canon) = ctx.canonical_subset(&atom.tag, &subset) {
                    let e = prim
                        .entry((atom.tag.clone(), canon))
                        .or_insert_with(Rat::zero);
                    *e += weight * rat_int(w);
                }
            }
        }
        prim.retain(|_, v| !v.is_zero());
        CanonicalCoeff { rational: self.rational.clone(), prim }
    }

    pub fn is_zero_mod(&self, ctx: &ContextSet) -> bool {
        let c = self.canonical(ctx);
        c.rational.is_zero() && c.prim.is_empty()
    }

    pub fn eq_mod(&self, other: &Coefficient, ctx: &ContextSet) -> bool {
        self.sub(other).is_zero_mod(ctx)
    }

    /// Plain syntactic nonnegativity certificate: rational part ≥ 0 and every
    /// atom whitelisted with a nonnegative weight.
    pub fn plain_nonneg(&self) -> bool {
        !self.rational.is_negative()
            && self
                .atoms
                .iter()
                .all(|(a, r)| a.is_whitelisted() && !r.is_negative())
    }

    /// Apply substitutions to all atoms (tags and labels).
    pub fn substitute(
        &self,
        tag_map: &BTreeMap<String, String>,
        label_map: &BTreeMap<String, Vec<String>>,
    ) -> Coefficient {
        let mut atoms: BTreeMap<EntropicAtom, Rat> = BTreeMap::new();
        for (a, r) in &self.atoms {
            let mut a = a.map_labels(label_map);
            if let Some(t) = tag_map.get(&a.tag) {
                a = a.with_tag(t);
            }
            let e = atoms.entry(a).or_insert_with(Rat::zero);
            *e += r;
        }
        atoms.retain(|_, v| !v.is_zero());
        Coefficient { rational: self.rational.clone(), atoms }
    }

    /// Condition every atom on a classical label (used by the convex-split
    /// rule: conditioning on classical systems amounts to averaging).
    pub fn conditioned_on(&self, x: &str) -> Coefficient {
        let mut atoms: BTreeMap<EntropicAtom, Rat> = BTreeMap::new();
        for (a, r) in &self.atoms {
            let e = atoms.entry(a.conditioned_on(x)).or_insert_with(Rat::zero);
            *e += r;
        }
        atoms.retain(|_, v| !v.is_zero());
        Coefficient { rational: self.rational.clone(), atoms }
    }

    pub fn rat_to_f64(r: &Rat) -> f64 {
        let n = r.numer();
        let d = r.denom();
        // exact enough for the magnitudes in play
        let nf: f64 = n.to_string().parse().unwrap_or(f64::NAN);
        let df: f64 = d.to_string().parse().unwrap_or(f64::NAN);
        nf / df
    }

    /// Numeric value under bindings of every tag to a concrete state.
    pub fn evaluate(
        &self,
        bindings: &BTreeMap<String, qsc_core::StateSpec>,
    ) -> Result<f64> {
        let mut total = Self::rat_to_f64(&self.rational);
        for (atom, weight) in &self.atoms {
            let state = bindings
                .get(&atom.tag)
                .ok_or_else(|| CalcError::UnboundTag(atom.tag.clone()))?;
            let g: Vec<Vec<&str>> = atom
                .groups
                .iter()
                .map(|grp| grp.iter().map(|l| l.as_str()).collect())
                .collect();
            use crate::atom::AtomKind::*;
            let v = match atom.kind {
                H => qsc_core::info::h(state, &g[0])?,
                Hcond => qsc_core::info::h_cond(state, &g[0], &g[1])?,
                Imutual => qsc_core::info::mutual(state, &g[0], &g[1])?,
                Icoh => qsc_core::info::coherent(state, &g[0], &g[1])?,
                Icmi => qsc_core::info::cond_mutual(state, &g[0], &g[1], &g[2])?,
            };
            total += Self::rat_to_f64(weight) * v;
        }
        Ok(total)
    }
}

/// Canonical coordinates: rational part plus subset-entropy weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalCoeff {
    pub rational: Rat,
    pub prim: BTreeMap<(String, BTreeSet<Label>), Rat>,
}

/// Certify `c ≥ 0` using the whitelist plus declared facts (each fact is a
/// coefficient declared ≥ 0). Solves exactly for nonnegative fact multipliers
/// that cancel the non-whitelisted and negative content, then checks the
/// remainder syntactically. Sound; complete for fact sets shaped like the
/// derivations use.
pub fn certify_nonneg(c: &Coefficient, facts: &[Coefficient]) -> bool {
    if c.plain_nonneg() {
        return true;
    }
    if facts.is_empty() {
        return false;
    }
    // keys that must be matched exactly: non-whitelisted atoms anywhere,
    // plus entries of c that are negative
    #[derive(PartialEq, Eq, PartialOrd, Ord, Clone)]
    enum Key {
        Unit,
        Atom(EntropicAtom),
    }
    let mut rows: BTreeSet<Key> = BTreeSet::new();
    for (a, _) in c.atoms.iter().filter(|(a, _)| !a.is_whitelisted()) {
        rows.insert(Key::Atom(a.clone()));
    }
    for f in facts {
        for (a, _) in f.atoms.iter().filter(|(a, _)| !a.is_whitelisted()) {
            rows.insert(Key::Atom(a.clone()));
        }
    }
    if c.rational.is_negative() {
        rows.insert(Key::Unit);
    }
    for (a, r) in &c.atoms {
        if r.is_negative() {
            rows.insert(Key::Atom(a.clone()));
        }
    }
    let rows: Vec<Key> = rows.into_iter().collect();
    let get = |co: &Coefficient, k: &Key| -> Rat {
        match k {
            Key::Unit => co.rational.clone(),
            Key::Atom(a) => co.atoms.get(a).cloned().unwrap_or_else(Rat::zero),
        }
    };
    // Solve Σ_j λ_j f_j[row] = c[row] by exact Gaussian elimination,
    // free variables pinned to zero.
    let m = rows.len();
    let n = facts.len();
    let mut aug: Vec<Vec<Rat>> = (0..m)
        .map(|i| {
            let mut row: Vec<Rat> = (0..n).map(|j| get(&facts[j], &rows[i])).collect();
            row.push(get(c, &rows[i]));
            row
        })
        .collect();
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; n];
    let mut rank = 0usize;
    for col in 0..n {
        let Some(p) = (rank..m).find(|&r| !aug[r][col].is_zero()) else {
            continue;
        };
        aug.swap(rank, p);
        let inv = aug[rank][col].clone();
        for v in aug[rank].iter_mut() {
            *v /= inv.clone();
        }
        for r in 0..m {
            if r != rank && !aug[r][col].is_zero() {
                let f = aug[r][col].clone();
                for cc in 0..=n {
                    let sub = &aug[rank][cc] * &f;
                    aug[r][cc] -= sub;
                }
            }
        }
        pivot_of_col[col] = Some(rank);
        rank += 1;
        if rank == m {
            break;
        }
    }
    // inconsistent?
    for r in rank..m {
        if !aug[r][n].is_zero() {
            return false;
        }
    }
    let mut lambda: Vec<Rat> = vec![Rat::zero(); n];
    for col in 0..n {
        if let Some(p) = pivot_of_col[col] {
            lambda[col] = aug[p][n].clone();
        }
    }
    if lambda.iter().any(|l| l.is_negative()) {
        return false;
    }
    let mut remainder = c.clone();
    for (j, l) in lambda.iter().enumerate() {
        if !l.is_zero() {
            remainder = remainder.sub(&facts[j].scale_rat(l));
        }
    }
    remainder.plain_nonneg()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::ContextSet;

    #[test]
    fn pure_identity_reduces_to_zero() {
        // H(A) − ½I(A;B) − ½I(A;E) = 0 on a pure ABE state
        let mut ctx = ContextSet::new();
        ctx.declare_pure("psi", &["A", "B", "E"], &[]);
        let c = Coefficient::from_atom(EntropicAtom::h(&["A"], "psi"))
            .sub(&Coefficient::atom_scaled(
                EntropicAtom::mutual(&["A"], &["B"], "psi"),
                rat(1, 2),
            ))
            .sub(&Coefficient::atom_scaled(
                EntropicAtom::mutual(&["A"], &["E"], "psi"),
                rat(1, 2),
            ));
        assert!(c.is_zero_mod(&ctx));
        // but not without the purity declaration
        let empty = ContextSet::new();
        assert!(!c.is_zero_mod(&empty));
    }

    #[test]
    fn coherent_information_identity() {
        // I(A⟩B) = ½I(A;B) − ½I(A;E) under purity
        let mut ctx = ContextSet::new();
        ctx.declare_pure("psi", &["A", "B", "E"], &[]);
        let lhs = Coefficient::from_atom(EntropicAtom::coherent(&["A"], &["B"], "psi"));
        let rhs = Coefficient::atom_scaled(EntropicAtom::mutual(&["A"], &["B"], "psi"), rat(1, 2))
            .sub(&Coefficient::atom_scaled(
                EntropicAtom::mutual(&["A"], &["E"], "psi"),
                rat(1, 2),
            ));
        assert!(lhs.eq_mod(&rhs, &ctx));
    }

    #[test]
    fn certify_with_fact() {
        // ½ I(R;E) − ¼ ≥ 0 given the fact I(R;E) − 1 ≥ 0
        let ire = EntropicAtom::mutual(&["R"], &["E"], "s");
        let c = Coefficient::atom_scaled(ire.clone(), rat(1, 2)).add(&Coefficient::from_rat(rat(-1, 4)));
        let fact = Coefficient::from_atom(ire).add(&Coefficient::from_rat(rat(-1, 1)));
        assert!(!certify_nonneg(&c, &[]));
        assert!(certify_nonneg(&c, &[fact]));
    }

    #[test]
    fn certify_icoh_needs_fact() {
        let icoh = EntropicAtom::coherent(&["A"], &["B"], "s");
        let c = Coefficient::from_atom(icoh.clone());
        assert!(!certify_nonneg(&c, &[]));
        let fact = Coefficient::from_atom(icoh);
        assert!(certify_nonneg(&c, &[fact]));
    }
}
