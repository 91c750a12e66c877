//! Numeric evaluation: bind every state tag to a concrete state and turn
//! symbolic coefficients into reals through the entropy backend.

use crate::error::Result;
use crate::expr::{ResourceExpr, ResourceInequality};
use crate::symbol::ResourceSymbol;
use qsc_core::StateSpec;
use std::collections::BTreeMap;

pub type Bindings = BTreeMap<String, StateSpec>;

#[derive(Clone, Debug)]
pub struct EvaluatedExpr {
    pub terms: Vec<(ResourceSymbol, f64)>,
    pub o_terms: Vec<ResourceSymbol>,
    pub inf_terms: Vec<ResourceSymbol>,
}

pub fn evaluate(e: &ResourceExpr, bindings: &Bindings) -> Result<EvaluatedExpr> {
    let mut terms = Vec::new();
    for (s, c) in &e.terms {
        terms.push((s.clone(), c.evaluate(bindings)?));
    }
    Ok(EvaluatedExpr {
        terms,
        o_terms: e.o_terms.iter().cloned().collect(),
        inf_terms: e.inf_terms.iter().cloned().collect(),
    })
}

pub fn evaluate_ri(
    ri: &ResourceInequality,
    bindings: &Bindings,
) -> Result<(EvaluatedExpr, EvaluatedExpr)> {
    Ok((evaluate(&ri.lhs, bindings)?, evaluate(&ri.rhs, bindings)?))
}

/// Largest absolute per-symbol difference of evaluated coefficients between
/// two expressions (used by the numeric replay of symbolic identities).
pub fn numeric_gap(
    a: &ResourceExpr,
    b: &ResourceExpr,
    bindings: &Bindings,
) -> Result<f64> {
    let mut gap = 0.0f64;
    let syms: std::collections::BTreeSet<ResourceSymbol> =
        a.terms.keys().chain(b.terms.keys()).cloned().collect();
    for s in syms {
        let va = a.coeff_of(&s).evaluate(bindings)?;
        let vb = b.coeff_of(&s).evaluate(bindings)?;
        gap = gap.max((va - vb).abs());
    }
    Ok(gap)
}
