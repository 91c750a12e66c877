//! The rule engine: each derivation step names a rule, premises and an
//! instantiation; the checker recomputes the conclusion and never trusts it.

use crate::axioms::AxiomDb;
use crate::coeff::{certify_nonneg, Coefficient, Rat};
use crate::context::{ContextSet, CqComponents, NamedDecl};
use crate::error::{CalcError, Result};
use crate::expr::{
    expr_eq, normalize, Certainty, DecouplingFlag, IdentityBasis, Relation, ResourceExpr,
    ResourceInequality, Side,
};
use crate::grammar::{parse_coeff, parse_expr, parse_rat};
use crate::symbol::ResourceSymbol;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleKind {
    Axiom,
    Lemma,
    Reflexivity,
    Transitivity,
    Addition,
    Scale,
    Weaken,
    Cancel,
    ORemoval,
    Closure,
    RecycleRandomness,
    Derandomize,
    RuleI,
    RuleO,
    IncoherentRuleI,
    Absolutize,
    Relativize,
    ConvexSplit,
    SourceFake,
    ImproperToProper,
    ProperToImproper,
    EqualitySubstitution,
    EqualityIntro,
}

impl RuleKind {
    pub fn name(&self) -> &'static str {
        match self {
            RuleKind::Axiom => "axiom",
            RuleKind::Lemma => "lemma",
            RuleKind::Reflexivity => "reflexivity",
            RuleKind::Transitivity => "transitivity",
            RuleKind::Addition => "addition",
            RuleKind::Scale => "scale",
            RuleKind::Weaken => "weaken",
            RuleKind::Cancel => "cancel",
            RuleKind::ORemoval => "o-removal",
            RuleKind::Closure => "closure",
            RuleKind::RecycleRandomness => "recycle-randomness",
            RuleKind::Derandomize => "derandomize",
            RuleKind::RuleI => "rule-i",
            RuleKind::RuleO => "rule-o",
            RuleKind::IncoherentRuleI => "incoherent-rule-i",
            RuleKind::Absolutize => "absolutize",
            RuleKind::Relativize => "relativize",
            RuleKind::ConvexSplit => "convex-split",
            RuleKind::SourceFake => "source-fake",
            RuleKind::ImproperToProper => "improper-to-proper",
            RuleKind::ProperToImproper => "proper-to-improper",
            RuleKind::EqualitySubstitution => "equality-substitution",
            RuleKind::EqualityIntro => "equality-intro",
        }
    }

    pub fn parse(s: &str) -> Result<RuleKind> {
        use RuleKind::*;
        Ok(match s {
            "axiom" => Axiom,
            "lemma" => Lemma,
            "reflexivity" => Reflexivity,
            "transitivity" => Transitivity,
            "addition" => Addition,
            "scale" => Scale,
            "weaken" => Weaken,
            "cancel" => Cancel,
            "o-removal" => ORemoval,
            "closure" => Closure,
            "recycle-randomness" => RecycleRandomness,
            "derandomize" => Derandomize,
            "rule-i" => RuleI,
            "rule-o" => RuleO,
            "incoherent-rule-i" => IncoherentRuleI,
            "absolutize" => Absolutize,
            "relativize" => Relativize,
            "convex-split" => ConvexSplit,
            "source-fake" => SourceFake,
            "improper-to-proper" => ImproperToProper,
            "proper-to-improper" => ProperToImproper,
            "equality-substitution" => EqualitySubstitution,
            "equality-intro" => EqualityIntro,
            other => return Err(CalcError::SchemaMismatch(format!("unknown rule `{other}`"))),
        })
    }
}

/// Stringly-typed instantiation payload; every rule validates the fields it
/// reads. Serializes as a flat JSON object.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instantiation(pub BTreeMap<String, String>);

impl Instantiation {
    pub fn new() -> Self {
        Instantiation::default()
    }

    pub fn set(mut self, key: &str, value: &str) -> Self {
        self.0.insert(key.to_string(), value.to_string());
        self
    }

    fn get(&self, key: &str) -> Result<&str> {
        self.0
            .get(key)
            .map(|s| s.as_str())
            .ok_or_else(|| CalcError::SchemaMismatch(format!("missing instantiation field `{key}`")))
    }

    fn get_opt(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(|s| s.as_str())
    }

    fn get_expr(&self, key: &str) -> Result<ResourceExpr> {
        parse_expr(self.get(key)?)
    }

    fn get_coeff(&self, key: &str) -> Result<Coefficient> {
        parse_coeff(self.get(key)?)
    }

    fn get_rat(&self, key: &str) -> Result<Rat> {
        parse_rat(self.get(key)?)
    }

    fn get_symbol(&self, key: &str) -> Result<ResourceSymbol> {
        let e = self.get_expr(key)?;
        let syms = e.symbols();
        if syms.len() != 1 {
            return Err(CalcError::SchemaMismatch(format!(
                "`{key}` must name exactly one symbol"
            )));
        }
        Ok(syms.into_iter().next().unwrap())
    }

    /// "a=b;c=d" maps.
    fn get_map(&self, key: &str) -> BTreeMap<String, String> {
        let mut out = BTreeMap::new();
        if let Some(text) = self.get_opt(key) {
            for entry in text.split(';') {
                if let Some((k, v)) = entry.split_once('=') {
                    out.insert(k.trim().to_string(), v.trim().to_string());
                }
            }
        }
        out
    }

    /// "a=b c;d=e" multi-target label maps.
    fn get_label_map(&self, key: &str) -> BTreeMap<String, Vec<String>> {
        let mut out = BTreeMap::new();
        if let Some(text) = self.get_opt(key) {
            for entry in text.split(';') {
                if let Some((k, v)) = entry.split_once('=') {
                    let targets: Vec<String> = v
                        .split_whitespace()
                        .map(|s| s.trim().to_string())
                        .filter(|s| !s.is_empty())
                        .collect();
                    out.insert(k.trim().to_string(), targets);
                }
            }
        }
        out
    }
}

fn require(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(CalcError::SchemaMismatch(msg.to_string()))
    }
}

fn positive_rat(r: &Rat, name: &str) -> Result<()> {
    if r.is_positive() {
        Ok(())
    } else {
        Err(CalcError::SchemaMismatch(format!("`{name}` must be positive")))
    }
}

/// Per-symbol certified a ≤ b (with o/∞ containment), used by weaken.
fn expr_dominates(
    small: &ResourceExpr,
    big: &ResourceExpr,
    basis: &IdentityBasis,
    ctx: &ContextSet,
) -> bool {
    crate::expr::expr_leq(small, big, basis, ctx, &ctx.facts) == Certainty::Certified
}

/// Check that `gamma` is termwise contained in `e` (certified difference).
fn contains_certified(e: &ResourceExpr, gamma: &ResourceExpr, ctx: &ContextSet) -> Result<()> {
    for (s, c) in &gamma.terms {
        let diff = e.coeff_of(s).sub(c);
        if diff.is_zero_mod(ctx) {
            continue;
        }
        if !certify_nonneg(&diff, &ctx.facts) {
            return Err(CalcError::SchemaMismatch(format!(
                "expression does not certifiably contain the term for {s:?}"
            )));
        }
    }
    require(gamma.o_terms.is_empty() && gamma.inf_terms.is_empty(), "gamma must be finite")?;
    Ok(())
}

fn no_geqs(premise: &ResourceInequality, rule: &str) -> Result<()> {
    require(
        premise.relation != Relation::GeqS,
        &format!("{rule} does not apply to source-coding inequalities"),
    )
}

pub fn apply_rule(
    db: &AxiomDb,
    ctx: &ContextSet,
    basis: &IdentityBasis,
    kind: RuleKind,
    premises: &[&ResourceInequality],
    inst: &Instantiation,
) -> Result<ResourceInequality> {
    let arity = |n: usize| -> Result<()> {
        require(
            premises.len() == n,
            &format!("{} expects {n} premise(s), got {}", kind.name(), premises.len()),
        )
    };
    match kind {
        RuleKind::Axiom => {
            arity(0)?;
            let axiom = db.lookup(inst.get("axiom")?)?;
            let tag_map = inst.get_map("tags");
            let name_map = inst.get_map("names");
            let label_map = inst.get_label_map("labels");
            let ri = axiom.ri.substitute(&tag_map, &label_map, &name_map);
            // the proof's contexts must declare the instantiated requirements
            let required = substitute_contexts(&axiom.contexts, &tag_map, &label_map, &name_map);
            require(
                ctx.satisfies(&required),
                &format!("contexts do not satisfy axiom `{}` requirements", axiom.name),
            )?;
            Ok(ri)
        }
        RuleKind::Lemma => {
            // conclusion of a named builtin derivation; verified separately
            arity(0)?;
            let name = inst.get("name")?;
            let proof = crate::builtins::builtin(name)
                .ok_or_else(|| CalcError::UnknownAxiom(name.to_string()))?;
            require(
                ctx.satisfies(&proof.contexts),
                &format!("contexts do not satisfy lemma `{name}` requirements"),
            )?;
            Ok(proof.target.clone())
        }
        RuleKind::Reflexivity => {
            arity(0)?;
            let e = inst.get_expr("expr")?;
            ResourceInequality::new(e.clone(), Relation::Geq, e)
        }
        RuleKind::Transitivity => {
            arity(2)?;
            let (p1, p2) = (premises[0], premises[1]);
            no_geqs(p1, "transitivity")?;
            no_geqs(p2, "transitivity")?;
            require(
                expr_eq(&p1.rhs, &p2.lhs, basis, ctx),
                "middle expressions do not match",
            )?;
            let rel = if p1.relation == Relation::Eq && p2.relation == Relation::Eq {
                Relation::Eq
            } else {
                Relation::Geq
            };
            ResourceInequality::new(p1.lhs.clone(), rel, p2.rhs.clone())
        }
        RuleKind::Addition => {
            arity(2)?;
            let (p1, p2) = (premises[0], premises[1]);
            no_geqs(p1, "addition")?;
            no_geqs(p2, "addition")?;
            let rel = if p1.relation == Relation::Eq && p2.relation == Relation::Eq {
                Relation::Eq
            } else {
                Relation::Geq
            };
            ResourceInequality::new(p1.lhs.add(&p2.lhs), rel, p1.rhs.add(&p2.rhs))
        }
        RuleKind::Scale => {
            arity(1)?;
            let p = premises[0];
            no_geqs(p, "scale")?;
            let z = inst.get_coeff("coeff")?;
            let lhs = p.lhs.scale(&z, &ctx.facts)?;
            let rhs = p.rhs.scale(&z, &ctx.facts)?;
            ResourceInequality::new(lhs, p.relation, rhs)
        }
        RuleKind::Weaken => {
            arity(1)?;
            let p = premises[0];
            no_geqs(p, "weaken")?;
            let lhs = match inst.get_opt("lhs") {
                Some(text) => parse_expr(text)?,
                None => p.lhs.clone(),
            };
            let rhs = match inst.get_opt("rhs") {
                Some(text) => parse_expr(text)?,
                None => p.rhs.clone(),
            };
            require(
                expr_dominates(&p.lhs, &lhs, basis, ctx),
                "new left side is not certifiably larger",
            )?;
            require(
                expr_dominates(&rhs, &p.rhs, basis, ctx),
                "new right side is not certifiably smaller",
            )?;
            ResourceInequality::new(lhs, Relation::Geq, rhs)
        }
        RuleKind::Cancel => {
            arity(1)?;
            let p = premises[0];
            no_geqs(p, "cancel")?;
            require(p.relation == Relation::Geq, "cancel applies to >=")?;
            let gamma = inst.get_expr("gamma")?;
            contains_certified(&p.lhs, &gamma, ctx)?;
            let lhs = p.lhs.sub_catalytic(&gamma);
            let rhs = p.rhs.sub(&gamma);
            ResourceInequality::new(
                normalize(&lhs, basis, ctx),
                Relation::Geq,
                normalize(&rhs, basis, ctx),
            )
        }
        RuleKind::ORemoval => {
            arity(2)?;
            let (p1, p2) = (premises[0], premises[1]);
            let sym = inst.get_symbol("symbol")?;
            let z = inst.get_rat("z")?;
            let q = inst.get_rat("q")?;
            positive_rat(&z, "z")?;
            positive_rat(&q, "q")?;
            require(
                p1.lhs.o_terms.contains(&sym),
                "premise has no matching o-term",
            )?;
            let mut alpha = p1.lhs.clone();
            alpha.o_terms.remove(&sym);
            // side premise: z·α ≥ q·sym
            no_geqs(p2, "the o-removal side premise")?;
            let scaled = alpha.scale(&Coefficient::from_rat(z), &ctx.facts)?;
            require(
                expr_eq(&p2.lhs, &scaled, basis, ctx),
                "side premise left side is not z times the main expression",
            )?;
            let want_rhs = ResourceExpr::term(sym, Coefficient::from_rat(q));
            require(
                expr_eq(&p2.rhs, &want_rhs, basis, ctx),
                "side premise right side is not a positive amount of the o-term resource",
            )?;
            ResourceInequality::new(alpha, p1.relation, p1.rhs.clone())
        }
        RuleKind::Closure => {
            arity(1)?;
            let p = premises[0];
            let sym = inst.get_symbol("symbol")?;
            let margin = inst.get_rat("margin")?;
            positive_rat(&margin, "margin")?;
            require(
                p.lhs.o_terms.contains(&sym),
                "premise has no matching o-term",
            )?;
            let mut alpha = p.lhs.clone();
            alpha.o_terms.remove(&sym);
            let have = alpha.coeff_of(&sym).sub(&Coefficient::from_rat(margin));
            require(
                certify_nonneg(&have, &ctx.facts),
                "the o-term symbol is not already supplied with positive rate",
            )?;
            ResourceInequality::new(alpha, p.relation, p.rhs.clone())
        }
        RuleKind::RecycleRandomness => {
            arity(1)?;
            let p = premises[0];
            require(p.relation == Relation::Geq, "recycling applies to >=")?;
            let flag = p.flags.get(&(Side::Lhs, ResourceSymbol::Rbit));
            require(
                flag == Some(&DecouplingFlag::Incoherent) || flag == Some(&DecouplingFlag::Coherent),
                "common randomness is not flagged decoupled",
            )?;
            let c = p.lhs.coeff_of(&ResourceSymbol::Rbit);
            require(!c.eq_mod(&Coefficient::zero(), ctx), "no randomness term to recycle")?;
            let mut lhs = p.lhs.clone();
            lhs.terms.remove(&ResourceSymbol::Rbit);
            lhs.o_terms.insert(ResourceSymbol::Rbit);
            ResourceInequality::new(lhs, Relation::Geq, p.rhs.clone())
        }
        RuleKind::Derandomize => {
            arity(2)?;
            let (p1, p2) = (premises[0], premises[1]);
            require(p1.relation == Relation::Geq, "derandomize applies to >=")?;
            let z = inst.get_rat("z")?;
            let q = inst.get_rat("q")?;
            positive_rat(&z, "z")?;
            positive_rat(&q, "q")?;
            let c = p1.lhs.coeff_of(&ResourceSymbol::Rbit);
            require(
                !c.eq_mod(&Coefficient::zero(), ctx),
                "no randomness term to derandomize",
            )?;
            // target must be pure
            for s in p1.rhs.symbols() {
                let pure = s.is_pure_unit()
                    || match &s {
                        ResourceSymbol::Static { .. } => false,
                        ResourceSymbol::Dynamic { name, .. }
                        | ResourceSymbol::Protected { name, .. } => ctx.is_pure_named(name),
                        _ => false,
                    };
                require(pure, &format!("created resource {s:?} is not pure"))?;
            }
            let mut alpha = p1.lhs.clone();
            alpha.terms.remove(&ResourceSymbol::Rbit);
            // side premise: z·α ≥ q[cc]
            no_geqs(p2, "the derandomization side premise")?;
            let scaled = alpha.scale(&Coefficient::from_rat(z), &ctx.facts)?;
            require(
                expr_eq(&p2.lhs, &scaled, basis, ctx),
                "side premise left side is not z times the randomness-free expression",
            )?;
            let want = ResourceExpr::term(ResourceSymbol::Rbit, Coefficient::from_rat(q));
            require(
                expr_eq(&p2.rhs, &want, basis, ctx),
                "side premise must produce common randomness",
            )?;
            ResourceInequality::new(alpha, Relation::Geq, p1.rhs.clone())
        }
        RuleKind::RuleI => {
            arity(1)?;
            let p = premises[0];
            require(p.relation == Relation::Geq, "rule I applies to >=")?;
            let key = (Side::Lhs, ResourceSymbol::CbitTau);
            require(
                p.flags.get(&key) == Some(&DecouplingFlag::Coherent),
                "consumed classical resource is not coherently decoupled",
            )?;
            let r = p.lhs.coeff_of(&ResourceSymbol::CbitTau);
            require(!r.eq_mod(&Coefficient::zero(), ctx), "no [c->c:tau] term")?;
            let half = r.scale_rat(&crate::coeff::rat(1, 2));
            let mut lhs = p.lhs.clone();
            lhs.terms.remove(&ResourceSymbol::CbitTau);
            let lhs = lhs.add(&ResourceExpr::term(ResourceSymbol::Qubit, half.clone()));
            let rhs = p
                .rhs
                .add(&ResourceExpr::term(ResourceSymbol::Ebit, half));
            ResourceInequality::new(normalize(&lhs, basis, ctx), Relation::Geq, normalize(&rhs, basis, ctx))
        }
        RuleKind::RuleO => {
            arity(1)?;
            let p = premises[0];
            require(p.relation == Relation::Geq, "rule O applies to >=")?;
            let key = (Side::Rhs, ResourceSymbol::Cbit);
            require(
                p.flags.get(&key) == Some(&DecouplingFlag::Coherent),
                "created classical resource is not coherently decoupled",
            )?;
            let r = p.rhs.coeff_of(&ResourceSymbol::Cbit);
            require(!r.eq_mod(&Coefficient::zero(), ctx), "no [c->c] term")?;
            let half = r.scale_rat(&crate::coeff::rat(1, 2));
            let mut rhs = p.rhs.clone();
            rhs.terms.remove(&ResourceSymbol::Cbit);
            let rhs = rhs
                .add(&ResourceExpr::term(ResourceSymbol::Ebit, half.clone()))
                .add(&ResourceExpr::term(ResourceSymbol::Qubit, half));
            ResourceInequality::new(p.lhs.clone(), Relation::Geq, normalize(&rhs, basis, ctx))
        }
        RuleKind::IncoherentRuleI => {
            arity(1)?;
            let p = premises[0];
            require(p.relation == Relation::Geq, "incoherent rule I applies to >=")?;
            let key = (Side::Lhs, ResourceSymbol::CbitTau);
            let flag = p.flags.get(&key);
            require(
                flag == Some(&DecouplingFlag::Incoherent) || flag == Some(&DecouplingFlag::Coherent),
                "consumed classical resource is not flagged decoupled",
            )?;
            let r = p.lhs.coeff_of(&ResourceSymbol::CbitTau);
            require(!r.eq_mod(&Coefficient::zero(), ctx), "no [c->c:tau] term")?;
            let rhs = p
                .rhs
                .add(&ResourceExpr::term(ResourceSymbol::Rbit, r));
            ResourceInequality::new(p.lhs.clone(), Relation::Geq, normalize(&rhs, basis, ctx))
        }
        RuleKind::Absolutize => {
            arity(1)?;
            let p = premises[0];
            let from = inst.get_symbol("from")?;
            let to = inst.get_symbol("to")?;
            let valid = matches!(
                (&from, &to),
                (ResourceSymbol::Cbit, ResourceSymbol::CbitTau)
                    | (ResourceSymbol::CbitTau, ResourceSymbol::Cbit)
                    | (ResourceSymbol::Qubit, ResourceSymbol::QubitTau)
                    | (ResourceSymbol::QubitTau, ResourceSymbol::Qubit)
                    | (ResourceSymbol::Cobit, ResourceSymbol::CobitTau)
                    | (ResourceSymbol::CobitTau, ResourceSymbol::Cobit)
            );
            require(valid, "absolutization only exchanges a unit with its τ variant")?;
            let swap = |e: &ResourceExpr| -> ResourceExpr {
                let mut out = ResourceExpr::empty();
                for (s, c) in &e.terms {
                    let ns = if *s == from { to.clone() } else { s.clone() };
                    let entry = out.terms.entry(ns).or_insert_with(Coefficient::zero);
                    *entry = entry.add(c);
                }
                out.o_terms = e
                    .o_terms
                    .iter()
                    .map(|s| if *s == from { to.clone() } else { s.clone() })
                    .collect();
                out.inf_terms = e
                    .inf_terms
                    .iter()
                    .map(|s| if *s == from { to.clone() } else { s.clone() })
                    .collect();
                out
            };
            let mut ri = ResourceInequality::new(swap(&p.lhs), p.relation, swap(&p.rhs))?;
            for ((side, sym), flag) in &p.flags {
                let ns = if *sym == from { to.clone() } else { sym.clone() };
                ri = ri.with_flag(*side, ns, *flag)?;
            }
            Ok(ri)
        }
        RuleKind::Relativize => {
            arity(0)?;
            let item: u8 = inst
                .get("item")?
                .parse()
                .map_err(|_| CalcError::SchemaMismatch("bad relativize item".into()))?;
            match item {
                1 => {
                    let name = inst.get("name")?;
                    let test = inst.get("test")?;
                    ResourceInequality::new(
                        ResourceExpr::unit(ResourceSymbol::chan(name)),
                        Relation::Geq,
                        ResourceExpr::unit(ResourceSymbol::chan_rel(name, test)),
                    )
                }
                2 => {
                    let name = inst.get("name")?;
                    let test = inst.get("test")?;
                    let protected = inst.get_opt("protected") == Some("true");
                    let result = ctx.application_result(name, test).ok_or_else(|| {
                        CalcError::MissingSideCondition(format!(
                            "no declared application of `{name}` to `{test}`"
                        ))
                    })?;
                    let from = if protected {
                        ResourceSymbol::protected(name, test)
                    } else {
                        ResourceSymbol::chan_rel(name, test)
                    };
                    ResourceInequality::new(
                        ResourceExpr::unit(from),
                        Relation::Geq,
                        ResourceExpr::unit(ResourceSymbol::stat(result)),
                    )
                }
                3 => {
                    let inner = inst.get("inner")?;
                    let source = inst.get("source")?;
                    let outer = inst.get("outer")?;
                    let protected = inst.get_opt("protected") == Some("true");
                    let (mid, composed) = ctx.composition(inner, outer).ok_or_else(|| {
                        CalcError::MissingSideCondition(format!(
                            "no declared composition of `{outer}` after `{inner}`"
                        ))
                    })?;
                    let outer_sym = match mid {
                        Some(m) => ResourceSymbol::chan_rel(outer, m),
                        None => ResourceSymbol::chan(outer),
                    };
                    let (inner_sym, composed_sym) = if protected {
                        (
                            ResourceSymbol::protected(inner, source),
                            ResourceSymbol::protected(composed, source),
                        )
                    } else {
                        (
                            ResourceSymbol::chan_rel(inner, source),
                            ResourceSymbol::chan_rel(composed, source),
                        )
                    };
                    ResourceInequality::new(
                        ResourceExpr::unit(inner_sym).add(&ResourceExpr::unit(outer_sym)),
                        Relation::Geq,
                        ResourceExpr::unit(composed_sym),
                    )
                }
                4 => {
                    let ext = inst.get("ext")?;
                    let name = inst.get("name")?;
                    let test = inst.get("test")?;
                    let restr_ok = ctx.named.iter().any(|d| {
                        matches!(d, NamedDecl::Reduction { from, to }
                            if *from == ResourceSymbol::stat(ext) && *to == ResourceSymbol::stat(test))
                    });
                    require(
                        restr_ok,
                        "the test state is not declared a restriction of the extension",
                    )?;
                    let result = ctx.application_result(name, ext).ok_or_else(|| {
                        CalcError::MissingSideCondition(format!(
                            "no declared application of `{name}` to `{ext}`"
                        ))
                    })?;
                    ResourceInequality::new(
                        ResourceExpr::unit(ResourceSymbol::stat(ext))
                            .add(&ResourceExpr::unit(ResourceSymbol::chan_rel(name, test))),
                        Relation::Geq,
                        ResourceExpr::unit(ResourceSymbol::stat(result)),
                    )
                }
                5 => {
                    let from = inst.get_symbol("from")?;
                    let to = inst.get_symbol("to")?;
                    require(
                        ctx.has_reduction(&from, &to),
                        "no declared reduction between these resources",
                    )?;
                    ResourceInequality::new(
                        ResourceExpr::unit(from),
                        Relation::Geq,
                        ResourceExpr::unit(to),
                    )
                }
                other => Err(CalcError::SchemaMismatch(format!(
                    "relativize item {other} out of range"
                ))),
            }
        }
        RuleKind::ConvexSplit => {
            match inst.get_opt("mode").unwrap_or("conditional") {
                "explicit" => {
                    arity(0)?;
                    let sigma = inst.get("sigma")?;
                    let tc = ctx.tags.get(sigma).ok_or_else(|| {
                        CalcError::MissingSideCondition(format!("tag `{sigma}` has no context"))
                    })?;
                    let Some(cq) = &tc.cq else {
                        return Err(CalcError::MissingSideCondition(format!(
                            "tag `{sigma}` is not declared a classical-quantum ensemble"
                        )));
                    };
                    let CqComponents::Explicit(parts) = &cq.components else {
                        return Err(CalcError::MissingSideCondition(
                            "explicit convex split needs explicit components".into(),
                        ));
                    };
                    let mut rhs = ResourceExpr::empty();
                    let mut total = Rat::zero();
                    for (p, tag) in parts {
                        require(!p.is_negative(), "negative ensemble weight")?;
                        total += p;
                        rhs = rhs.add(&ResourceExpr::term(
                            ResourceSymbol::stat(tag),
                            Coefficient::from_rat(p.clone()),
                        ));
                    }
                    require(total.is_one(), "ensemble weights must sum to one")?;
                    ResourceInequality::new(
                        ResourceExpr::unit(ResourceSymbol::stat(sigma)),
                        Relation::Geq,
                        rhs,
                    )
                }
                "conditional" => {
                    arity(1)?;
                    let p = premises[0];
                    no_geqs(p, "convex-split")?;
                    let sigma_tag = inst.get("sigma_tag")?;
                    let static_from = inst.get("static_from")?;
                    let static_to = inst.get("static_to")?;
                    let tc = ctx.tags.get(sigma_tag).ok_or_else(|| {
                        CalcError::MissingSideCondition(format!("tag `{sigma_tag}` has no context"))
                    })?;
                    let Some(cq) = &tc.cq else {
                        return Err(CalcError::MissingSideCondition(format!(
                            "tag `{sigma_tag}` is not declared a classical-quantum ensemble"
                        )));
                    };
                    let class = cq.class_label.clone();
                    // required conditional structure must be declared
                    if let Some(req) = inst.get_opt("require_pure") {
                        let (family, given) = req.split_once('|').ok_or_else(|| {
                            CalcError::SchemaMismatch("require_pure needs `family|given`".into())
                        })?;
                        let family: Vec<&str> = family.split_whitespace().collect();
                        let given: Vec<&str> = given.split_whitespace().collect();
                        let pf = crate::context::PureFamily {
                            family: family.iter().map(|s| s.to_string()).collect(),
                            given: given.iter().map(|s| s.to_string()).collect(),
                        };
                        require(
                            tc.pure_families.contains(&pf),
                            "required conditional purity is not declared",
                        )?;
                    }
                    let tag_map = inst.get_map("tags");
                    let label_map = inst.get_label_map("labels");
                    let mut name_map = BTreeMap::new();
                    name_map.insert(static_from.to_string(), static_to.to_string());
                    let transform = |e: &ResourceExpr| -> ResourceExpr {
                        let sub = e.substitute(&tag_map, &label_map, &name_map);
                        let mut out = ResourceExpr {
                            terms: BTreeMap::new(),
                            o_terms: sub.o_terms.clone(),
                            inf_terms: sub.inf_terms.clone(),
                        };
                        for (s, c) in &sub.terms {
                            out.terms.insert(s.clone(), c.conditioned_on(&class));
                        }
                        out
                    };
                    ResourceInequality::new(transform(&p.lhs), p.relation, transform(&p.rhs))
                }
                other => Err(CalcError::SchemaMismatch(format!(
                    "unknown convex-split mode `{other}`"
                ))),
            }
        }
        RuleKind::SourceFake => {
            arity(1)?;
            let p = premises[0];
            let name = inst.get("name")?;
            let source = inst.get("source")?;
            let sym = ResourceSymbol::protected(name, source);
            let c = p.lhs.coeff_of(&sym);
            require(
                !c.eq_mod(&Coefficient::zero(), ctx),
                "protected resource not present on the consumed side",
            )?;
            require(
                !p.rhs.symbols().iter().any(|s| s.is_protected()),
                "created side still refers to the Source",
            )?;
            let result = ctx.application_result(name, source).ok_or_else(|| {
                CalcError::MissingSideCondition(format!(
                    "no declared application of `{name}` to `{source}`"
                ))
            })?;
            let mut lhs = p.lhs.clone();
            lhs.terms.remove(&sym);
            let lhs = lhs.add(&ResourceExpr::term(ResourceSymbol::stat(result), c));
            ResourceInequality::new(lhs, p.relation, p.rhs.clone())
        }
        RuleKind::ImproperToProper => {
            arity(1)?;
            let p = premises[0];
            require(
                p.relation == Relation::GeqS,
                "premise is not a source-coding inequality",
            )?;
            ResourceInequality::new(p.lhs.clone(), Relation::Geq, p.rhs.clone())
        }
        RuleKind::ProperToImproper => {
            arity(1)?;
            let p = premises[0];
            require(p.relation == Relation::Geq, "premise must be proper")?;
            let name = inst.get("name")?;
            let source = inst.get("source")?;
            let sym = ResourceSymbol::protected(name, source);
            require(
                !p.lhs.coeff_of(&sym).eq_mod(&Coefficient::zero(), ctx),
                "protected resource not present on the consumed side",
            )?;
            let result = ctx.application_result(name, source).ok_or_else(|| {
                CalcError::MissingSideCondition(format!(
                    "no declared application of `{name}` to `{source}`"
                ))
            })?;
            let lhs = p.lhs.add(&ResourceExpr::o(ResourceSymbol::stat(result)));
            ResourceInequality::new(lhs, Relation::GeqS, p.rhs.clone())
        }
        RuleKind::EqualitySubstitution => {
            arity(2)?;
            let (p, eq) = (premises[0], premises[1]);
            no_geqs(p, "equality substitution")?;
            require(eq.relation == Relation::Eq, "second premise must be an equality")?;
            let c = match inst.get_opt("coeff") {
                Some(text) => parse_coeff(text)?,
                None => Coefficient::one(),
            };
            require(certify_nonneg(&c, &ctx.facts), "substitution multiplier must be nonnegative")?;
            let fwd = inst.get_opt("direction").unwrap_or("fwd") == "fwd";
            let (e_from, e_to) = if fwd {
                (eq.lhs.clone(), eq.rhs.clone())
            } else {
                (eq.rhs.clone(), eq.lhs.clone())
            };
            require(
                e_from.o_terms.is_empty()
                    && e_from.inf_terms.is_empty()
                    && e_to.o_terms.is_empty()
                    && e_to.inf_terms.is_empty(),
                "substituted equality must be finite",
            )?;
            let scaled_from = e_from.scale(&c, &ctx.facts)?;
            let scaled_to = e_to.scale(&c, &ctx.facts)?;
            let side = inst.get_opt("side").unwrap_or("lhs");
            match side {
                "lhs" => {
                    contains_certified(&p.lhs, &scaled_from, ctx)?;
                    let lhs = p.lhs.sub(&scaled_from).add(&scaled_to);
                    ResourceInequality::new(
                        normalize(&lhs, basis, ctx),
                        p.relation,
                        p.rhs.clone(),
                    )
                }
                "rhs" => {
                    contains_certified(&p.rhs, &scaled_from, ctx)?;
                    let rhs = p.rhs.sub(&scaled_from).add(&scaled_to);
                    ResourceInequality::new(
                        p.lhs.clone(),
                        p.relation,
                        normalize(&rhs, basis, ctx),
                    )
                }
                other => Err(CalcError::SchemaMismatch(format!("unknown side `{other}`"))),
            }
        }
        RuleKind::EqualityIntro => {
            arity(2)?;
            let (p1, p2) = (premises[0], premises[1]);
            require(
                p1.relation != Relation::GeqS && p2.relation != Relation::GeqS,
                "equality introduction needs proper inequalities",
            )?;
            require(
                expr_eq(&p1.lhs, &p2.rhs, basis, ctx) && expr_eq(&p1.rhs, &p2.lhs, basis, ctx),
                "premises are not mutual",
            )?;
            ResourceInequality::new(p1.lhs.clone(), Relation::Eq, p1.rhs.clone())
        }
    }
}

fn substitute_contexts(
    required: &ContextSet,
    tag_map: &BTreeMap<String, String>,
    label_map: &BTreeMap<String, Vec<String>>,
    name_map: &BTreeMap<String, String>,
) -> ContextSet {
    let map_label_set = |s: &std::collections::BTreeSet<String>| {
        let mut out = std::collections::BTreeSet::new();
        for l in s {
            match label_map.get(l) {
                Some(repl) => out.extend(repl.iter().cloned()),
                None => {
                    out.insert(l.clone());
                }
            }
        }
        out
    };
    let mut out = ContextSet::new();
    for (tag, tc) in &required.tags {
        let ntag = tag_map.get(tag).cloned().unwrap_or_else(|| tag.clone());
        let entry = out.tags.entry(ntag).or_default();
        for pf in &tc.pure_families {
            entry.pure_families.push(crate::context::PureFamily {
                family: map_label_set(&pf.family),
                given: map_label_set(&pf.given),
            });
        }
        entry.classical = map_label_set(&tc.classical);
        entry.cq = tc.cq.clone();
    }
    for d in &required.named {
        let rename = |n: &str| name_map.get(n).cloned().unwrap_or_else(|| n.to_string());
        out.named.push(match d {
            NamedDecl::Pure { name } => NamedDecl::Pure { name: rename(name) },
            NamedDecl::Application { name, test, result } => NamedDecl::Application {
                name: rename(name),
                test: rename(test),
                result: rename(result),
            },
            NamedDecl::Composition { inner, outer, mid, composed } => NamedDecl::Composition {
                inner: rename(inner),
                outer: rename(outer),
                mid: mid.as_ref().map(|m| rename(m)),
                composed: rename(composed),
            },
            NamedDecl::Reduction { from, to } => NamedDecl::Reduction {
                from: from.clone(),
                to: to.clone(),
            },
        });
    }
    for f in &required.facts {
        out.facts.push(f.substitute(tag_map, label_map));
    }
    out
}
