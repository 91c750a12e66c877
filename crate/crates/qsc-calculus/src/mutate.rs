//! Single-token proof mutations for the checker-soundness fuzz: every
//! generated mutation changes the meaning of one step and must make
//! `check` fail.

use crate::coeff::{rat_int, Coefficient};
use crate::expr::{Relation, ResourceInequality};
use crate::proof::Proof;
use rand::seq::SliceRandom;
use rand::Rng;

#[derive(Clone, Debug)]
pub enum Mutation {
    /// Double one stored term coefficient in a step conclusion.
    ScaleConclusionTerm { step: usize, term: usize },
    /// Flip the relation of a step conclusion.
    FlipRelation { step: usize },
    /// Rename the rule of a step.
    SwapRule { step: usize, to: &'static str },
    /// Point a premise at a different earlier step.
    RetargetPremise { step: usize, slot: usize, to: usize },
    /// Corrupt an instantiation rational (z, q, coeff, margin).
    DoubleRational { step: usize, key: String },
    /// Remove a decoupling flag from a step conclusion.
    DropFlag { step: usize },
}

/// Enumerate every available mutation site in a proof.
pub fn mutation_sites(proof: &Proof) -> Vec<Mutation> {
    let mut sites = Vec::new();
    for (i, step) in proof.steps.iter().enumerate() {
        for (t, _) in step.conclusion.lhs.terms.iter().enumerate() {
            sites.push(Mutation::ScaleConclusionTerm { step: i, term: t });
        }
        let lhs_terms = step.conclusion.lhs.terms.len();
        for (t, _) in step.conclusion.rhs.terms.iter().enumerate() {
            sites.push(Mutation::ScaleConclusionTerm { step: i, term: lhs_terms + t });
        }
        sites.push(Mutation::FlipRelation { step: i });
        let to = if step.rule == "transitivity" { "addition" } else { "transitivity" };
        sites.push(Mutation::SwapRule { step: i, to });
        // retargeting premises only when a different earlier step exists and
        // the rule is order-sensitive enough that the checker must notice
        if step.rule != "addition" {
            for (slot, &p) in step.premises.iter().enumerate() {
                for candidate in 0..i {
                    if candidate != p {
                        sites.push(Mutation::RetargetPremise { step: i, slot, to: candidate });
                        break;
                    }
                }
            }
        }
        for key in ["z", "q", "coeff", "margin"] {
            if step.instantiation.0.contains_key(key) {
                sites.push(Mutation::DoubleRational { step: i, key: key.to_string() });
            }
        }
        if !step.conclusion.flags.is_empty() {
            sites.push(Mutation::DropFlag { step: i });
        }
    }
    sites
}

fn double_coeff(c: &Coefficient) -> Coefficient {
    c.scale_rat(&rat_int(2))
}

pub fn apply_mutation(proof: &Proof, m: &Mutation) -> Proof {
    let mut p = proof.clone();
    match m {
        Mutation::ScaleConclusionTerm { step, term } => {
            let conclusion: &mut ResourceInequality = &mut p.steps[*step].conclusion;
            let lhs_len = conclusion.lhs.terms.len();
            if *term < lhs_len {
                let key = conclusion.lhs.terms.keys().nth(*term).unwrap().clone();
                let c = conclusion.lhs.terms[&key].clone();
                conclusion.lhs.terms.insert(key, double_coeff(&c));
            } else {
                let key = conclusion
                    .rhs
                    .terms
                    .keys()
                    .nth(*term - lhs_len)
                    .unwrap()
                    .clone();
                let c = conclusion.rhs.terms[&key].clone();
                conclusion.rhs.terms.insert(key, double_coeff(&c));
            }
        }
        Mutation::FlipRelation { step } => {
            let conclusion = &mut p.steps[*step].conclusion;
            conclusion.relation = match conclusion.relation {
                Relation::Geq => Relation::Eq,
                Relation::Eq => Relation::Geq,
                Relation::GeqS => Relation::Geq,
            };
        }
        Mutation::SwapRule { step, to } => {
            p.steps[*step].rule = to.to_string();
        }
        Mutation::RetargetPremise { step, slot, to } => {
            p.steps[*step].premises[*slot] = *to;
        }
        Mutation::DoubleRational { step, key } => {
            let inst = &mut p.steps[*step].instantiation;
            if let Some(v) = inst.0.get(key).cloned() {
                if let Ok(r) = crate::grammar::parse_rat(&v) {
                    inst.0
                        .insert(key.clone(), crate::grammar::print_rat(&(r * rat_int(2))));
                } else if let Ok(c) = crate::grammar::parse_coeff(&v) {
                    inst.0
                        .insert(key.clone(), crate::grammar::print_coeff(&double_coeff(&c)));
                }
            }
        }
        Mutation::DropFlag { step } => {
            let conclusion = &mut p.steps[*step].conclusion;
            let key = conclusion.flags.keys().next().unwrap().clone();
            conclusion.flags.remove(&key);
        }
    }
    p
}

/// Draw a random mutation site.
pub fn random_mutation(proof: &Proof, rng: &mut impl Rng) -> Mutation {
    let sites = mutation_sites(proof);
    sites.choose(rng).expect("proof has mutation sites").clone()
}
