//! Derivation replay: all builtins check, survive mutation fuzzing, evaluate
//! to finite numbers at concrete bindings, and the per-step coefficient
//! arithmetic re-verifies numerically.

use qsc_calculus::bindings::{axiom_bindings, proof_bindings};
use qsc_calculus::eval::numeric_gap;
use qsc_calculus::mutate::{apply_mutation, mutation_sites};
use qsc_calculus::rules::{apply_rule, RuleKind};
use qsc_calculus::*;
use rand::prelude::*;
use rand_chacha::ChaCha20Rng;

#[test]
fn all_builtins_pass() {
    let db = axiom_db();
    let proofs = builtin_derivations();
    assert!(proofs.len() >= 15);
    for p in proofs {
        p.check(&db).unwrap_or_else(|e| panic!("{}: {e}", p.name));
    }
}

#[test]
fn mutation_fuzz_500() {
    let db = axiom_db();
    let proofs = builtin_derivations();
    let mut rng = ChaCha20Rng::seed_from_u64(20260810);
    let mut tried = 0usize;
    while tried < 500 {
        let p = &proofs[rng.gen_range(0..proofs.len())];
        let sites = mutation_sites(p);
        let m = sites[rng.gen_range(0..sites.len())].clone();
        let mutated = apply_mutation(p, &m);
        assert!(
            mutated.check(&db).is_err(),
            "mutation {m:?} on `{}` went undetected",
            p.name
        );
        tried += 1;
    }
}

#[test]
fn numeric_replay_of_builtins() {
    let db = axiom_db();
    for p in builtin_derivations() {
        let bindings = proof_bindings(&p.name).unwrap();
        // declared facts must hold at the binding
        for fact in &p.contexts.facts {
            let v = fact.evaluate(&bindings).unwrap();
            assert!(
                v >= -1e-9,
                "{}: declared fact evaluates to {v}",
                p.name
            );
        }
        // per-step: stored and recomputed conclusions agree numerically
        for (i, step) in p.steps.iter().enumerate() {
            let kind = RuleKind::parse(&step.rule).unwrap();
            let premises: Vec<&ResourceInequality> =
                step.premises.iter().map(|&j| &p.steps[j].conclusion).collect();
            let recomputed =
                apply_rule(&db, &p.contexts, &p.basis, kind, &premises, &step.instantiation)
                    .unwrap_or_else(|e| panic!("{} step {i}: {e}", p.name));
            for (stored, recooked) in [
                (&step.conclusion.lhs, &recomputed.lhs),
                (&step.conclusion.rhs, &recomputed.rhs),
            ] {
                let gap = numeric_gap(stored, recooked, &bindings)
                    .unwrap_or_else(|e| panic!("{} step {i}: {e}", p.name));
                assert!(
                    gap < 1e-9,
                    "{} step {i}: numeric gap {gap}",
                    p.name
                );
                for (_, c) in &stored.terms {
                    let v = c.evaluate(&bindings).unwrap();
                    assert!(v.is_finite());
                }
            }
        }
    }
}

#[test]
fn axiom_smoke_evaluation() {
    // every axiom with entropic content evaluates to finite reals on
    // generic desk-scale bindings
    let db = axiom_db();
    for (i, axiom) in db.all().iter().enumerate() {
        let bindings = axiom_bindings(axiom, 7000 + i as u64).unwrap();
        for side in [&axiom.ri.lhs, &axiom.ri.rhs] {
            let evaluated = evaluate(side, &bindings)
                .unwrap_or_else(|e| panic!("axiom {}: {e}", axiom.name));
            for (sym, v) in &evaluated.terms {
                assert!(
                    v.is_finite(),
                    "axiom {}: coefficient of {sym:?} is {v}",
                    axiom.name
                );
            }
        }
    }
}

#[test]
fn derive_and_check_via_files() {
    // print -> parse -> check for every builtin, exercising the proof file
    // format end to end
    let db = axiom_db();
    for p in builtin_derivations() {
        let json = p.to_json();
        let back = Proof::from_json(&json).unwrap();
        back.check(&db)
            .unwrap_or_else(|e| panic!("{} after JSON round trip: {e}", p.name));
    }
}
