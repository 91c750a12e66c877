//! Reference-point and structure tests for the trade-off machinery.

use qsc_core::linalg::C64;
use qsc_core::standard::*;
use qsc_core::{StateSpec, SystemLayout};
use qsc_tradeoff::*;

fn opts(restarts: usize) -> OptimizeOptions {
    OptimizeOptions { restarts, seed: 7, max_iters: 150, rel_tol: 1e-7 }
}

fn isotropic() -> StateSpec {
    let phi = max_entangled("A", "B", 2).unwrap();
    let tau = maximally_mixed("A", 2)
        .unwrap()
        .tensor(&maximally_mixed("B", 2).unwrap())
        .unwrap();
    let m = phi
        .matrix()
        .scale(C64::new(0.8, 0.0))
        .add(&tau.matrix().scale(C64::new(0.2, 0.0)));
    StateSpec::new_unchecked(phi.layout().clone(), m)
}

fn schmidt_state(theta: f64) -> StateSpec {
    let c = theta.cos();
    let s = theta.sin();
    let layout = SystemLayout::new(vec![("A", 2), ("B", 2)]).unwrap();
    StateSpec::pure(
        layout,
        &[
            C64::new(c, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(s, 0.0),
        ],
    )
    .unwrap()
}

fn h2(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        0.0
    } else {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }
}

#[test]
fn mother_on_phi_gives_one_ebit_at_zero_qubits() {
    let spec = RegionSpec::new(Family::Mother, NoisyObject::State(max_entangled("A", "B", 2).unwrap())).unwrap();
    let curve = optimize_boundary(&spec, &[0.0], &opts(8)).unwrap();
    let e0 = curve.value_at(0.0).unwrap();
    assert!(e0 >= 1.0 - 1e-3, "E(0) = {e0}");
}

#[test]
fn mother_on_schmidt_states_matches_entropy_of_entanglement() {
    for theta in [std::f64::consts::PI / 8.0, std::f64::consts::PI / 6.0] {
        let rho = schmidt_state(theta);
        let expect = h2(theta.cos().powi(2));
        let spec = RegionSpec::new(Family::Mother, NoisyObject::State(rho)).unwrap();
        let curve = optimize_boundary(&spec, &[0.0], &opts(8)).unwrap();
        let e0 = curve.value_at(0.0).unwrap();
        assert!(
            (e0 - expect).abs() <= 1e-2,
            "theta {theta}: E(0) = {e0} vs H2 = {expect}"
        );
    }
}

#[test]
fn father_reference_points() {
    // perfect qubit channel: Q(E=0) ≥ 1
    let perfect = identity_channel("Ain", "B", 2).unwrap().as_channel();
    let spec = RegionSpec::new(Family::Father, NoisyObject::Channel(perfect)).unwrap();
    let curve = optimize_boundary(&spec, &[0.0], &opts(8)).unwrap();
    let q0 = curve.value_at(0.0).unwrap();
    assert!(q0 >= 1.0 - 1e-3, "Q(0) = {q0}");
}

#[test]
fn father_bounds_intersect_at_half_environment_information() {
    // dephasing(0.2): at the best witness the bounds Q ≤ E + I(A⟩B) and
    // Q ≤ ½I(A;B) meet at E = ½I(A;E)
    let chan = dephasing_channel("Ain", "B", 2, 0.2).unwrap();
    let spec = RegionSpec::new(Family::Father, NoisyObject::Channel(chan)).unwrap();
    let base = spec.base().unwrap();
    // Φ₂ input witness
    let d = 2;
    let mut v = vec![qsc_core::linalg::ZERO; d * d];
    for x in 0..d {
        v[x * d + x] = C64::new(1.0 / (d as f64).sqrt(), 0.0);
    }
    let w = SigmaWitness::PureInput { vector: v, dim_a: d };
    let p = eval_point(Family::Father, &base, &w).unwrap();
    // intersection of E + icoh = half_mutual at E* = ½I(A;B) − I(A⟩B) = ½I(A;E)
    let e_star = p.objective - p.constraint;
    // independent value of ½I(A;E) from the dilated state
    let sigma = {
        let qsc_tradeoff_base = &base;
        match qsc_tradeoff_base {
            qsc_tradeoff::region::RegionBase::Dynamic { dilation, .. } => {
                let layout = SystemLayout::new(vec![("A", 2), ("Ain", 2)]).unwrap();
                let phi = StateSpec::pure(
                    layout,
                    &[
                        C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
                        C64::new(0.0, 0.0),
                        C64::new(0.0, 0.0),
                        C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
                    ],
                )
                .unwrap();
                qsc_core::channel::apply(dilation, &phi, &["Ain"]).unwrap()
            }
            _ => unreachable!(),
        }
    };
    let half_iae = 0.5 * qsc_core::info::mutual(&sigma, &["A"], &["E"]).unwrap();
    assert!(
        (e_star - half_iae).abs() < 1e-6,
        "intersection {e_star} vs ½I(A;E) {half_iae}"
    );
}

#[test]
fn eac_reproduces_channel_mutual_information() {
    for p in [0.1, 0.25] {
        let chan = depolarizing_channel("Ain", "B", 2, p).unwrap();
        // reference: I(A;B) of the dilated Φ₂ output, direct eigensolve
        let v = chan.stinespring("E").unwrap();
        let phi = max_entangled("A", "Ain", 2).unwrap();
        let sigma = qsc_core::channel::apply(&v, &phi, &["Ain"]).unwrap();
        let reference = qsc_core::info::mutual(&sigma, &["A"], &["B"]).unwrap();
        let spec = RegionSpec::new(Family::Eac, NoisyObject::Channel(chan)).unwrap();
        let curve = optimize_boundary(&spec, &[2.0], &opts(12)).unwrap();
        let r = curve.value_at(2.0).unwrap();
        assert!(
            (r - reference).abs() < 1e-6,
            "p {p}: R {r} vs I(A;B) {reference}"
        );
    }
}

#[test]
fn monotone_envelope_and_feasibility() {
    let spec = RegionSpec::new(Family::Mother, NoisyObject::State(isotropic())).unwrap();
    let budgets: Vec<f64> = (0..5).map(|i| i as f64 * 0.25).collect();
    let curve = optimize_boundary(&spec, &budgets, &opts(6)).unwrap();
    for w in curve.points.windows(2) {
        assert!(
            w[0].value <= w[1].value + 1e-9,
            "not monotone: {} then {}",
            w[0].value,
            w[1].value
        );
    }
    // feasibility re-verification of recorded witnesses
    let base = spec.base().unwrap();
    for p in &curve.points {
        let ep = eval_point(Family::Mother, &base, &p.witness).unwrap();
        assert!(ep.constraint <= p.budget + 1e-9);
    }
}

#[test]
fn bijections_on_isotropic_state() {
    let report = check_bijections(&isotropic(), 33, 99).unwrap();
    assert!(report.worst_f_violation < 1e-6, "{report:?}");
    assert!(report.worst_g_violation < 1e-6, "{report:?}");
    assert!(report.worst_f_identity_gap < 1e-9, "{report:?}");
    assert!(report.worst_g_identity_gap < 1e-9, "{report:?}");
}

#[test]
fn tensor_power_embedding() {
    // the n = 2 region on ρ⊗ρ, rescaled by ½, contains the n = 1 region on
    // product witnesses
    let rho = isotropic();
    let spec1 = RegionSpec::new(Family::Mother, NoisyObject::State(rho.clone())).unwrap();
    let base1 = spec1.base().unwrap();
    let rho2 = rho
        .relabel(&[("A", "A1"), ("B", "B1")])
        .unwrap()
        .tensor(&rho.relabel(&[("A", "A2"), ("B", "B2")]).unwrap())
        .unwrap()
        .permute(&["A1", "A2", "B1", "B2"])
        .unwrap();
    // merge (A1,A2) -> A and (B1,B2) -> B for the region machinery
    let merged = {
        let m = rho2.matrix().clone();
        let layout = SystemLayout::new(vec![("A", 4), ("B", 4)]).unwrap();
        // relabel requires identical ordering of the underlying indices:
        // (A1 A2 B1 B2) row-major equals (A B) with A = A1A2, B = B1B2
        StateSpec::new_unchecked(layout, m)
    };
    let spec2 = RegionSpec::new(Family::Mother, NoisyObject::State(merged)).unwrap();
    let base2 = spec2.base().unwrap();
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(4);
    for _ in 0..4 {
        let w1 = SigmaWitness::random_ensemble(1, 2, 2, &mut rng);
        let p1 = eval_point(Family::Mother, &base1, &w1).unwrap();
        // product witness on ρ⊗ρ: U ⊗ U with outputs regrouped to (A' A')(E' E')
        let SigmaWitness::Ensemble { probs, isometries } = &w1 else { unreachable!() };
        let u = &isometries[0];
        let uu = kron_regrouped(u);
        let w2 = SigmaWitness::Ensemble { probs: probs.clone(), isometries: vec![uu] };
        let p2 = eval_point(Family::Mother, &base2, &w2).unwrap();
        // additive under tensoring: both coordinates double
        assert!((p2.constraint - 2.0 * p1.constraint).abs() < 1e-8);
        assert!((p2.objective - 2.0 * p1.objective).abs() < 1e-8);
        // so the halved n=2 point dominates the n=1 point
        let (q1, e1) = (p1.constraint, p1.constraint + p1.objective);
        let (q2, e2) = (p2.constraint / 2.0, (p2.constraint + p2.objective) / 2.0);
        assert!(q2 <= q1 + 1e-6 && e2 + 1e-6 >= e1);
    }
}

/// (U ⊗ U) with output factors regrouped from (A'E')(A'E') to (A'A')(E'E').
fn kron_regrouped(u: &qsc_core::linalg::CMatrix) -> qsc_core::linalg::CMatrix {
    let (dap, dep) = (2usize, 2usize);
    let da = 2usize;
    let big = u.kron(u);
    // rows of big: ((a1 e1),(a2 e2)) -> regroup to ((a1 a2),(e1 e2))
    let mut out = qsc_core::linalg::CMatrix::zeros(big.rows(), big.cols());
    for a1 in 0..dap {
        for e1 in 0..dep {
            for a2 in 0..dap {
                for e2 in 0..dep {
                    let from = ((a1 * dep + e1) * dap * dep) + (a2 * dep + e2);
                    let to = ((a1 * dap + a2) * dep * dep) + (e1 * dep + e2);
                    for c in 0..da * da {
                        out[(to, c)] = big[(from, c)];
                    }
                }
            }
        }
    }
    out
}
