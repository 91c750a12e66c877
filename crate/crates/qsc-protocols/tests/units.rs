//! Exactness of the unit protocols and the absolutization runs.

use qsc_core::standard::max_entangled;
use qsc_core::SystemLayout;
use qsc_protocols::*;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

#[test]
fn tp_reproduces_haar_random_inputs_exactly() {
    let mut rng = ChaCha20Rng::seed_from_u64(42);
    let layout = SystemLayout::new(vec![("R", 2), ("A1", 2)]).unwrap();
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let input = qsc_core::random::random_pure_state(layout.clone(), &mut rng).unwrap();
        let result = run_tp(&input, false).unwrap();
        assert!(result.ledger_ok, "consumed {}", result.consumed);
        worst = worst.max(result.accuracy);
    }
    assert!(worst < 1e-10, "worst accuracy {worst}");
}

#[test]
fn tp_classical_message_is_incoherently_decoupled() {
    let mut rng = ChaCha20Rng::seed_from_u64(7);
    let layout = SystemLayout::new(vec![("R", 2), ("A1", 2)]).unwrap();
    let input = qsc_core::random::random_pure_state(layout, &mut rng).unwrap();
    let result = run_tp(&input, true).unwrap();
    assert!(result.accuracy < 1e-10);
    let residual = result.decoupling_residual.unwrap();
    assert!(residual < 1e-10, "residual {residual}");
    // the environment keeps a basis copy of the message, so coherent
    // decoupling fails for the classical channel, as expected
}

#[test]
fn sd_decodes_all_messages() {
    for m in 0..4 {
        let result = run_sd(m).unwrap();
        assert!(result.accuracy < 1e-12, "message {m}: {}", result.accuracy);
        assert!(result.ledger_ok);
    }
}

#[test]
fn ed_distributes_entanglement() {
    let result = run_ed().unwrap();
    assert!(result.accuracy < 1e-12);
    assert!(result.ledger_ok);
}

#[test]
fn coherent_sd_realizes_qubit_plus_two_ebits() {
    let mut rng = ChaCha20Rng::seed_from_u64(11);
    let layout = SystemLayout::new(vec![("R", 2), ("A0", 2)]).unwrap();
    for _ in 0..10 {
        let input = qsc_core::random::random_pure_state(layout.clone(), &mut rng).unwrap();
        let result = run_coherent_sd(&input).unwrap();
        assert!(result.accuracy < 1e-10, "{}", result.accuracy);
        assert!(result.ledger_ok, "consumed {}", result.consumed);
    }
}

#[test]
fn coherent_tp_realizes_two_cobits() {
    let mut rng = ChaCha20Rng::seed_from_u64(13);
    let layout = SystemLayout::new(vec![("R", 2), ("M1", 2), ("M2", 2)]).unwrap();
    for _ in 0..10 {
        let input = qsc_core::random::random_pure_state(layout.clone(), &mut rng).unwrap();
        let result = run_coherent_tp(&input).unwrap();
        assert!(result.accuracy < 1e-10, "{}", result.accuracy);
        assert!(result.ledger_ok);
    }
}

#[test]
fn absolutize_all_kinds_exact() {
    let mut rng = ChaCha20Rng::seed_from_u64(17);
    for d in [2usize, 3] {
        let layout = SystemLayout::new(vec![("R", d), ("Ain", d)]).unwrap();
        let input = qsc_core::random::random_pure_state(layout, &mut rng).unwrap();
        for kind in [AbsolutizeKind::Id, AbsolutizeKind::Coherent, AbsolutizeKind::Classical] {
            let result = run_absolutize(kind, d, &input, false).unwrap();
            assert!(result.validity < 1e-12, "{kind:?} d={d}: twirl defect {}", result.validity);
            assert!(result.accuracy < 1e-10, "{kind:?} d={d}: accuracy {}", result.accuracy);
            let residual = result.decoupling_residual.unwrap();
            assert!(residual < 1e-10, "{kind:?} d={d}: incoherent residual {residual}");
        }
    }
}

#[test]
fn absolutize_coherent_decoupling() {
    // isometric kinds decouple even from the environment; the classical kind
    // stays coupled on an entangled input (frozen value 1.0 for Φ₂)
    let mut rng = ChaCha20Rng::seed_from_u64(19);
    for d in [2usize, 3] {
        let layout = SystemLayout::new(vec![("R", d), ("Ain", d)]).unwrap();
        let input = qsc_core::random::random_pure_state(layout, &mut rng).unwrap();
        for kind in [AbsolutizeKind::Id, AbsolutizeKind::Coherent] {
            let result = run_absolutize(kind, d, &input, true).unwrap();
            let residual = result.decoupling_residual.unwrap();
            assert!(residual < 1e-10, "{kind:?} d={d}: coherent residual {residual}");
        }
    }
    let phi = max_entangled("R", "Ain", 2).unwrap();
    let result = run_absolutize(AbsolutizeKind::Classical, 2, &phi, true).unwrap();
    let residual = result.decoupling_residual.unwrap();
    assert!(residual > 0.1, "classical kind decoupled unexpectedly: {residual}");
    // frozen oracle value: ½‖ξ₀ − ξ₁‖₁ = 1 for orthogonal branch vectors
    assert!((residual - 1.0).abs() < 1e-9, "residual {residual}");
}
