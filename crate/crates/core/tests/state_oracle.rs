//! Swap and purification checked against the brute-force two-pair model.

mod common;

use common::{brute_purify, brute_swap, c};
use repeater_core::config::PurificationVariant;
use repeater_core::gates::{gate1, gate3, perfect_gate, GateModel};
use repeater_core::states::{entanglement_swap, purify, Mat4, TwoQubitState};

fn gates() -> Vec<(&'static str, GateModel)> {
    vec![
        ("perfect", perfect_gate()),
        (
            "gate1",
            gate1(100.0, 2.0 * std::f64::consts::PI * 6e6).unwrap(),
        ),
        ("gate3", gate3(100.0).unwrap()),
    ]
}

const FIDELITIES: [f64; 4] = [0.5, 0.7, 0.9, 1.0];

#[test]
fn swap_matches_brute_force_on_werner_inputs() {
    for (name, g) in gates() {
        for &fl in &FIDELITIES {
            for &fr in &FIDELITIES {
                let l = TwoQubitState::werner(fl).unwrap();
                let r = TwoQubitState::werner(fr).unwrap();
                let (s, p) = entanglement_swap(&l, &r, &g).unwrap();
                let oracle = brute_swap(&l, &r, &g);
                let diff = (s.matrix() - oracle).norm();
                assert!(diff < 1e-10, "{name} F=({fl},{fr}): {diff:e}");
                assert_eq!(p, g.success_prob);
            }
        }
    }
}

#[test]
fn swap_matches_brute_force_on_non_diagonal_input() {
    // a state with coherences and unequal marginals
    let psi = [0.8f64.sqrt(), 0.1f64.sqrt(), 0.0, -0.1f64.sqrt()];
    let pure = Mat4::from_fn(|i, j| c(psi[i] * psi[j]));
    let mixed = pure * c(0.7) + TwoQubitState::werner(0.6).unwrap().matrix() * c(0.3);
    let a = TwoQubitState::new(mixed).unwrap();
    let b = TwoQubitState::werner(0.9).unwrap();
    for (name, g) in gates() {
        let (s, _) = entanglement_swap(&a, &b, &g).unwrap();
        let diff = (s.matrix() - brute_swap(&a, &b, &g)).norm();
        assert!(diff < 1e-10, "{name}: {diff:e}");
    }
}

#[test]
fn purification_matches_brute_force_on_werner_inputs() {
    for variant in [PurificationVariant::Standard, PurificationVariant::Modified] {
        for (name, g) in gates() {
            for &fk in &FIDELITIES {
                for &ff in &FIDELITIES {
                    let keep = TwoQubitState::werner(fk).unwrap();
                    let fresh = TwoQubitState::werner(ff).unwrap();
                    let (s, p) = purify(&keep, &fresh, &g, variant).unwrap();
                    let (oracle, po) = brute_purify(&keep, &fresh, &g, variant);
                    let diff = (s.matrix() - oracle).norm();
                    assert!(diff < 1e-10, "{name} {variant:?} F=({fk},{ff}): {diff:e}");
                    assert!((p - po).abs() < 1e-12, "{name} {variant:?}: {p} vs {po}");
                }
            }
        }
    }
}

#[test]
fn bbpssw_werner_map_for_perfect_gates() {
    // the textbook recurrence for two Werner pairs after twirling
    for &f in &[0.6, 0.75, 0.9, 0.99] {
        let w = TwoQubitState::werner(f).unwrap();
        let (s, p) = purify(&w, &w, &perfect_gate(), PurificationVariant::Standard).unwrap();
        let g = (1.0 - f) / 3.0;
        let num = f * f + g * g;
        let norm = f * f + 2.0 * f * g + 5.0 * g * g;
        assert!((s.fidelity() - num / norm).abs() < 1e-12);
        assert!((p - norm).abs() < 1e-12);
    }
}
