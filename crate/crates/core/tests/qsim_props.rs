//! Simulator and symmetry invariants over random inputs.

use std::f64::consts::PI;

use eqnn_core::qsim::{circuit_unitary, gate_unitary, max_abs_diff, CMatrix, C64};
use eqnn_core::quantum_models::observables;
use eqnn_core::symmetry::{builtin_reps, conjugate_observable};
use eqnn_core::{Gate, GateKind, Observable, StateVector};
use proptest::prelude::*;

const KINDS: [GateKind; 4] = [GateKind::Rx, GateKind::Ry, GateKind::Rz, GateKind::Rzz];

fn state_strategy(n_qubits: usize) -> impl Strategy<Value = StateVector> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1 << n_qubits).prop_filter_map(
        "non-zero amplitude vector",
        |raw| {
            let norm: f64 = raw
                .iter()
                .map(|(re, im)| re * re + im * im)
                .sum::<f64>()
                .sqrt();
            (norm > 1e-3).then(|| {
                let amps = raw
                    .iter()
                    .map(|&(re, im)| C64::new(re / norm, im / norm))
                    .collect();
                StateVector::from_amplitudes(amps).unwrap()
            })
        },
    )
}

fn gate_strategy(n_qubits: usize) -> impl Strategy<Value = Gate> {
    (
        0..4usize,
        0..n_qubits,
        1..n_qubits.max(2),
        -4.0 * PI..4.0 * PI,
    )
        .prop_map(move |(k, a, offset, angle)| {
            let kind = KINDS[k];
            if kind == GateKind::Rzz {
                Gate::rzz(a, (a + offset) % n_qubits, angle)
            } else {
                Gate::new(kind, vec![a], angle)
            }
        })
}

fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn gates_preserve_norm(
        (state, gate) in (2usize..=4).prop_flat_map(|n| (state_strategy(n), gate_strategy(n)))
    ) {
        let mut s = state;
        s.apply_gate(&gate).unwrap();
        prop_assert!((s.norm_sqr().sqrt() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gate_unitaries_are_unitary(k in 0..4usize, angle in -10.0f64..10.0) {
        let gate = if KINDS[k] == GateKind::Rzz { Gate::rzz(0, 1, angle) } else { Gate::new(KINDS[k], vec![0], angle) };
        let u = gate_unitary(&gate);
        prop_assert!(max_abs_diff(&(&u * u.adjoint()), &identity(u.nrows())) < 1e-12);
    }

    #[test]
    fn sequential_application_matches_dense_product(
        (state, gates) in (1usize..=3).prop_flat_map(|n| {
            (state_strategy(n.max(2)), prop::collection::vec(gate_strategy(n.max(2)), 1..8))
        })
    ) {
        let n = state.n_qubits();
        let mut sequential = state.clone();
        for g in &gates {
            sequential.apply_gate(g).unwrap();
        }
        let mut dense = state;
        dense.apply_matrix(&circuit_unitary(&gates, n).unwrap()).unwrap();
        prop_assert!(sequential.max_abs_diff(&dense) < 1e-10);
    }

    #[test]
    fn angles_are_4pi_periodic(
        (state, gate) in (1usize..=3).prop_flat_map(|n| (state_strategy(n.max(2)), gate_strategy(n.max(2))))
    ) {
        let mut shifted_gate = gate.clone();
        shifted_gate.angle += 4.0 * PI;
        let mut a = state.clone();
        a.apply_gate(&gate).unwrap();
        let mut b = state;
        b.apply_gate(&shifted_gate).unwrap();
        prop_assert!(a.max_abs_diff(&b) < 1e-10);
    }

    #[test]
    fn expectation_of_hermitian_is_real_and_bounded(state in state_strategy(2)) {
        for obs in [observables::symmetric(), observables::antisymmetric_pair().0, observables::fully_antisymmetric_pair().1] {
            let spectrum = obs.spectrum();
            let e = state.expectation(&obs).unwrap();
            prop_assert!(e >= spectrum[0] - 1e-12 && e <= spectrum[3] + 1e-12);
        }
    }
}

#[test]
fn conjugation_preserves_spectrum() {
    let (a1, a2) = observables::antisymmetric_pair();
    let (f1, f2) = observables::fully_antisymmetric_pair();
    // A random Hermitian matrix too, to avoid relying on the special ones.
    let mut h = CMatrix::zeros(4, 4);
    for i in 0..4 {
        for j in 0..4 {
            let v = C64::new(
                ((3 * i + 5 * j) % 7) as f64 - 3.0,
                (i as f64 - j as f64) * 0.25,
            );
            h[(i, j)] += v;
            h[(j, i)] += v.conj();
        }
    }
    let random = Observable::new(h).unwrap();
    for obs in [observables::symmetric(), a1, a2, f1, f2, random] {
        for rep in builtin_reps() {
            let out = conjugate_observable(&obs, &rep).unwrap();
            let (x, y) = (obs.spectrum(), out.spectrum());
            for (u, v) in x.iter().zip(&y) {
                assert!(
                    (u - v).abs() < 1e-10,
                    "{} changed spectrum: {x:?} vs {y:?}",
                    rep.name
                );
            }
        }
    }
}

#[test]
fn all_builtin_reps_are_unitary_involutions() {
    for rep in builtin_reps() {
        let m = &rep.matrix;
        assert!(max_abs_diff(&(m * m.adjoint()), &identity(4)) < 1e-12);
        assert_eq!(m * m, identity(4), "{} squared is not exactly I", rep.name);
    }
}
