//! Concrete Z₂×Z₂ actions: on points of the square, and as 4×4 unitaries on
//! the two-qubit register, with numerical checks tying the two together.
//!
//! The three non-trivial unitaries are basis permutations:
//!
//! | rep  | matrix              | basis action      | intertwines (with `RZ(x₁)⊗RZ(x₂)`) |
//! |------|---------------------|-------------------|------------------------------------|
//! | `S`  | SWAP                | `|ab⟩ → |ba⟩`     | `(x₁,x₂) → (x₂,x₁)`                |
//! | `A`  | anti-diagonal = X⊗X | `|ab⟩ → |āb̄⟩`     | `(x₁,x₂) → (−x₁,−x₂)`              |
//! | `SA` | S·A                 | `|ab⟩ → |b̄ā⟩`     | `(x₁,x₂) → (−x₂,−x₁)`              |
//!
//! `A` is the matrix usually written for the anti-diagonal reflection. With
//! the RZ angle embedding it realizes the point inversion instead, and it is
//! `SA` that realizes the reflection about `x₁ = −x₂`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::datasets::Point2;
use crate::error::{Error, Result};
use crate::qsim::{circuit_unitary, max_abs_diff, CMatrix, Gate, GateKind, Observable, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PointTransform {
    Identity,
    /// Reflection about `x₁ = x₂`.
    DiagSwap,
    /// Reflection about `x₁ = −x₂`.
    AntiDiagNegSwap,
    /// Both reflections: `(x₁,x₂) → (−x₁,−x₂)`.
    Both,
}

impl PointTransform {
    pub const NON_TRIVIAL: [PointTransform; 3] = [
        PointTransform::DiagSwap,
        PointTransform::AntiDiagNegSwap,
        PointTransform::Both,
    ];

    pub fn apply(self, p: Point2) -> Point2 {
        match self {
            PointTransform::Identity => p,
            PointTransform::DiagSwap => Point2::new(p.x2, p.x1),
            PointTransform::AntiDiagNegSwap => Point2::new(-p.x2, -p.x1),
            PointTransform::Both => Point2::new(-p.x1, -p.x2),
        }
    }

    /// Group product (the Klein four-group is abelian).
    pub fn compose(self, other: PointTransform) -> PointTransform {
        use PointTransform::*;
        match (self, other) {
            (Identity, t) | (t, Identity) => t,
            (a, b) if a == b => Identity,
            (DiagSwap, AntiDiagNegSwap) | (AntiDiagNegSwap, DiagSwap) => Both,
            (DiagSwap, Both) | (Both, DiagSwap) => AntiDiagNegSwap,
            (AntiDiagNegSwap, Both) | (Both, AntiDiagNegSwap) => DiagSwap,
            _ => unreachable!(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LabelAction {
    Invariant,
    Flip,
}

#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryRep {
    pub name: &'static str,
    pub matrix: CMatrix,
    /// The point transform this unitary intertwines with the RZ embedding.
    pub transform: PointTransform,
}

fn permutation_matrix(perm: [usize; 4]) -> CMatrix {
    let mut m = CMatrix::zeros(4, 4);
    for (col, &row) in perm.iter().enumerate() {
        m[(row, col)] = C64::new(1.0, 0.0);
    }
    m
}

pub fn swap_rep() -> UnitaryRep {
    UnitaryRep {
        name: "S",
        matrix: permutation_matrix([0, 2, 1, 3]),
        transform: PointTransform::DiagSwap,
    }
}

/// The anti-diagonal matrix, equal to X⊗X.
pub fn flip_rep() -> UnitaryRep {
    UnitaryRep {
        name: "A",
        matrix: permutation_matrix([3, 2, 1, 0]),
        transform: PointTransform::Both,
    }
}

pub fn swap_flip_rep() -> UnitaryRep {
    UnitaryRep {
        name: "SA",
        matrix: swap_rep().matrix * flip_rep().matrix,
        transform: PointTransform::AntiDiagNegSwap,
    }
}

/// `S`, `A` and `SA`, in that order.
pub fn builtin_reps() -> Vec<UnitaryRep> {
    vec![swap_rep(), flip_rep(), swap_flip_rep()]
}

/// How a gate template is laid out on the two-qubit register when checked.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Placement {
    /// Single-qubit kinds on every qubit with one shared angle; RZZ on (0, 1).
    Broadcast,
    /// On the given targets only, identity elsewhere.
    On(Vec<usize>),
}

/// The 16 angles `2πk/16`, `k = 0..16`.
pub fn angle_grid() -> impl Iterator<Item = f64> {
    (0..16).map(|k| 2.0 * PI * k as f64 / 16.0)
}

/// Dense operator of a gate template at `angle` on a register of `n_qubits`.
pub fn placed_unitary(
    kind: GateKind,
    placement: &Placement,
    angle: f64,
    n_qubits: usize,
) -> Result<CMatrix> {
    let gates: Vec<Gate> = match placement {
        Placement::On(targets) => vec![Gate::new(kind, targets.clone(), angle)],
        Placement::Broadcast if kind == GateKind::Rzz => (0..n_qubits - 1)
            .map(|q| Gate::rzz(q, q + 1, angle))
            .collect(),
        Placement::Broadcast => (0..n_qubits)
            .map(|q| Gate::new(kind, vec![q], angle))
            .collect(),
    };
    circuit_unitary(&gates, n_qubits)
}

/// `max over the angle grid of ‖U(θ)·U_g − U_g·U(θ)‖_max`.
pub fn check_gate_equivariance(
    kind: GateKind,
    placement: &Placement,
    rep: &UnitaryRep,
) -> Result<f64> {
    let n_qubits = rep_qubits(rep)?;
    let mut worst = 0.0f64;
    for theta in angle_grid() {
        let u = placed_unitary(kind, placement, theta, n_qubits)?;
        let lhs = &u * &rep.matrix;
        let rhs = &rep.matrix * &u;
        worst = worst.max(max_abs_diff(&lhs, &rhs));
    }
    Ok(worst)
}

fn rep_qubits(rep: &UnitaryRep) -> Result<usize> {
    let dim = rep.matrix.nrows();
    if !dim.is_power_of_two() || dim < 2 {
        return Err(Error::NotPowerOfTwo(dim));
    }
    Ok(dim.trailing_zeros() as usize)
}

/// `U_g† O U_g`.
pub fn conjugate_observable(obs: &Observable, rep: &UnitaryRep) -> Result<Observable> {
    if obs.dim() != rep.matrix.nrows() {
        return Err(Error::DimensionMismatch {
            expected: rep.matrix.nrows(),
            got: obs.dim(),
        });
    }
    let m = rep.matrix.adjoint() * obs.matrix() * &rep.matrix;
    // Products of permutation matrices with a Hermitian matrix stay
    // Hermitian up to rounding; symmetrize so validation never trips on it.
    let sym = (&m + m.adjoint()) * C64::new(0.5, 0.0);
    Observable::new(sym)
}

/// The angle embedding `RZ(x₁) ⊗ RZ(x₂)`.
pub fn embedding_unitary(p: Point2) -> CMatrix {
    Gate::rz(0, p.x1)
        .unitary()
        .kronecker(&Gate::rz(0, p.x2).unitary())
}

/// `max over samples of ‖U_g E(x) U_g† − E(g·x)‖_max`.
pub fn check_embedding_intertwiner(
    rep: &UnitaryRep,
    transform: PointTransform,
    samples: &[Point2],
) -> f64 {
    samples
        .iter()
        .map(|&p| {
            let lhs = &rep.matrix * embedding_unitary(p) * rep.matrix.adjoint();
            let rhs = embedding_unitary(transform.apply(p));
            max_abs_diff(&lhs, &rhs)
        })
        .fold(0.0, f64::max)
}

/// A rep matches a transform when the intertwiner deviation is below this.
pub const INTERTWINER_TOL: f64 = 1e-10;

pub fn matches_transform(rep: &UnitaryRep, transform: PointTransform, samples: &[Point2]) -> bool {
    check_embedding_intertwiner(rep, transform, samples) < INTERTWINER_TOL
}
