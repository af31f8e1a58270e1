//! Dense statevector simulation for small registers.
//!
//! Conventions used throughout the crate:
//!
//! * Every rotation is `U(θ) = exp(-i θ G / 2)` with generator `G ∈ {X, Y, Z, Z⊗Z}`.
//!   Because `G² = I`, `U(θ) = cos(θ/2) I - i sin(θ/2) G`, the two-term
//!   parameter-shift rule with shift `π/2` is exact, and `U(θ + 4π) = U(θ)`.
//! * Qubit 0 is the most significant bit of the basis index, so a two-qubit
//!   operator `A ⊗ B` acts with `A` on qubit 0 and `B` on qubit 1, and basis
//!   index `2·a + b` is the ket `|ab⟩`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;

/// Largest register the simulator accepts.
pub const MAX_QUBITS: usize = 8;

const HERMITIAN_TOL: f64 = 1e-12;
const IMAG_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    Rx,
    Ry,
    Rz,
    Rzz,
}

impl GateKind {
    pub fn arity(self) -> usize {
        match self {
            GateKind::Rzz => 2,
            _ => 1,
        }
    }

    /// The Hermitian, involutory generator `G` of the rotation.
    pub fn generator(self) -> CMatrix {
        let z = C64::new(0.0, 0.0);
        let one = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        match self {
            GateKind::Rx => CMatrix::from_row_slice(2, 2, &[z, one, one, z]),
            GateKind::Ry => CMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
            GateKind::Rz => CMatrix::from_row_slice(2, 2, &[one, z, z, -one]),
            GateKind::Rzz => {
                let pz = GateKind::Rz.generator();
                pz.kronecker(&pz)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub targets: Vec<usize>,
    pub angle: f64,
}

impl Gate {
    pub fn new(kind: GateKind, targets: Vec<usize>, angle: f64) -> Self {
        Gate {
            kind,
            targets,
            angle,
        }
    }

    pub fn rx(qubit: usize, angle: f64) -> Self {
        Gate::new(GateKind::Rx, vec![qubit], angle)
    }

    pub fn ry(qubit: usize, angle: f64) -> Self {
        Gate::new(GateKind::Ry, vec![qubit], angle)
    }

    pub fn rz(qubit: usize, angle: f64) -> Self {
        Gate::new(GateKind::Rz, vec![qubit], angle)
    }

    pub fn rzz(a: usize, b: usize, angle: f64) -> Self {
        Gate::new(GateKind::Rzz, vec![a, b], angle)
    }

    /// Dense 2×2 or 4×4 unitary on the gate's own targets.
    pub fn unitary(&self) -> CMatrix {
        gate_unitary(self)
    }
}

/// Dense unitary `cos(θ/2) I - i sin(θ/2) G` for the gate's kind and angle.
pub fn gate_unitary(gate: &Gate) -> CMatrix {
    let g = gate.kind.generator();
    let (s, c) = (gate.angle / 2.0).sin_cos();
    let dim = g.nrows();
    CMatrix::identity(dim, dim) * C64::new(c, 0.0) + g * C64::new(0.0, -s)
}

/// The gate's unitary embedded into the full `2ⁿ × 2ⁿ` operator on an
/// `n_qubits` register. Verification tooling only; simulation uses the
/// in-place kernels on [`StateVector`].
pub fn embed_gate(gate: &Gate, n_qubits: usize) -> Result<CMatrix> {
    check_targets(gate.kind, &gate.targets, n_qubits)?;
    let dim = 1usize << n_qubits;
    let mut op = CMatrix::zeros(dim, dim);
    for col in 0..dim {
        let mut basis = StateVector::basis(n_qubits, col)?;
        basis.apply_unchecked(gate.kind, &gate.targets, gate.angle);
        for (row, amp) in basis.amps.iter().enumerate() {
            op[(row, col)] = *amp;
        }
    }
    Ok(op)
}

/// Product of a gate sequence as one dense operator (first gate applied first).
pub fn circuit_unitary(gates: &[Gate], n_qubits: usize) -> Result<CMatrix> {
    let dim = 1usize << n_qubits;
    let mut total = CMatrix::identity(dim, dim);
    for gate in gates {
        total = embed_gate(gate, n_qubits)? * total;
    }
    Ok(total)
}

fn check_targets(kind: GateKind, targets: &[usize], n_qubits: usize) -> Result<()> {
    if targets.len() != kind.arity() {
        return Err(Error::Arity {
            kind,
            expected: kind.arity(),
            got: targets.len(),
        });
    }
    for &t in targets {
        if t >= n_qubits {
            return Err(Error::TargetOutOfRange {
                target: t,
                n_qubits,
            });
        }
    }
    if targets.len() == 2 && targets[0] == targets[1] {
        return Err(Error::DuplicateTargets(targets[0]));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<C64>,
}

impl StateVector {
    /// `|0…0⟩` on `n_qubits` qubits.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        Self::basis(n_qubits, 0)
    }

    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::QubitCount(n_qubits));
        }
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: index,
            });
        }
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[index] = C64::new(1.0, 0.0);
        Ok(StateVector { n_qubits, amps })
    }

    /// Wraps raw amplitudes; the length must be a power of two and the
    /// state normalized to 1e-10.
    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        let dim = amps.len();
        if dim < 2 || !dim.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(dim));
        }
        let n_qubits = dim.trailing_zeros() as usize;
        if n_qubits > MAX_QUBITS {
            return Err(Error::QubitCount(n_qubits));
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized(norm));
        }
        Ok(StateVector { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        self.apply(gate.kind, &gate.targets, gate.angle)
    }

    /// Applies `exp(-i θ G / 2)` of `kind` on `targets` in place.
    pub fn apply(&mut self, kind: GateKind, targets: &[usize], angle: f64) -> Result<()> {
        check_targets(kind, targets, self.n_qubits)?;
        self.apply_unchecked(kind, targets, angle);
        Ok(())
    }

    pub(crate) fn apply_unchecked(&mut self, kind: GateKind, targets: &[usize], angle: f64) {
        let (s, c) = (angle / 2.0).sin_cos();
        match kind {
            GateKind::Rx => {
                let m = [
                    C64::new(c, 0.0),
                    C64::new(0.0, -s),
                    C64::new(0.0, -s),
                    C64::new(c, 0.0),
                ];
                self.apply_single(targets[0], m);
            }
            GateKind::Ry => {
                let m = [
                    C64::new(c, 0.0),
                    C64::new(-s, 0.0),
                    C64::new(s, 0.0),
                    C64::new(c, 0.0),
                ];
                self.apply_single(targets[0], m);
            }
            GateKind::Rz => {
                let minus = C64::new(c, -s);
                let plus = C64::new(c, s);
                let mask = self.mask(targets[0]);
                for (i, a) in self.amps.iter_mut().enumerate() {
                    *a *= if i & mask == 0 { minus } else { plus };
                }
            }
            GateKind::Rzz => {
                let minus = C64::new(c, -s);
                let plus = C64::new(c, s);
                let ma = self.mask(targets[0]);
                let mb = self.mask(targets[1]);
                for (i, a) in self.amps.iter_mut().enumerate() {
                    // Z⊗Z eigenvalue is +1 when the two bits agree.
                    let agree = ((i & ma) == 0) == ((i & mb) == 0);
                    *a *= if agree { minus } else { plus };
                }
            }
        }
    }

    fn mask(&self, qubit: usize) -> usize {
        1usize << (self.n_qubits - 1 - qubit)
    }

    fn apply_single(&mut self, qubit: usize, m: [C64; 4]) {
        let mask = self.mask(qubit);
        for i in 0..self.amps.len() {
            if i & mask != 0 {
                continue;
            }
            let j = i | mask;
            let (a0, a1) = (self.amps[i], self.amps[j]);
            self.amps[i] = m[0] * a0 + m[1] * a1;
            self.amps[j] = m[2] * a0 + m[3] * a1;
        }
    }

    /// Multiplies by a dense `2ⁿ × 2ⁿ` operator.
    pub fn apply_matrix(&mut self, op: &CMatrix) -> Result<()> {
        let dim = self.dim();
        if op.nrows() != dim || op.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: op.nrows(),
            });
        }
        let v = nalgebra::DVector::from_column_slice(&self.amps);
        let out = op * v;
        self.amps.copy_from_slice(out.as_slice());
        Ok(())
    }

    /// `⟨ψ|O|ψ⟩`. The imaginary part of the raw inner product is checked
    /// against 1e-10 and then dropped.
    pub fn expectation(&self, obs: &Observable) -> Result<f64> {
        let dim = self.dim();
        if obs.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: obs.dim(),
            });
        }
        let m = obs.matrix();
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..dim {
            let mut row = C64::new(0.0, 0.0);
            for j in 0..dim {
                row += m[(i, j)] * self.amps[j];
            }
            acc += self.amps[i].conj() * row;
        }
        assert!(
            acc.im.abs() < IMAG_TOL,
            "expectation of a Hermitian observable has imaginary part {}",
            acc.im
        );
        Ok(acc.re)
    }

    /// Maximum entrywise deviation from another state of the same size.
    pub fn max_abs_diff(&self, other: &StateVector) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Pure form of [`StateVector::apply_gate`].
pub fn apply_gate(state: &StateVector, gate: &Gate) -> Result<StateVector> {
    let mut out = state.clone();
    out.apply_gate(gate)?;
    Ok(out)
}

pub fn expectation(state: &StateVector, obs: &Observable) -> Result<f64> {
    state.expectation(obs)
}

/// A Hermitian readout operator.
#[derive(Clone, Debug, PartialEq)]
pub struct Observable {
    matrix: CMatrix,
}

impl Observable {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let dim = matrix.nrows();
        if matrix.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: matrix.ncols(),
            });
        }
        if dim < 2 || !dim.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(dim));
        }
        let dev = max_abs_diff(&matrix, &matrix.adjoint());
        if dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian(dev));
        }
        Ok(Observable { matrix })
    }

    /// Builds a real symmetric observable `scale · rows`.
    pub fn from_real_rows(dim: usize, scale: f64, rows: &[f64]) -> Result<Self> {
        if rows.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                got: rows.len(),
            });
        }
        let data: Vec<C64> = rows.iter().map(|&r| C64::new(scale * r, 0.0)).collect();
        Self::new(CMatrix::from_row_slice(dim, dim, &data))
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Eigenvalues in ascending order.
    pub fn spectrum(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self
            .matrix
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }
}

/// `max |a_ij - b_ij|`; `f64::INFINITY` when the shapes differ.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    if a.shape() != b.shape() {
        return f64::INFINITY;
    }
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}
