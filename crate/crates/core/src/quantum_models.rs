//! Parameterized circuits for the single-qubit data re-uploading classifier
//! (QNN) and the two-qubit Z₂×Z₂-equivariant classifier (EQNN), their
//! readout observables, and the three losses.

use std::f64::consts::{FRAC_PI_2, PI};
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::classifier::{Classifier, Prediction};
use crate::datasets::{DatasetKind, Point2};
use crate::error::{Error, Result};
use crate::qsim::{GateKind, Observable, StateVector};
use crate::rng::{stream_rng, Stream};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum ParamBinding {
    Feature(usize),
    Trainable(usize),
    Constant(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct CircuitOp {
    pub kind: GateKind,
    pub targets: Vec<usize>,
    pub binding: ParamBinding,
}

impl CircuitOp {
    fn new(kind: GateKind, targets: &[usize], binding: ParamBinding) -> Self {
        CircuitOp {
            kind,
            targets: targets.to_vec(),
            binding,
        }
    }
}

/// An ordered gate list whose angles come from the input point, a trainable
/// slot, or a constant. Slots may be shared by several gates.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamCircuit {
    n_qubits: usize,
    ops: Vec<CircuitOp>,
    n_trainable: usize,
}

impl ParamCircuit {
    pub fn new(n_qubits: usize, ops: Vec<CircuitOp>, n_trainable: usize) -> Result<Self> {
        StateVector::zero(n_qubits)?;
        let mut used = vec![false; n_trainable];
        for op in &ops {
            // Surface arity/target errors up front rather than mid-training.
            StateVector::zero(n_qubits)?.apply(op.kind, &op.targets, 0.0)?;
            match op.binding {
                ParamBinding::Feature(i) if i >= 2 => {
                    return Err(Error::InvalidCircuit(format!("feature index {i} >= 2")))
                }
                ParamBinding::Trainable(s) if s >= n_trainable => {
                    return Err(Error::InvalidCircuit(format!(
                        "trainable slot {s} >= {n_trainable}"
                    )))
                }
                ParamBinding::Trainable(s) => used[s] = true,
                _ => {}
            }
        }
        if let Some(s) = used.iter().position(|u| !u) {
            return Err(Error::InvalidCircuit(format!(
                "trainable slot {s} is not referenced by any gate"
            )));
        }
        Ok(ParamCircuit {
            n_qubits,
            ops,
            n_trainable,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_trainable(&self) -> usize {
        self.n_trainable
    }

    pub fn ops(&self) -> &[CircuitOp] {
        &self.ops
    }

    fn angle(&self, op: &CircuitOp, params: &[f64], p: Point2) -> f64 {
        match op.binding {
            ParamBinding::Feature(0) => p.x1,
            ParamBinding::Feature(_) => p.x2,
            ParamBinding::Trainable(s) => params[s],
            ParamBinding::Constant(c) => c,
        }
    }

    /// Runs the circuit from `|0…0⟩`.
    pub fn run(&self, params: &[f64], p: Point2) -> StateVector {
        self.run_shifted(params, p, None)
    }

    /// Runs the circuit with the angle of gate `shift.0` offset by `shift.1`.
    pub fn run_shifted(
        &self,
        params: &[f64],
        p: Point2,
        shift: Option<(usize, f64)>,
    ) -> StateVector {
        assert_eq!(params.len(), self.n_trainable, "parameter vector length");
        let mut state = StateVector::zero(self.n_qubits).expect("validated qubit count");
        for (k, op) in self.ops.iter().enumerate() {
            let mut angle = self.angle(op, params, p);
            if let Some((idx, delta)) = shift {
                if idx == k {
                    angle += delta;
                }
            }
            state.apply_unchecked(op.kind, &op.targets, angle);
        }
        state
    }

    /// Indices of gates bound to a trainable slot, with the slot.
    pub fn trainable_ops(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.ops
            .iter()
            .enumerate()
            .filter_map(|(k, op)| match op.binding {
                ParamBinding::Trainable(s) => Some((k, s)),
                _ => None,
            })
    }
}

/// Single-qubit re-uploading circuit. Each block is the embedding
/// `RZ(x₁), RY(x₂), RZ(0)` followed by trainable `RZ, RY, RZ`.
pub fn build_qnn(depth: usize) -> Result<ParamCircuit> {
    if depth == 0 {
        return Err(Error::ZeroDepth);
    }
    use ParamBinding::*;
    let mut ops = Vec::with_capacity(6 * depth);
    for d in 0..depth {
        ops.push(CircuitOp::new(GateKind::Rz, &[0], Feature(0)));
        ops.push(CircuitOp::new(GateKind::Ry, &[0], Feature(1)));
        ops.push(CircuitOp::new(GateKind::Rz, &[0], Constant(0.0)));
        ops.push(CircuitOp::new(GateKind::Rz, &[0], Trainable(3 * d)));
        ops.push(CircuitOp::new(GateKind::Ry, &[0], Trainable(3 * d + 1)));
        ops.push(CircuitOp::new(GateKind::Rz, &[0], Trainable(3 * d + 2)));
    }
    ParamCircuit::new(1, ops, 3 * depth)
}

/// Two-qubit equivariant circuit.
///
/// A constant `RY(π/2)` on each qubit first prepares `|++⟩`, the one product
/// state fixed by every Z₂×Z₂ representation used here (`|00⟩` is mapped to
/// `|11⟩` by the bit-flip reps). Each block is then `RZ(x₁)` on qubit 0,
/// `RZ(x₂)` on qubit 1, `RX(θ₁)` on both qubits sharing one slot, and
/// `RZZ(θ₂)` on (0, 1).
pub fn build_eqnn(depth: usize) -> Result<ParamCircuit> {
    if depth == 0 {
        return Err(Error::ZeroDepth);
    }
    use ParamBinding::*;
    let mut ops = vec![
        CircuitOp::new(GateKind::Ry, &[0], Constant(FRAC_PI_2)),
        CircuitOp::new(GateKind::Ry, &[1], Constant(FRAC_PI_2)),
    ];
    for d in 0..depth {
        ops.push(CircuitOp::new(GateKind::Rz, &[0], Feature(0)));
        ops.push(CircuitOp::new(GateKind::Rz, &[1], Feature(1)));
        ops.push(CircuitOp::new(GateKind::Rx, &[0], Trainable(2 * d)));
        ops.push(CircuitOp::new(GateKind::Rx, &[1], Trainable(2 * d)));
        ops.push(CircuitOp::new(GateKind::Rzz, &[0, 1], Trainable(2 * d + 1)));
    }
    ParamCircuit::new(2, ops, 2 * depth)
}

/// The readout observables, with the integer entries as printed.
pub mod observables {
    use super::*;

    pub fn reupload_pair() -> (Observable, Observable) {
        (
            Observable::from_real_rows(2, 1.0, &[1.0, 0.0, 0.0, 0.0]).expect("hermitian"),
            Observable::from_real_rows(2, 1.0, &[0.0, 0.0, 0.0, 1.0]).expect("hermitian"),
        )
    }

    pub const SYMMETRIC: [f64; 16] = [1.0; 16];

    #[rustfmt::skip]
    pub const ANTISYMMETRIC_1: [f64; 16] = [
         1.0,  1.0,  1.0, -1.0,
         1.0,  1.0,  1.0, -1.0,
         1.0,  1.0,  1.0, -1.0,
        -1.0, -1.0, -1.0,  1.0,
    ];
    #[rustfmt::skip]
    pub const ANTISYMMETRIC_2: [f64; 16] = [
         1.0, -1.0, -1.0, -1.0,
        -1.0,  1.0,  1.0,  1.0,
        -1.0,  1.0,  1.0,  1.0,
        -1.0,  1.0,  1.0,  1.0,
    ];
    #[rustfmt::skip]
    pub const FULLY_ANTISYMMETRIC_1: [f64; 16] = [
         1.0, -1.0,  1.0,  1.0,
        -1.0,  1.0, -1.0,  1.0,
         1.0, -1.0,  1.0, -1.0,
         1.0,  1.0, -1.0,  1.0,
    ];
    #[rustfmt::skip]
    pub const FULLY_ANTISYMMETRIC_2: [f64; 16] = [
         1.0,  1.0, -1.0,  1.0,
         1.0,  1.0, -1.0, -1.0,
        -1.0, -1.0,  1.0,  1.0,
         1.0, -1.0,  1.0,  1.0,
    ];

    fn quarter(rows: &[f64; 16]) -> Observable {
        Observable::from_real_rows(4, 0.25, rows).expect("printed observables are symmetric")
    }

    pub fn symmetric() -> Observable {
        quarter(&SYMMETRIC)
    }

    pub fn antisymmetric_pair() -> (Observable, Observable) {
        (quarter(&ANTISYMMETRIC_1), quarter(&ANTISYMMETRIC_2))
    }

    pub fn fully_antisymmetric_pair() -> (Observable, Observable) {
        (
            quarter(&FULLY_ANTISYMMETRIC_1),
            quarter(&FULLY_ANTISYMMETRIC_2),
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LossKind {
    /// `y(1 − s₁)² + (1 − y)(1 − s₂)²` with the QNN projectors.
    ReuploadPair,
    /// Binary cross-entropy on a single invariant readout.
    SymmetricBce,
    /// The pair loss with observables swapped by the symmetry.
    AntiPair,
}

impl LossKind {
    pub fn n_readouts(self) -> usize {
        match self {
            LossKind::SymmetricBce => 1,
            _ => 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum QuantumArch {
    Qnn,
    Eqnn,
}

impl QuantumArch {
    pub fn as_str(self) -> &'static str {
        match self {
            QuantumArch::Qnn => "QNN",
            QuantumArch::Eqnn => "EQNN",
        }
    }

    /// Trainable parameters per depth block.
    pub fn params_per_layer(self) -> usize {
        match self {
            QuantumArch::Qnn => 3,
            QuantumArch::Eqnn => 2,
        }
    }
}

impl FromStr for QuantumArch {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "qnn" => Ok(QuantumArch::Qnn),
            "eqnn" => Ok(QuantumArch::Eqnn),
            other => Err(Error::Parse(format!(
                "unknown quantum architecture '{other}'"
            ))),
        }
    }
}

/// Per-readout absolute expectation values `|⟨ψ|O_k|ψ⟩|`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Scores {
    Single(f64),
    Pair(f64, f64),
}

/// Clamp applied to the BCE score before taking logs.
pub const BCE_CLAMP: f64 = 1e-7;

pub fn loss_from_scores(kind: LossKind, scores: Scores, y: u8) -> f64 {
    let y = f64::from(y);
    match (kind, scores) {
        (LossKind::SymmetricBce, Scores::Single(s)) => {
            let s = s.clamp(BCE_CLAMP, 1.0 - BCE_CLAMP);
            -(y * s.ln() + (1.0 - y) * (1.0 - s).ln())
        }
        (LossKind::ReuploadPair | LossKind::AntiPair, Scores::Pair(s1, s2)) => {
            y * (1.0 - s1).powi(2) + (1.0 - y) * (1.0 - s2).powi(2)
        }
        (kind, scores) => panic!("{kind:?} does not take {scores:?}"),
    }
}

/// `dL/ds_k` for each readout score.
pub(crate) fn loss_score_derivative(kind: LossKind, scores: &[f64], y: u8) -> Vec<f64> {
    let y = f64::from(y);
    match kind {
        LossKind::SymmetricBce => {
            let s = scores[0];
            if s <= BCE_CLAMP || s >= 1.0 - BCE_CLAMP {
                vec![0.0]
            } else {
                vec![-y / s + (1.0 - y) / (1.0 - s)]
            }
        }
        LossKind::ReuploadPair | LossKind::AntiPair => vec![
            -2.0 * y * (1.0 - scores[0]),
            -2.0 * (1.0 - y) * (1.0 - scores[1]),
        ],
    }
}

/// Pair scores map to `s₁ / (s₁ + s₂)` (0.5 when both vanish); class 1 only
/// strictly above 0.5.
pub fn predict_from_scores(scores: Scores) -> Prediction {
    let score = match scores {
        Scores::Single(s) => s,
        Scores::Pair(s1, s2) => {
            let total = s1 + s2;
            if total > 0.0 {
                s1 / total
            } else {
                0.5
            }
        }
    };
    Prediction {
        class: u8::from(score > 0.5),
        score,
    }
}

#[derive(Clone, Debug)]
pub struct QuantumModel {
    pub arch: QuantumArch,
    pub depth: usize,
    pub circuit: ParamCircuit,
    pub readouts: Vec<Observable>,
    pub loss_kind: LossKind,
    pub params: Vec<f64>,
    readout_name: &'static str,
}

impl QuantumModel {
    pub fn new(
        arch: QuantumArch,
        depth: usize,
        circuit: ParamCircuit,
        readouts: Vec<Observable>,
        loss_kind: LossKind,
        params: Vec<f64>,
        readout_name: &'static str,
    ) -> Result<Self> {
        if readouts.len() != loss_kind.n_readouts() {
            return Err(Error::InvalidCircuit(format!(
                "{loss_kind:?} needs {} readout(s), got {}",
                loss_kind.n_readouts(),
                readouts.len()
            )));
        }
        let dim = 1usize << circuit.n_qubits();
        if let Some(o) = readouts.iter().find(|o| o.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: o.dim(),
            });
        }
        if params.len() != circuit.n_trainable() {
            return Err(Error::LengthMismatch {
                expected: circuit.n_trainable(),
                got: params.len(),
            });
        }
        Ok(QuantumModel {
            arch,
            depth,
            circuit,
            readouts,
            loss_kind,
            params,
            readout_name,
        })
    }

    /// The model used for `dataset`: QNN always reads out the two
    /// computational-basis projectors; EQNN picks the readout matching the
    /// dataset's symmetry. Parameters start uniform on `[0, 2π)`.
    pub fn for_dataset(
        arch: QuantumArch,
        depth: usize,
        dataset: DatasetKind,
        seed: u64,
    ) -> Result<Self> {
        let circuit = match arch {
            QuantumArch::Qnn => build_qnn(depth)?,
            QuantumArch::Eqnn => build_eqnn(depth)?,
        };
        let (readouts, loss_kind, name) = match (arch, dataset) {
            (QuantumArch::Qnn, _) => {
                let (a, b) = observables::reupload_pair();
                (vec![a, b], LossKind::ReuploadPair, "projectors")
            }
            (QuantumArch::Eqnn, DatasetKind::Symmetric) => (
                vec![observables::symmetric()],
                LossKind::SymmetricBce,
                "symmetric",
            ),
            (QuantumArch::Eqnn, DatasetKind::AntiSymmetric) => {
                let (a, b) = observables::antisymmetric_pair();
                (vec![a, b], LossKind::AntiPair, "anti-symmetric")
            }
            (QuantumArch::Eqnn, DatasetKind::FullyAntiSymmetric) => {
                let (a, b) = observables::fully_antisymmetric_pair();
                (vec![a, b], LossKind::AntiPair, "fully-anti-symmetric")
            }
        };
        let mut rng = stream_rng(seed, Stream::Init);
        let params = (0..circuit.n_trainable())
            .map(|_| rng.random_range(0.0..2.0 * PI))
            .collect();
        Self::new(arch, depth, circuit, readouts, loss_kind, params, name)
    }

    /// Signed expectation values for an arbitrary parameter vector.
    pub fn expectations_with(
        &self,
        params: &[f64],
        p: Point2,
        shift: Option<(usize, f64)>,
    ) -> Vec<f64> {
        let state = self.circuit.run_shifted(params, p, shift);
        self.readouts
            .iter()
            .map(|o| state.expectation(o).expect("validated dimensions"))
            .collect()
    }

    pub fn expectations(&self, p: Point2) -> Vec<f64> {
        self.expectations_with(&self.params, p, None)
    }

    pub fn forward(&self, p: Point2) -> Scores {
        scores_of(&self.expectations(p))
    }
}

pub(crate) fn scores_of(expectations: &[f64]) -> Scores {
    match expectations {
        [e] => Scores::Single(e.abs()),
        [a, b] => Scores::Pair(a.abs(), b.abs()),
        _ => unreachable!("one or two readouts"),
    }
}

impl Classifier for QuantumModel {
    fn params(&self) -> &[f64] {
        &self.params
    }

    fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    fn loss(&self, p: Point2, y: u8) -> f64 {
        loss_from_scores(self.loss_kind, self.forward(p), y)
    }

    fn loss_and_gradient(&self, p: Point2, y: u8) -> (f64, Vec<f64>) {
        let loss = self.loss(p, y);
        (loss, crate::training::param_shift_gradient(self, p, y))
    }

    fn predict(&self, p: Point2) -> Prediction {
        predict_from_scores(self.forward(p))
    }

    fn describe(&self) -> String {
        format!(
            "{} depth={} readout={}",
            self.arch.as_str(),
            self.depth,
            self.readout_name
        )
    }
}
