//! Exact statevector simulation of small variational circuits, equivariant
//! and plain quantum/classical classifiers, and the evaluation metrics used to
//! compare them on three Z2×Z2-structured toy datasets in the unit square.
//!
//! All rotation gates follow `U(θ) = exp(−iθG/2)` with `G ∈ {X, Y, Z, Z⊗Z}`,
//! which makes the two-term parameter-shift rule (shift `π/2`) exact. Qubit 0
//! is the most significant bit of a basis-state index.

pub mod classical_models;
pub mod classifier;
pub mod datasets;
pub mod error;
pub mod experiment;
pub mod metrics;
pub mod qsim;
pub mod quantum_models;
pub mod rng;
pub mod symmetry;
pub mod training;
pub mod verify;

pub use classical_models::{Activation, DenseNet, EnnNet, Orbit};
pub use classifier::{Checkpoint, Classifier, Prediction};
pub use datasets::{DatasetKind, LabeledDataset, Point2};
pub use error::{Error, Result};
pub use experiment::{ExperimentConfig, ModelKind, ModelSpec, RunReport};
pub use metrics::RocCurve;
pub use qsim::{Gate, GateKind, Observable, StateVector};
pub use quantum_models::{LossKind, ParamCircuit, QuantumArch, QuantumModel, Scores};
pub use rng::Stream;
pub use symmetry::{PointTransform, UnitaryRep};
pub use training::{AdamState, TrainConfig, TrainTrace};
