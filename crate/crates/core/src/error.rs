use thiserror::Error;

use crate::qsim::GateKind;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit count {0} outside supported range 1..={max}", max = crate::qsim::MAX_QUBITS)]
    QubitCount(usize),
    #[error("target qubit {target} out of range for a {n_qubits}-qubit register")]
    TargetOutOfRange { target: usize, n_qubits: usize },
    #[error("duplicate target qubit {0}")]
    DuplicateTargets(usize),
    #[error("{kind:?} acts on {expected} qubit(s), got {got} target(s)")]
    Arity {
        kind: GateKind,
        expected: usize,
        got: usize,
    },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("length {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),
    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),
    #[error("circuit depth must be at least 1")]
    ZeroDepth,
    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("only one class present in labels")]
    SingleClass,
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("label {0} is not 0 or 1")]
    InvalidLabel(u8),
    #[error("point ({0}, {1}) lies outside the unit square")]
    PointOutOfRange(f64, f64),
    #[error("parameter budget {target} is below the smallest achievable count {min}")]
    BudgetTooSmall { target: usize, min: usize },
    #[error("unsupported combination: {model} on {dataset}")]
    Unsupported { model: String, dataset: String },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
