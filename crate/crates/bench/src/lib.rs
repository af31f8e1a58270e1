//! Fixed inputs shared by the kernel benchmarks.

use eqnn_core::datasets::sample;
use eqnn_core::{Activation, DatasetKind, DenseNet, Point2, QuantumArch, QuantumModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Depth-10 EQNN on the fully anti-symmetric dataset (20 parameters).
pub fn eqnn_fixture() -> QuantumModel {
    QuantumModel::for_dataset(QuantumArch::Eqnn, 10, DatasetKind::FullyAntiSymmetric, 0)
        .expect("valid model")
}

/// Depth-5 re-uploading QNN (15 parameters).
pub fn qnn_fixture() -> QuantumModel {
    QuantumModel::for_dataset(QuantumArch::Qnn, 5, DatasetKind::AntiSymmetric, 0)
        .expect("valid model")
}

/// The 105-parameter dense net: two hidden layers of 8, logistic output.
pub fn dnn_fixture() -> DenseNet {
    DenseNet::new(vec![2, 8, 8, 1], Activation::Tanh, 0).expect("valid net")
}

pub fn point() -> Point2 {
    Point2::new(0.3, -0.7)
}

/// `n` uniform scores with alternating labels.
pub fn scores(n: usize) -> (Vec<f64>, Vec<u8>) {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let s = (0..n).map(|_| rng.random()).collect();
    let y = (0..n).map(|i| (i % 2) as u8).collect();
    (s, y)
}

pub fn training_points(n: usize) -> eqnn_core::LabeledDataset {
    sample(DatasetKind::FullyAntiSymmetric, n, 0).expect("nonempty")
}
