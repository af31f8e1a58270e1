//! Self-check suites: exact symmetry identities, analytic gradients against
//! finite differences, and the ROC-area cross-check. Each check reports its
//! worst deviation so failures say by how much.

use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::classical_models::{dense_param_count, Activation, DenseNet, EnnNet, Orbit};
use crate::classifier::Classifier;
use crate::datasets::{verify_dataset_symmetry, DatasetKind, Point2};
use crate::error::Result;
use crate::metrics::{auc, auc_oracle, roc};
use crate::qsim::{max_abs_diff, GateKind};
use crate::quantum_models::{observables, QuantumArch, QuantumModel};
use crate::rng::{stream_rng, Stream};
use crate::symmetry::{
    builtin_reps, check_embedding_intertwiner, check_gate_equivariance, conjugate_observable,
    flip_rep, swap_flip_rep, swap_rep, Placement, PointTransform,
};

/// Tolerance for every exact identity in the symmetry suite.
pub const SYMMETRY_TOL: f64 = 1e-10;
/// Relative tolerance for analytic gradients against central differences.
pub const GRADIENT_TOL: f64 = 1e-5;
pub const FD_STEP: f64 = 1e-5;
pub const AUC_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub deviation: f64,
    pub tolerance: f64,
    /// Expected-mismatch checks pass when the deviation is *above* tolerance.
    pub expect_mismatch: bool,
}

impl Check {
    fn within(name: impl Into<String>, deviation: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            deviation,
            tolerance,
            expect_mismatch: false,
        }
    }

    fn mismatch(name: impl Into<String>, deviation: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            deviation,
            tolerance,
            expect_mismatch: true,
        }
    }

    pub fn passed(&self) -> bool {
        if self.expect_mismatch {
            self.deviation > self.tolerance
        } else {
            self.deviation <= self.tolerance
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SuiteReport {
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed())
    }

    pub fn extend(&mut self, other: SuiteReport) {
        self.checks.extend(other.checks);
    }
}

fn random_point(rng: &mut ChaCha8Rng) -> Point2 {
    Point2::new(rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0))
}

/// Sample points for the embedding intertwiner table.
pub fn intertwiner_samples(n: usize, seed: u64) -> Vec<Point2> {
    let mut rng = stream_rng(seed, Stream::Verify);
    (0..n).map(|_| random_point(&mut rng)).collect()
}

/// Gate equivariance, observable identities, the intertwiner table, model
/// invariance/equivariance for random parameters, and the dataset grids.
pub fn symmetry_suite(seed: u64) -> Result<SuiteReport> {
    let mut report = SuiteReport::default();
    let checks = &mut report.checks;
    let reps = builtin_reps();

    for rep in &reps {
        let id = nalgebra::DMatrix::identity(4, 4);
        checks.push(Check::within(
            format!("rep {} is an involution", rep.name),
            max_abs_diff(&(&rep.matrix * &rep.matrix), &id),
            SYMMETRY_TOL,
        ));
        for (kind, label) in [(GateKind::Rx, "RX⊗RX"), (GateKind::Rzz, "RZZ")] {
            checks.push(Check::within(
                format!("{label} commutes with {}", rep.name),
                check_gate_equivariance(kind, &Placement::Broadcast, rep)?,
                SYMMETRY_TOL,
            ));
        }
    }
    // Sanity: the embedding gate alone is not equivariant under A.
    checks.push(Check::mismatch(
        "RZ⊗I does not commute with A",
        check_gate_equivariance(GateKind::Rz, &Placement::On(vec![0]), &flip_rep())?,
        1e-3,
    ));

    let (s, a, sa) = (swap_rep(), flip_rep(), swap_flip_rep());
    let conj_dev =
        |o: &crate::qsim::Observable, rep, target: &crate::qsim::Observable| -> Result<f64> {
            Ok(max_abs_diff(
                conjugate_observable(o, rep)?.matrix(),
                target.matrix(),
            ))
        };
    let sym = observables::symmetric();
    for rep in &reps {
        checks.push(Check::within(
            format!("symmetric O invariant under {}", rep.name),
            conj_dev(&sym, rep, &sym)?,
            SYMMETRY_TOL,
        ));
    }
    let (a1, a2) = observables::antisymmetric_pair();
    checks.push(Check::within(
        "anti-symmetric: A† O1 A = O2",
        conj_dev(&a1, &a, &a2)?,
        SYMMETRY_TOL,
    ));
    checks.push(Check::within(
        "anti-symmetric: SA† O1 SA = O2",
        conj_dev(&a1, &sa, &a2)?,
        SYMMETRY_TOL,
    ));
    checks.push(Check::within(
        "anti-symmetric: S† O1 S = O1",
        conj_dev(&a1, &s, &a1)?,
        SYMMETRY_TOL,
    ));
    checks.push(Check::within(
        "anti-symmetric: S† O2 S = O2",
        conj_dev(&a2, &s, &a2)?,
        SYMMETRY_TOL,
    ));
    let (f1, f2) = observables::fully_antisymmetric_pair();
    checks.push(Check::within(
        "fully anti-symmetric: S† O1 S = O2",
        conj_dev(&f1, &s, &f2)?,
        SYMMETRY_TOL,
    ));
    checks.push(Check::within(
        "fully anti-symmetric: SA† O1 SA = O2",
        conj_dev(&f1, &sa, &f2)?,
        SYMMETRY_TOL,
    ));
    checks.push(Check::within(
        "fully anti-symmetric: A† O1 A = O1",
        conj_dev(&f1, &a, &f1)?,
        SYMMETRY_TOL,
    ));

    let samples = intertwiner_samples(64, seed);
    for rep in &reps {
        for t in PointTransform::NON_TRIVIAL {
            let dev = check_embedding_intertwiner(rep, t, &samples);
            let name = format!("embedding: {} vs {t:?}", rep.name);
            checks.push(if t == rep.transform {
                Check::within(name, dev, SYMMETRY_TOL)
            } else {
                Check::mismatch(name, dev, SYMMETRY_TOL)
            });
        }
    }

    report.extend(model_symmetry_checks(seed, 100, 100)?);

    for kind in DatasetKind::ALL {
        let r = verify_dataset_symmetry(kind, 201)?;
        report.checks.push(Check::within(
            format!("{kind} labels on a 201×201 grid ({} points)", r.checked),
            r.violations as f64,
            0.0,
        ));
    }
    Ok(report)
}

/// EQNN invariance/equivariance on every dataset for `n_params` random
/// parameter vectors × `n_points` random points; plus a check that the QNN
/// baseline is not swap-invariant.
pub fn model_symmetry_checks(seed: u64, n_params: usize, n_points: usize) -> Result<SuiteReport> {
    use PointTransform::{AntiDiagNegSwap, Both, DiagSwap};
    let mut rng = stream_rng(seed.wrapping_add(1), Stream::Verify);
    let mut worst = [0.0f64; 3];
    for (i, kind) in DatasetKind::ALL.into_iter().enumerate() {
        let mut model = QuantumModel::for_dataset(QuantumArch::Eqnn, 2, kind, seed)?;
        for _ in 0..n_params {
            for v in model.params.iter_mut() {
                *v = rng.random_range(0.0..2.0 * PI);
            }
            for _ in 0..n_points {
                let p = random_point(&mut rng);
                let e = |q: Point2| -> Vec<f64> {
                    model.expectations(q).iter().map(|v| v.abs()).collect()
                };
                let (x, sw, ad, both) = (
                    e(p),
                    e(DiagSwap.apply(p)),
                    e(AntiDiagNegSwap.apply(p)),
                    e(Both.apply(p)),
                );
                let dev = match kind {
                    DatasetKind::Symmetric => (sw[0] - x[0]).abs().max((ad[0] - x[0]).abs()),
                    DatasetKind::AntiSymmetric => (ad[0] - x[1])
                        .abs()
                        .max((ad[1] - x[0]).abs())
                        .max((sw[0] - x[0]).abs())
                        .max((sw[1] - x[1]).abs()),
                    DatasetKind::FullyAntiSymmetric => (sw[0] - x[1])
                        .abs()
                        .max((ad[0] - x[1]).abs())
                        .max((both[0] - x[0]).abs()),
                };
                worst[i] = worst[i].max(dev);
            }
        }
    }
    let mut report = SuiteReport::default();
    for (kind, dev) in DatasetKind::ALL.into_iter().zip(worst) {
        report.checks.push(Check::within(
            format!("EQNN scores transform correctly ({kind} readout)"),
            dev,
            SYMMETRY_TOL,
        ));
    }

    let qnn = QuantumModel::for_dataset(QuantumArch::Qnn, 2, DatasetKind::Symmetric, seed)?;
    let mut qnn_dev = 0.0f64;
    for _ in 0..n_points {
        let p = random_point(&mut rng);
        let a = qnn.expectations(p)[0].abs();
        let b = qnn.expectations(DiagSwap.apply(p))[0].abs();
        qnn_dev = qnn_dev.max((a - b).abs());
    }
    report
        .checks
        .push(Check::mismatch("QNN is not swap-invariant", qnn_dev, 1e-3));
    Ok(report)
}

/// Central-difference gradient of `model.loss` at its current parameters.
pub fn finite_difference_gradient(
    model: &mut dyn Classifier,
    p: Point2,
    y: u8,
    h: f64,
) -> Vec<f64> {
    let n = model.n_params();
    let mut grad = Vec::with_capacity(n);
    for i in 0..n {
        let orig = model.params()[i];
        model.params_mut()[i] = orig + h;
        let plus = model.loss(p, y);
        model.params_mut()[i] = orig - h;
        let minus = model.loss(p, y);
        model.params_mut()[i] = orig;
        grad.push((plus - minus) / (2.0 * h));
    }
    grad
}

/// `‖a − b‖∞ / max(‖a‖∞, ‖b‖∞)`, or the absolute difference when both
/// vectors are below `1e-8`.
pub fn relative_error(a: &[f64], b: &[f64]) -> f64 {
    let inf = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let diff = a
        .iter()
        .zip(b)
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    let scale = inf(a).max(inf(b));
    if scale < 1e-8 {
        diff
    } else {
        diff / scale
    }
}

fn gradient_error(model: &mut dyn Classifier, p: Point2, y: u8) -> f64 {
    let (_, analytic) = model.loss_and_gradient(p, y);
    let fd = finite_difference_gradient(model, p, y, FD_STEP);
    relative_error(&analytic, &fd)
}

/// Parameter-shift (QNN, EQNN on every readout) and backprop (DNN, ENN)
/// gradients against central differences on `n_configs` random
/// `(architecture, parameters, point, label)` draws per family.
pub fn gradient_suite(seed: u64, n_configs: usize) -> Result<SuiteReport> {
    let mut rng = stream_rng(seed.wrapping_add(2), Stream::Verify);
    let mut report = SuiteReport::default();

    for arch in [QuantumArch::Qnn, QuantumArch::Eqnn] {
        let mut worst = 0.0f64;
        for i in 0..n_configs {
            let kind = DatasetKind::ALL[i % 3];
            let depth = rng.random_range(1..=4);
            let mut model = QuantumModel::for_dataset(arch, depth, kind, seed)?;
            for v in model.params.iter_mut() {
                *v = rng.random_range(0.0..2.0 * PI);
            }
            let p = random_point(&mut rng);
            let y = rng.random_range(0..=1u8);
            worst = worst.max(gradient_error(&mut model, p, y));
        }
        report.checks.push(Check::within(
            format!(
                "{} parameter-shift vs finite differences ({n_configs} configs)",
                arch.as_str()
            ),
            worst,
            GRADIENT_TOL,
        ));
    }

    let activations = [Activation::Tanh, Activation::Sigmoid];
    let mut worst = 0.0f64;
    for i in 0..n_configs {
        let layers = rng.random_range(1..=3);
        let mut sizes = vec![2];
        sizes.extend((0..layers).map(|_| rng.random_range(1..=6)));
        sizes.push(2);
        let params = (0..dense_param_count(&sizes))
            .map(|_| rng.random_range(-1.5..1.5))
            .collect();
        let mut net = DenseNet::with_params(sizes, activations[i % 2], params)?;
        let p = random_point(&mut rng);
        let y = rng.random_range(0..=1u8);
        worst = worst.max(gradient_error(&mut net, p, y));
    }
    report.checks.push(Check::within(
        format!("DNN backprop vs finite differences ({n_configs} configs)"),
        worst,
        GRADIENT_TOL,
    ));

    let mut worst = 0.0f64;
    for i in 0..n_configs {
        let orbit = if i % 2 == 0 {
            Orbit::Full
        } else {
            Orbit::DiagSwap
        };
        let k = rng.random_range(1..=4);
        let head: Vec<usize> = (0..rng.random_range(0..=2))
            .map(|_| rng.random_range(1..=5))
            .collect();
        let template = EnnNet::new(orbit, k, &head, activations[i % 2], 0)?;
        let params = (0..template.param_count())
            .map(|_| rng.random_range(-1.5..1.5))
            .collect();
        let mut net = EnnNet::with_params(orbit, k, &head, activations[i % 2], params)?;
        let p = random_point(&mut rng);
        let y = rng.random_range(0..=1u8);
        worst = worst.max(gradient_error(&mut net, p, y));
    }
    report.checks.push(Check::within(
        format!("ENN backprop vs finite differences ({n_configs} configs)"),
        worst,
        GRADIENT_TOL,
    ));
    Ok(report)
}

/// Trapezoidal ROC area against the pairwise count on `n_instances` random
/// score vectors, half of them drawn from a handful of values so ties are
/// common.
pub fn auc_suite(seed: u64, n_instances: usize) -> Result<SuiteReport> {
    let mut rng = stream_rng(seed.wrapping_add(3), Stream::Verify);
    let mut worst = 0.0f64;
    for i in 0..n_instances {
        let n = rng.random_range(2..=300);
        let mut labels: Vec<u8> = (0..n).map(|_| rng.random_range(0..=1u8)).collect();
        labels[0] = 0;
        labels[1] = 1;
        let scores: Vec<f64> = if i % 2 == 0 {
            (0..n)
                .map(|_| f64::from(rng.random_range(0..5u8)) / 4.0)
                .collect()
        } else {
            (0..n).map(|_| rng.random::<f64>()).collect()
        };
        let trapezoid = auc(&roc(&scores, &labels)?);
        let pairwise = auc_oracle(&scores, &labels)?;
        worst = worst.max((trapezoid - pairwise).abs());
    }
    Ok(SuiteReport {
        checks: vec![Check::within(
            format!("trapezoidal AUC = pairwise AUC ({n_instances} instances)"),
            worst,
            AUC_TOL,
        )],
    })
}
