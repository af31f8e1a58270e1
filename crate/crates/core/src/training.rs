//! Gradients, the Adam optimizer, and the mini-batch epoch loop.

use std::f64::consts::FRAC_PI_2;
use std::io::Write;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifier::Classifier;
use crate::datasets::{fmt_f64, LabeledDataset, Point2};
use crate::error::{Error, Result};
use crate::quantum_models::{loss_score_derivative, QuantumModel};
use crate::rng::{stream_rng, Stream};

/// `∂e_r/∂θ_s` for every readout `r` and trainable slot `s`, by the
/// two-term shift rule. Gates sharing a slot each contribute a term.
pub fn param_shift_expectation_gradient(model: &QuantumModel, p: Point2) -> Vec<Vec<f64>> {
    let n_readouts = model.readouts.len();
    let mut jac = vec![vec![0.0; model.params.len()]; n_readouts];
    for (op, slot) in model.circuit.trainable_ops() {
        let plus = model.expectations_with(&model.params, p, Some((op, FRAC_PI_2)));
        let minus = model.expectations_with(&model.params, p, Some((op, -FRAC_PI_2)));
        for r in 0..n_readouts {
            jac[r][slot] += (plus[r] - minus[r]) / 2.0;
        }
    }
    jac
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Exact loss gradient for a quantum model. The `|⟨O⟩|` in the scores is
/// differentiated as `sign(⟨O⟩)`, with subgradient 0 at exactly 0.
pub fn param_shift_gradient(model: &QuantumModel, p: Point2, y: u8) -> Vec<f64> {
    let e = model.expectations(p);
    let scores: Vec<f64> = e.iter().map(|v| v.abs()).collect();
    let dl_ds = loss_score_derivative(model.loss_kind, &scores, y);
    let jac = param_shift_expectation_gradient(model, p);
    let mut grad = vec![0.0; model.params.len()];
    for (r, row) in jac.iter().enumerate() {
        let w = dl_ds[r] * sign(e[r]);
        if w == 0.0 {
            continue;
        }
        for (g, d) in grad.iter_mut().zip(row) {
            *g += w * d;
        }
    }
    grad
}

pub const ADAM_BETA1: f64 = 0.9;
pub const ADAM_BETA2: f64 = 0.999;
pub const ADAM_EPS: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct AdamState {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub t: u64,
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl AdamState {
    pub fn new(n_params: usize, lr: f64) -> Self {
        AdamState {
            m: vec![0.0; n_params],
            v: vec![0.0; n_params],
            t: 0,
            lr,
            beta1: ADAM_BETA1,
            beta2: ADAM_BETA2,
            eps: ADAM_EPS,
        }
    }

    /// One bias-corrected Adam update of `params` in place.
    pub fn step(&mut self, params: &mut [f64], grad: &[f64]) -> Result<()> {
        if params.len() != self.m.len() {
            return Err(Error::LengthMismatch {
                expected: self.m.len(),
                got: params.len(),
            });
        }
        if grad.len() != self.m.len() {
            return Err(Error::LengthMismatch {
                expected: self.m.len(),
                got: grad.len(),
            });
        }
        self.t += 1;
        let bc1 = 1.0 - self.beta1.powf(self.t as f64);
        let bc2 = 1.0 - self.beta2.powf(self.t as f64);
        for i in 0..params.len() {
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * grad[i];
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * grad[i] * grad[i];
            let m_hat = self.m[i] / bc1;
            let v_hat = self.v[i] / bc2;
            params[i] -= self.lr * m_hat / (v_hat.sqrt() + self.eps);
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub lr: f64,
    pub seed: u64,
    /// When false the test set is only scored after the last epoch.
    pub eval_each_epoch: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 30,
            batch_size: 20,
            lr: 0.1,
            seed: 0,
            eval_each_epoch: true,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::Config("epochs must be at least 1".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::Config("batch size must be at least 1".into()));
        }
        if !self.lr.is_finite() || self.lr < 0.0 {
            return Err(Error::Config(format!("invalid learning rate {}", self.lr)));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_acc: f64,
    /// `NaN` when no test set was scored this epoch.
    pub test_acc: f64,
    /// Mean per-sample loss over the epoch's batches, before each update.
    pub mean_loss: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainTrace {
    pub epochs: Vec<EpochRecord>,
    pub final_params: Vec<f64>,
}

impl TrainTrace {
    pub fn last(&self) -> &EpochRecord {
        self.epochs.last().expect("at least one epoch")
    }

    /// First epoch (1-based) whose test accuracy is within `tol` of the
    /// final epoch's test accuracy.
    pub fn epochs_to_final(&self, tol: f64) -> usize {
        let target = self.last().test_acc;
        self.epochs
            .iter()
            .find(|r| (r.test_acc - target).abs() <= tol)
            .map(|r| r.epoch)
            .unwrap_or(self.epochs.len())
    }

    /// CSV `epoch,train_acc,test_acc,mean_loss`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["epoch", "train_acc", "test_acc", "mean_loss"])?;
        for r in &self.epochs {
            w.write_record([
                r.epoch.to_string(),
                fmt_f64(r.train_acc),
                fmt_f64(r.test_acc),
                fmt_f64(r.mean_loss),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Fraction of `data` classified correctly.
pub fn dataset_accuracy<M: Classifier + ?Sized>(model: &M, data: &LabeledDataset) -> f64 {
    let correct: usize = data
        .points()
        .par_iter()
        .zip(data.labels().par_iter())
        .map(|(&p, &y)| usize::from(model.predict(p).class == y))
        .sum();
    correct as f64 / data.len() as f64
}

/// Trains `model` in place with Adam on mean mini-batch gradients.
///
/// Batches are drawn from a fresh shuffle every epoch; per-sample gradients
/// within a batch are evaluated in parallel and reduced in index order, so
/// the result depends only on the inputs.
pub fn train<M: Classifier + ?Sized>(
    model: &mut M,
    data: &LabeledDataset,
    test: Option<&LabeledDataset>,
    config: &TrainConfig,
) -> Result<TrainTrace> {
    config.validate()?;
    if data.is_empty() {
        return Err(Error::Empty("training set"));
    }
    let mut adam = AdamState::new(model.n_params(), config.lr);
    let mut rng = stream_rng(config.seed, Stream::Shuffle);
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut epochs = Vec::with_capacity(config.epochs);
    let points = data.points();
    let labels = data.labels();

    for epoch in 1..=config.epochs {
        order.shuffle(&mut rng);
        // Indexed by sample so the epoch's loss sum does not depend on the
        // shuffle order.
        let mut losses = vec![0.0; data.len()];
        for batch in order.chunks(config.batch_size) {
            let per_sample: Vec<(f64, Vec<f64>)> = {
                let m: &M = model;
                batch
                    .par_iter()
                    .map(|&i| m.loss_and_gradient(points[i], labels[i]))
                    .collect()
            };
            let mut grad = vec![0.0; model.n_params()];
            for (&i, (loss, g)) in batch.iter().zip(&per_sample) {
                losses[i] = *loss;
                for (acc, v) in grad.iter_mut().zip(g) {
                    *acc += v;
                }
            }
            let scale = 1.0 / batch.len() as f64;
            grad.iter_mut().for_each(|g| *g *= scale);
            adam.step(model.params_mut(), &grad)?;
        }
        let train_acc = dataset_accuracy(model, data);
        let test_acc = match test {
            Some(t) if config.eval_each_epoch || epoch == config.epochs => {
                dataset_accuracy(model, t)
            }
            _ => f64::NAN,
        };
        epochs.push(EpochRecord {
            epoch,
            train_acc,
            test_acc,
            mean_loss: losses.iter().sum::<f64>() / data.len() as f64,
        });
    }
    Ok(TrainTrace {
        epochs,
        final_params: model.params().to_vec(),
    })
}
