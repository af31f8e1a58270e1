//! The interface every trainable binary classifier exposes to the training
//! loop, and the plain-text checkpoint format shared by all models.

use std::io::{BufRead, BufReader, Read, Write};

use crate::datasets::{fmt_f64, Point2};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Prediction {
    pub class: u8,
    /// Confidence for class 1, in `[0, 1]`.
    pub score: f64,
}

pub trait Classifier: Sync {
    fn params(&self) -> &[f64];
    fn params_mut(&mut self) -> &mut [f64];
    fn loss(&self, p: Point2, y: u8) -> f64;
    /// Per-sample loss and its exact gradient with respect to `params()`.
    fn loss_and_gradient(&self, p: Point2, y: u8) -> (f64, Vec<f64>);
    fn predict(&self, p: Point2) -> Prediction;
    /// Header line identifying the architecture in checkpoints.
    fn describe(&self) -> String;

    fn n_params(&self) -> usize {
        self.params().len()
    }

    fn checkpoint(&self) -> Checkpoint {
        Checkpoint {
            header: self.describe(),
            values: self.params().to_vec(),
        }
    }

    /// Loads parameters from a checkpoint written by the same architecture.
    fn restore(&mut self, ckpt: &Checkpoint) -> Result<()> {
        if ckpt.header != self.describe() {
            return Err(Error::Parse(format!(
                "checkpoint is for '{}', model is '{}'",
                ckpt.header,
                self.describe()
            )));
        }
        if ckpt.values.len() != self.n_params() {
            return Err(Error::LengthMismatch {
                expected: self.n_params(),
                got: ckpt.values.len(),
            });
        }
        self.params_mut().copy_from_slice(&ckpt.values);
        Ok(())
    }
}

/// One header line, then one parameter per line with 17 significant digits.
#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint {
    pub header: String,
    pub values: Vec<f64>,
}

impl Checkpoint {
    pub fn write<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{}", self.header)?;
        for v in &self.values {
            writeln!(w, "{}", fmt_f64(*v))?;
        }
        Ok(())
    }

    pub fn read<R: Read>(r: R) -> Result<Self> {
        let mut lines = BufReader::new(r).lines();
        let header = lines
            .next()
            .ok_or(Error::Empty("checkpoint"))??
            .trim_end()
            .to_string();
        let mut values = Vec::new();
        for line in lines {
            let line = line?;
            let t = line.trim();
            if t.is_empty() {
                continue;
            }
            values.push(
                t.parse()
                    .map_err(|e| Error::Parse(format!("bad checkpoint value '{t}': {e}")))?,
            );
        }
        Ok(Checkpoint { header, values })
    }
}
