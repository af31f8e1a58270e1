//! TOML run and sweep files.
//!
//! A run file names a dataset and a model family; everything else falls back
//! to the reference setup (reference architecture, 200/2000 points, seeds
//! 0–4, 30 epochs of Adam at lr 0.1 in batches of 20):
//!
//! ```toml
//! dataset = "symmetric"
//! model = "eqnn"
//! output_dir = "runs/eqnn-sym"
//!
//! [architecture]      # optional; must match `model`
//! kind = "eqnn"
//! depth = 5
//!
//! [train]             # optional overrides
//! epochs = 30
//! lr = 0.1
//! ```
//!
//! A sweep file fixes one axis and varies the other:
//!
//! ```toml
//! dataset = "anti-symmetric"
//! models = ["dnn", "enn", "qnn", "eqnn"]
//! axis = "train-size"      # or "param-count"
//! values = [100, 200, 300]
//! fixed = 20               # parameter budget (or n_train for param-count)
//! ```

use std::path::{Path, PathBuf};

use eqnn_core::experiment::{ExperimentConfig, DEFAULT_N_TEST, DEFAULT_SEEDS};
use eqnn_core::{DatasetKind, ModelKind, ModelSpec, TrainConfig};
use serde::{Deserialize, Serialize};

use crate::{fsutil, CliError, CliResult};

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainOverrides {
    pub epochs: Option<usize>,
    pub batch_size: Option<usize>,
    pub lr: Option<f64>,
    pub eval_each_epoch: Option<bool>,
}

impl TrainOverrides {
    pub fn apply(&self, mut base: TrainConfig) -> TrainConfig {
        if let Some(v) = self.epochs {
            base.epochs = v;
        }
        if let Some(v) = self.batch_size {
            base.batch_size = v;
        }
        if let Some(v) = self.lr {
            base.lr = v;
        }
        if let Some(v) = self.eval_each_epoch {
            base.eval_each_epoch = v;
        }
        base
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunFile {
    pub dataset: DatasetKind,
    pub model: ModelKind,
    pub architecture: Option<ModelSpec>,
    pub n_train: Option<usize>,
    pub n_test: Option<usize>,
    pub seeds: Option<Vec<u64>>,
    pub output_dir: Option<PathBuf>,
    /// Optional `x1,x2,label` CSVs replacing the sampled sets.
    pub train_data: Option<PathBuf>,
    pub test_data: Option<PathBuf>,
    #[serde(default)]
    pub train: TrainOverrides,
}

/// A validated run: the experiment plus where its inputs and outputs live.
#[derive(Clone, Debug, PartialEq)]
pub struct RunPlan {
    pub experiment: ExperimentConfig,
    pub output_dir: PathBuf,
    pub train_data: Option<PathBuf>,
    pub test_data: Option<PathBuf>,
}

pub fn parse_toml<T: for<'de> Deserialize<'de>>(path: &Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::ConfigFile {
        path: path.display().to_string(),
        source,
    })?;
    Ok(toml::from_str(&text)?)
}

impl RunFile {
    pub fn load(path: &Path) -> CliResult<Self> {
        parse_toml(path)
    }

    pub fn into_plan(self) -> CliResult<RunPlan> {
        let mut exp = ExperimentConfig::reference(self.model, self.dataset)?;
        if let Some(arch) = self.architecture {
            if arch.kind() != self.model {
                return Err(CliError::Config(format!(
                    "architecture kind {} does not match model {}",
                    arch.kind(),
                    self.model
                )));
            }
            exp.model = arch;
        }
        if let Some(n) = self.n_train {
            exp.n_train = n;
        }
        if let Some(n) = self.n_test {
            exp.n_test = n;
        }
        if let Some(s) = self.seeds {
            exp.seeds = s;
        }
        exp.train = self.train.apply(exp.train);
        exp.validate()?;
        Ok(RunPlan {
            experiment: exp,
            output_dir: self.output_dir.unwrap_or_else(|| PathBuf::from("runs")),
            train_data: self.train_data,
            test_data: self.test_data,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepAxis {
    ParamCount,
    TrainSize,
}

impl SweepAxis {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepAxis::ParamCount => "param-count",
            SweepAxis::TrainSize => "train-size",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepFile {
    pub dataset: DatasetKind,
    pub models: Vec<ModelKind>,
    pub axis: SweepAxis,
    pub values: Vec<usize>,
    /// Parameter budget on the train-size axis, training-set size on the
    /// param-count axis.
    pub fixed: usize,
    pub n_test: Option<usize>,
    pub seeds: Option<Vec<u64>>,
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub train: TrainOverrides,
}

/// One `(model, axis value)` point of a sweep, with every seed to run.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepPoint {
    pub model: ModelKind,
    pub value: usize,
    pub experiment: ExperimentConfig,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub dataset: DatasetKind,
    pub axis: SweepAxis,
    pub points: Vec<SweepPoint>,
    pub output_dir: PathBuf,
}

impl SweepFile {
    pub fn load(path: &Path) -> CliResult<Self> {
        parse_toml(path)
    }

    pub fn into_spec(self) -> CliResult<SweepSpec> {
        if self.models.is_empty() {
            return Err(CliError::Config("sweep needs at least one model".into()));
        }
        if self.values.is_empty() {
            return Err(CliError::Config(
                "sweep needs at least one axis value".into(),
            ));
        }
        if self.values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CliError::Config(
                "sweep values must be strictly increasing".into(),
            ));
        }
        let mut points = Vec::new();
        for &model in &self.models {
            for &value in &self.values {
                let (budget, n_train) = match self.axis {
                    SweepAxis::ParamCount => (value, self.fixed),
                    SweepAxis::TrainSize => (self.fixed, value),
                };
                let mut exp = ExperimentConfig::reference(model, self.dataset)?;
                exp.model = ModelSpec::for_param_budget(model, self.dataset, budget)?;
                exp.n_train = n_train;
                exp.n_test = self.n_test.unwrap_or(DEFAULT_N_TEST);
                exp.seeds = self.seeds.clone().unwrap_or_else(|| DEFAULT_SEEDS.to_vec());
                exp.train = self.train.apply(exp.train);
                exp.validate()?;
                points.push(SweepPoint {
                    model,
                    value,
                    experiment: exp,
                });
            }
        }
        Ok(SweepSpec {
            dataset: self.dataset,
            axis: self.axis,
            points,
            output_dir: self.output_dir.unwrap_or_else(|| PathBuf::from("sweep")),
        })
    }
}

/// Hex SHA-256 of the canonical TOML form of a single-seed experiment; the
/// file name of that cell's cached result.
pub fn cell_key(experiment: &ExperimentConfig, seed: u64) -> String {
    use sha2::{Digest, Sha256};

    let single = ExperimentConfig {
        seeds: vec![seed],
        ..experiment.clone()
    };
    let canonical = toml::to_string(&single).expect("experiment configs serialize");
    hex::encode(Sha256::digest(canonical.as_bytes()))
}

/// Parses `"0,1,2"` or `"0..5"`.
pub fn parse_seed_list(s: &str) -> CliResult<Vec<u64>> {
    let bad = || CliError::Config(format!("bad seed list '{s}'"));
    if let Some((a, b)) = s.split_once("..") {
        let (a, b): (u64, u64) = (
            a.trim().parse().map_err(|_| bad())?,
            b.trim().parse().map_err(|_| bad())?,
        );
        if a >= b {
            return Err(bad());
        }
        return Ok((a..b).collect());
    }
    s.split(',')
        .map(|t| t.trim().parse().map_err(|_| bad()))
        .collect()
}

pub(crate) fn read_dataset(path: &Path, kind: DatasetKind) -> CliResult<eqnn_core::LabeledDataset> {
    let file = fsutil::open(path)?;
    eqnn_core::LabeledDataset::read_csv(file, kind, 0).map_err(|e| CliError::Input {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}
