use std::fmt::Write as _;
use std::path::Path;

use eqnn_core::datasets::sample_stream;
use eqnn_core::experiment::{run_on_data, RunReport};
use eqnn_core::{LabeledDataset, Stream};

use crate::config::{read_dataset, RunPlan};
use crate::{fsutil, CliResult};

#[derive(Clone, Debug)]
pub struct TrainSummary {
    pub reports: Vec<RunReport>,
    pub text: String,
}

/// Trains one model per seed. Per seed, `seed_<s>/` receives `trace.csv`,
/// `roc.csv` and `checkpoint.txt`; `summary.csv` collects the final metrics.
pub fn cmd_train(plan: &RunPlan) -> CliResult<TrainSummary> {
    let exp = &plan.experiment;
    let fixed_train = plan
        .train_data
        .as_deref()
        .map(|p| read_dataset(p, exp.dataset))
        .transpose()?;
    let fixed_test = plan
        .test_data
        .as_deref()
        .map(|p| read_dataset(p, exp.dataset))
        .transpose()?;
    fsutil::create_dir_all(&plan.output_dir)?;

    let mut reports = Vec::with_capacity(exp.seeds.len());
    for &seed in &exp.seeds {
        let pick = |fixed: &Option<LabeledDataset>, n, stream| -> CliResult<LabeledDataset> {
            match fixed {
                Some(d) => Ok(d.clone()),
                None => Ok(sample_stream(exp.dataset, n, seed, stream)?),
            }
        };
        let train_set = pick(&fixed_train, exp.n_train, Stream::Train)?;
        let test_set = pick(&fixed_test, exp.n_test, Stream::Test)?;
        let report = run_on_data(exp, seed, &train_set, &test_set)?;
        write_run_artifacts(&plan.output_dir.join(format!("seed_{seed}")), &report)?;
        reports.push(report);
    }

    let mut csv = String::from("seed,model,n_params,auc,test_accuracy,final_train_accuracy\n");
    let mut text = String::new();
    for r in &reports {
        let last = r.trace.last();
        writeln!(
            csv,
            "{},{},{},{},{},{}",
            r.seed, r.model, r.n_params, r.auc, r.test_accuracy, last.train_acc
        )
        .unwrap();
        writeln!(
            text,
            "seed {}: {} ({} params) AUC {:.4}, test accuracy {:.4}, train accuracy {:.4}",
            r.seed, r.model, r.n_params, r.auc, r.test_accuracy, last.train_acc
        )
        .unwrap();
    }
    fsutil::write_atomic(&plan.output_dir.join("summary.csv"), csv.as_bytes())?;
    write!(text, "artifacts in {}", plan.output_dir.display()).unwrap();
    Ok(TrainSummary { reports, text })
}

fn write_run_artifacts(dir: &Path, r: &RunReport) -> CliResult<()> {
    fsutil::create_dir_all(dir)?;
    fsutil::write_with(&dir.join("trace.csv"), |b| r.trace.write_csv(b))?;
    fsutil::write_with(&dir.join("roc.csv"), |b| r.roc.write_csv(b))?;
    fsutil::write_with(&dir.join("checkpoint.txt"), |b| r.checkpoint.write(b))
}
