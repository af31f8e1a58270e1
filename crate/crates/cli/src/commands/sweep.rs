use std::fmt::Write as _;
use std::path::Path;

use eqnn_core::experiment::{run_experiment, ExperimentConfig};
use eqnn_core::metrics::median;
use eqnn_core::ModelKind;
use rayon::prelude::*;

use crate::config::{cell_key, SweepSpec};
use crate::{fsutil, CliError, CliResult};

const CELL_HEADER: &str = "seed,n_params,auc,test_accuracy,epochs_to_final";

/// Result of one `(experiment, seed)` cell.
#[derive(Clone, Debug, PartialEq)]
pub struct CellResult {
    pub seed: u64,
    pub n_params: usize,
    pub auc: f64,
    pub test_accuracy: f64,
    pub epochs_to_final: usize,
    /// True when the result was read back from the cache.
    pub cached: bool,
}

impl CellResult {
    fn to_csv(&self) -> String {
        format!(
            "{CELL_HEADER}\n{},{},{:.17e},{:.17e},{}\n",
            self.seed, self.n_params, self.auc, self.test_accuracy, self.epochs_to_final
        )
    }

    fn from_csv(path: &Path, text: &str) -> CliResult<Self> {
        let bad = |m: &str| CliError::Input {
            path: path.display().to_string(),
            message: m.to_string(),
        };
        let mut lines = text.lines();
        if lines.next() != Some(CELL_HEADER) {
            return Err(bad("unexpected cell header"));
        }
        let row = lines.next().ok_or_else(|| bad("missing cell row"))?;
        let f: Vec<&str> = row.split(',').collect();
        if f.len() != 5 {
            return Err(bad("expected 5 fields"));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| bad("bad number"));
        let int = |s: &str| s.parse::<usize>().map_err(|_| bad("bad integer"));
        Ok(CellResult {
            seed: f[0].parse().map_err(|_| bad("bad seed"))?,
            n_params: int(f[1])?,
            auc: num(f[2])?,
            test_accuracy: num(f[3])?,
            epochs_to_final: int(f[4])?,
            cached: true,
        })
    }
}

/// Runs every `(experiment, seed)` cell in parallel, skipping cells whose
/// result file already exists under `cache_dir`. Results come back in input
/// order.
pub fn run_cells(
    cells: &[(ExperimentConfig, u64)],
    cache_dir: &Path,
) -> CliResult<Vec<CellResult>> {
    fsutil::create_dir_all(cache_dir)?;
    cells
        .par_iter()
        .map(|(exp, seed)| {
            let path = cache_dir.join(format!("{}.csv", cell_key(exp, *seed)));
            if path.exists() {
                return CellResult::from_csv(&path, &fsutil::read_to_string(&path)?);
            }
            let r = run_experiment(exp, *seed)?;
            let result = CellResult {
                seed: *seed,
                n_params: r.n_params,
                auc: r.auc,
                test_accuracy: r.test_accuracy,
                epochs_to_final: r.trace.epochs_to_final(0.02),
                cached: false,
            };
            fsutil::write_atomic(&path, result.to_csv().as_bytes())?;
            Ok(result)
        })
        .collect()
}

/// Per-point statistics over seeds. `auc_spread` is max − min.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub value: usize,
    pub model: ModelKind,
    pub n_params: usize,
    pub median_auc: f64,
    pub auc_spread: f64,
    pub median_accuracy: f64,
    pub seeds: usize,
}

pub fn aggregate(value: usize, model: ModelKind, results: &[CellResult]) -> SweepRow {
    let aucs: Vec<f64> = results.iter().map(|r| r.auc).collect();
    let accs: Vec<f64> = results.iter().map(|r| r.test_accuracy).collect();
    let max = aucs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = aucs.iter().copied().fold(f64::INFINITY, f64::min);
    SweepRow {
        value,
        model,
        n_params: results[0].n_params,
        median_auc: median(&aucs).expect("nonempty"),
        auc_spread: max - min,
        median_accuracy: median(&accs).expect("nonempty"),
        seeds: results.len(),
    }
}

/// Trains the grid, then writes `sweep.csv`
/// (`axis,value,model,n_params,median_auc,auc_spread,median_accuracy,seeds`).
pub fn cmd_sweep(spec: &SweepSpec) -> CliResult<(Vec<SweepRow>, String)> {
    let cells: Vec<(ExperimentConfig, u64)> = spec
        .points
        .iter()
        .flat_map(|p| {
            p.experiment
                .seeds
                .iter()
                .map(|&s| (p.experiment.clone(), s))
        })
        .collect();
    let results = run_cells(&cells, &spec.output_dir.join("cells"))?;
    let reused = results.iter().filter(|r| r.cached).count();

    let mut rows = Vec::with_capacity(spec.points.len());
    let mut offset = 0;
    for p in &spec.points {
        let n = p.experiment.seeds.len();
        rows.push(aggregate(p.value, p.model, &results[offset..offset + n]));
        offset += n;
    }

    let mut csv =
        String::from("axis,value,model,n_params,median_auc,auc_spread,median_accuracy,seeds\n");
    for r in &rows {
        writeln!(
            csv,
            "{},{},{},{},{},{},{},{}",
            spec.axis.as_str(),
            r.value,
            r.model,
            r.n_params,
            r.median_auc,
            r.auc_spread,
            r.median_accuracy,
            r.seeds
        )
        .unwrap();
    }
    let out = spec.output_dir.join("sweep.csv");
    fsutil::write_atomic(&out, csv.as_bytes())?;
    let text = format!(
        "{} cells ({reused} reused from cache) over {} points on {}; wrote {}",
        results.len(),
        rows.len(),
        spec.dataset,
        out.display()
    );
    Ok((rows, text))
}
