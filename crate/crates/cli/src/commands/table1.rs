use std::fmt::Write as _;
use std::path::PathBuf;

use eqnn_core::experiment::{table1_config, ExperimentConfig, TABLE1_BUDGETS, TABLE1_TRAIN_SIZES};
use eqnn_core::metrics::median;

use crate::commands::run_cells;
use crate::{fsutil, CliError, CliResult};

#[derive(Clone, Debug)]
pub struct Table1Args {
    pub seeds: Vec<u64>,
    pub budgets: Vec<usize>,
    pub train_sizes: Vec<usize>,
    pub out: PathBuf,
    /// Cell cache; reruns skip finished cells.
    pub cache_dir: PathBuf,
}

impl Table1Args {
    pub fn full_grid(out: PathBuf, cache_dir: PathBuf, seeds: Vec<u64>) -> Self {
        Table1Args {
            seeds,
            budgets: TABLE1_BUDGETS.to_vec(),
            train_sizes: TABLE1_TRAIN_SIZES.to_vec(),
            out,
            cache_dir,
        }
    }
}

/// Median test accuracy of the DNN on the fully anti-symmetric dataset for
/// every (parameter budget, training size) pair. The CSV has one row per
/// budget: `n_params,<n_train>...`.
pub fn cmd_table1(args: &Table1Args) -> CliResult<(Vec<Vec<f64>>, String)> {
    if args.seeds.is_empty() || args.budgets.is_empty() || args.train_sizes.is_empty() {
        return Err(CliError::Config(
            "table1 needs seeds, budgets and training sizes".into(),
        ));
    }
    let mut cells: Vec<(ExperimentConfig, u64)> = Vec::new();
    for &b in &args.budgets {
        for &n in &args.train_sizes {
            let cfg = table1_config(b, n, args.seeds.clone());
            cfg.validate()?;
            cells.extend(args.seeds.iter().map(|&s| (cfg.clone(), s)));
        }
    }
    let results = run_cells(&cells, &args.cache_dir)?;

    let per_cell = args.seeds.len();
    let mut grid = Vec::with_capacity(args.budgets.len());
    let mut csv = String::from("n_params");
    for n in &args.train_sizes {
        write!(csv, ",{n}").unwrap();
    }
    csv.push('\n');
    for (i, &b) in args.budgets.iter().enumerate() {
        let mut row = Vec::with_capacity(args.train_sizes.len());
        write!(csv, "{b}").unwrap();
        for j in 0..args.train_sizes.len() {
            let start = (i * args.train_sizes.len() + j) * per_cell;
            let accs: Vec<f64> = results[start..start + per_cell]
                .iter()
                .map(|r| r.test_accuracy)
                .collect();
            let m = median(&accs).expect("nonempty");
            write!(csv, ",{m:.4}").unwrap();
            row.push(m);
        }
        csv.push('\n');
        grid.push(row);
    }
    fsutil::write_atomic(&args.out, csv.as_bytes())?;
    Ok((grid, csv))
}
