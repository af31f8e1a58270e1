//! Sweeps (caching, aggregation, curve shape), the DNN grid, and SVG output.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use eqnn_cli::commands::{cmd_plot, cmd_table1, PlotArgs, PlotKind, Table1Args};
use eqnn_cli::CliError;
use tempfile::TempDir;

fn eqnn(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eqnn"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn rows(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records()
        .map(|rec| rec.unwrap().iter().map(str::to_string).collect())
        .collect()
}

fn column(path: &Path, name: &str) -> Vec<String> {
    let mut r = csv::Reader::from_path(path).unwrap();
    let i = r.headers().unwrap().iter().position(|h| h == name).unwrap();
    r.records().map(|rec| rec.unwrap()[i].to_string()).collect()
}

#[test]
fn single_seed_sweep_has_zero_spread_and_resumes_from_cache() {
    let dir = TempDir::new().unwrap();
    fs::write(
        dir.path().join("sweep.toml"),
        "dataset = \"symmetric\"\nmodels = [\"dnn\", \"eqnn\"]\naxis = \"param-count\"\nvalues = [10, 20]\nfixed = 60\nn_test = 100\nseeds = [4]\noutput_dir = \"sw\"\n[train]\nepochs = 3\n",
    )
    .unwrap();
    let first = eqnn(&["sweep", "sweep.toml"], dir.path());
    assert!(first.status.success(), "{}", stderr(&first));
    assert!(String::from_utf8_lossy(&first.stdout).contains("(0 reused"));
    let csv = dir.path().join("sw/sweep.csv");
    let bytes = fs::read(&csv).unwrap();
    assert_eq!(
        fs::read_dir(dir.path().join("sw/cells")).unwrap().count(),
        4
    );
    assert!(column(&csv, "auc_spread")
        .iter()
        .all(|s| s.parse::<f64>().unwrap() == 0.0));
    assert_eq!(column(&csv, "model"), ["DNN", "DNN", "EQNN", "EQNN"]);
    assert!(column(&csv, "n_params")
        .iter()
        .all(|n| n.parse::<usize>().unwrap() <= 20));

    let second = eqnn(&["sweep", "sweep.toml"], dir.path());
    assert!(second.status.success());
    assert!(String::from_utf8_lossy(&second.stdout).contains("(4 reused"));
    assert_eq!(fs::read(&csv).unwrap(), bytes);
}

#[test]
fn sweep_rejects_bad_specs() {
    let dir = TempDir::new().unwrap();
    let write = |text: &str| fs::write(dir.path().join("s.toml"), text).unwrap();
    write("dataset = \"fully-anti-symmetric\"\nmodels = [\"enn\"]\naxis = \"train-size\"\nvalues = [100]\nfixed = 20\n");
    let o = eqnn(&["sweep", "s.toml"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(
        stderr(&o).contains("unsupported combination"),
        "{}",
        stderr(&o)
    );
    write("dataset = \"symmetric\"\nmodels = [\"dnn\"]\naxis = \"train-size\"\nvalues = [100, 100]\nfixed = 20\n");
    assert_eq!(
        eqnn(&["sweep", "s.toml"], dir.path()).status.code(),
        Some(1)
    );
    write("dataset = \"symmetric\"\nmodels = [\"dnn\"]\naxis = \"sideways\"\nvalues = [100]\nfixed = 20\n");
    assert_eq!(
        eqnn(&["sweep", "s.toml"], dir.path()).status.code(),
        Some(1)
    );
}

/// Median AUC of the EQNN against training-set size on the anti-symmetric
/// dataset: beyond the smallest size the curve should not drop by more than
/// seed noise.
#[test]
fn train_size_sweep_is_non_decreasing_beyond_small_sizes() {
    let dir = TempDir::new().unwrap();
    fs::write(
        dir.path().join("sweep.toml"),
        "dataset = \"anti-symmetric\"\nmodels = [\"eqnn\"]\naxis = \"train-size\"\nvalues = [100, 300, 500, 700, 900]\nfixed = 20\nn_test = 1000\noutput_dir = \"sw\"\n",
    )
    .unwrap();
    let o = eqnn(&["sweep", "sweep.toml"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let aucs: Vec<f64> = column(&dir.path().join("sw/sweep.csv"), "median_auc")
        .iter()
        .map(|s| s.parse().unwrap())
        .collect();
    for w in aucs[1..].windows(2) {
        assert!(w[1] >= w[0] - 0.02, "{aucs:?}");
    }
    assert!(aucs[4] >= aucs[0] - 0.02, "{aucs:?}");
}

fn table1(dir: &Path, budgets: Vec<usize>, sizes: Vec<usize>) -> Vec<Vec<f64>> {
    let args = Table1Args {
        seeds: (0..5).collect(),
        budgets,
        train_sizes: sizes,
        out: dir.join("t1.csv"),
        cache_dir: dir.join("cells"),
    };
    cmd_table1(&args).unwrap().0
}

#[test]
fn table1_cell_105_900() {
    let dir = TempDir::new().unwrap();
    let acc = table1(dir.path(), vec![105], vec![900])[0][0];
    assert!((acc - 0.988).abs() <= 0.05, "{acc}");
    let grid = rows(&dir.path().join("t1.csv"));
    assert_eq!(grid.len(), 1);
    assert_eq!(grid[0][0], "105");
}

#[test]
fn table1_cell_37_100() {
    let dir = TempDir::new().unwrap();
    let acc = table1(dir.path(), vec![37], vec![100])[0][0];
    assert!((acc - 0.596).abs() <= 0.08, "median accuracy {acc}");
}

#[test]
fn table1_rows_rise_with_training_size() {
    let dir = TempDir::new().unwrap();
    let sizes: Vec<usize> = (1..=9).map(|k| 100 * k).collect();
    let row = &table1(dir.path(), vec![37], sizes)[0];
    for w in row.windows(2) {
        assert!(w[1] >= w[0] - 0.05, "{row:?}");
    }
    let header = fs::read_to_string(dir.path().join("t1.csv")).unwrap();
    assert!(header.starts_with("n_params,100,200,300,400,500,600,700,800,900\n"));
}

fn write_roc(dir: &Path, name: &str, pts: &[(f64, f64)]) -> PathBuf {
    let mut text = String::from("threshold,fpr,tpr\n");
    for (i, (f, t)) in pts.iter().enumerate() {
        text.push_str(&format!("{},{f},{t}\n", 1.0 - i as f64 * 0.1));
    }
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

#[test]
fn roc_plot_is_deterministic_with_one_polyline_per_series() {
    let dir = TempDir::new().unwrap();
    let a = write_roc(dir.path(), "a.csv", &[(0.0, 0.0), (0.1, 0.8), (1.0, 1.0)]);
    let b = write_roc(dir.path(), "b.csv", &[(0.0, 0.0), (0.5, 0.5), (1.0, 1.0)]);
    let render = |out: &str| {
        let args = PlotArgs {
            kind: PlotKind::Roc,
            inputs: vec![a.clone(), b.clone()],
            labels: vec!["EQNN".into(), "DNN".into()],
            title: None,
            out: dir.path().join(out),
        };
        cmd_plot(&args).unwrap();
        fs::read(dir.path().join(out)).unwrap()
    };
    let first = render("1.svg");
    assert_eq!(first, render("2.svg"));
    let svg = String::from_utf8(first).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 2);
    assert!(svg.contains("version=\"1.1\"") && svg.contains(">EQNN<"));
}

#[test]
fn plot_errors() {
    let dir = TempDir::new().unwrap();
    let empty = write_roc(dir.path(), "empty.csv", &[]);
    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "threshold,fpr,tpr\n1,zero,1\n").unwrap();
    let missing_col = dir.path().join("cols.csv");
    fs::write(&missing_col, "a,b\n1,2\n").unwrap();
    for input in [&empty, &bad, &missing_col] {
        let o = eqnn(
            &[
                "plot",
                "--kind",
                "roc",
                "--out",
                "x.svg",
                input.to_str().unwrap(),
            ],
            dir.path(),
        );
        assert_eq!(
            o.status.code(),
            Some(1),
            "{}: {}",
            input.display(),
            stderr(&o)
        );
    }
    let o = eqnn(
        &[
            "plot",
            "--kind",
            "pie",
            "--out",
            "x.svg",
            empty.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(!dir.path().join("x.svg").exists());
}

#[test]
fn accuracy_and_sweep_plots_from_real_outputs() {
    let dir = TempDir::new().unwrap();
    fs::write(
        dir.path().join("run.toml"),
        "dataset = \"symmetric\"\nmodel = \"eqnn\"\nn_train = 40\nn_test = 40\nseeds = [0, 1]\noutput_dir = \"r\"\n[train]\nepochs = 3\n",
    )
    .unwrap();
    assert!(eqnn(&["train", "run.toml"], dir.path()).status.success());
    let o = eqnn(
        &[
            "plot",
            "--kind",
            "acc-epoch",
            "--out",
            "acc.svg",
            "r/seed_0/trace.csv",
            "r/seed_1/trace.csv",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let svg = fs::read_to_string(dir.path().join("acc.svg")).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 4);

    fs::write(
        dir.path().join("sweep.csv"),
        "axis,value,model,n_params,median_auc,auc_spread,median_accuracy,seeds\ntrain-size,100,DNN,17,0.8,0,0.7,1\ntrain-size,200,DNN,17,0.9,0,0.8,1\ntrain-size,100,EQNN,20,0.85,0,0.8,1\n",
    )
    .unwrap();
    let o = eqnn(
        &["plot", "--kind", "auc-sweep", "--out", "s.svg", "sweep.csv"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let svg = fs::read_to_string(dir.path().join("s.svg")).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 2);
    assert!(svg.contains(">train-size<"));
}

#[test]
fn verification_failures_map_to_exit_two() {
    let e = CliError::VerificationFailed {
        failed: 1,
        total: 10,
    };
    assert_eq!(e.exit_code(), 2);
    assert_eq!(CliError::Config("x".into()).exit_code(), 1);
}
