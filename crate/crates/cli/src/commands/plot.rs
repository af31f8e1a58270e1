use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::svg::{LinePlot, Series};
use crate::{fsutil, CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlotKind {
    /// `roc.csv` files: one curve per file.
    Roc,
    /// `trace.csv` files: test accuracy (solid) and train accuracy (dashed).
    AccEpoch,
    /// One `sweep.csv`: median AUC against the axis value, one curve per model.
    AucSweep,
}

impl FromStr for PlotKind {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        match s.replace('_', "-").as_str() {
            "roc" => Ok(PlotKind::Roc),
            "acc-epoch" => Ok(PlotKind::AccEpoch),
            "auc-sweep" => Ok(PlotKind::AucSweep),
            other => Err(CliError::Config(format!(
                "unknown plot kind '{other}' (expected roc, acc-epoch or auc-sweep)"
            ))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct PlotArgs {
    pub kind: PlotKind,
    pub inputs: Vec<PathBuf>,
    /// Series names for roc/acc-epoch, one per input; defaults to the paths.
    pub labels: Vec<String>,
    pub title: Option<String>,
    pub out: PathBuf,
}

/// A parsed CSV: header names and string rows.
struct Table {
    path: String,
    headers: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn read(path: &Path) -> CliResult<Self> {
        let file = fsutil::open(path)?;
        let mut r = csv::Reader::from_reader(file);
        let malformed = |e: csv::Error| CliError::Input {
            path: path.display().to_string(),
            message: e.to_string(),
        };
        let headers = r
            .headers()
            .map_err(malformed)?
            .iter()
            .map(str::to_string)
            .collect();
        let rows = r
            .records()
            .map(|rec| rec.map(|rec| rec.iter().map(str::to_string).collect()))
            .collect::<Result<Vec<Vec<String>>, _>>()
            .map_err(malformed)?;
        Ok(Table {
            path: path.display().to_string(),
            headers,
            rows,
        })
    }

    fn error(&self, message: String) -> CliError {
        CliError::Input {
            path: self.path.clone(),
            message,
        }
    }

    fn column(&self, name: &str) -> CliResult<usize> {
        self.headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| self.error(format!("missing column '{name}'")))
    }

    /// Pairs of finite `(x, y)` values; rows whose `y` is NaN are skipped.
    fn xy(&self, x: &str, y: &str, filter: Option<(&str, &str)>) -> CliResult<Vec<(f64, f64)>> {
        let (xi, yi) = (self.column(x)?, self.column(y)?);
        let fi = filter
            .map(|(c, v)| self.column(c).map(|i| (i, v)))
            .transpose()?;
        let mut out = Vec::new();
        for (line, row) in self.rows.iter().enumerate() {
            if let Some((i, v)) = fi {
                if row.get(i).map(String::as_str) != Some(v) {
                    continue;
                }
            }
            let num = |i: usize| -> CliResult<f64> {
                let s = row
                    .get(i)
                    .ok_or_else(|| self.error(format!("row {} is short", line + 2)))?;
                s.trim()
                    .parse()
                    .map_err(|_| self.error(format!("row {}: '{s}' is not a number", line + 2)))
            };
            let (xv, yv) = (num(xi)?, num(yi)?);
            if yv.is_nan() {
                continue;
            }
            if !xv.is_finite() || !yv.is_finite() {
                return Err(self.error(format!("row {}: non-finite value", line + 2)));
            }
            out.push((xv, yv));
        }
        Ok(out)
    }
}

fn nonempty(name: &str, points: Vec<(f64, f64)>, dashed: bool) -> CliResult<Series> {
    if points.is_empty() {
        return Err(CliError::Config(format!("series '{name}' is empty")));
    }
    Ok(Series {
        name: name.to_string(),
        points,
        dashed,
    })
}

/// Renders the requested plot to `args.out`.
pub fn cmd_plot(args: &PlotArgs) -> CliResult<String> {
    if args.inputs.is_empty() {
        return Err(CliError::Config("plot needs at least one input CSV".into()));
    }
    if !args.labels.is_empty() && args.labels.len() != args.inputs.len() {
        return Err(CliError::Config(format!(
            "{} labels given for {} inputs",
            args.labels.len(),
            args.inputs.len()
        )));
    }
    let label = |i: usize| {
        args.labels
            .get(i)
            .cloned()
            .unwrap_or_else(|| args.inputs[i].with_extension("").display().to_string())
    };

    let mut series = Vec::new();
    let plot = match args.kind {
        PlotKind::Roc => {
            for (i, path) in args.inputs.iter().enumerate() {
                let t = Table::read(path)?;
                series.push(nonempty(&label(i), t.xy("fpr", "tpr", None)?, false)?);
            }
            LinePlot {
                title: args.title.clone().unwrap_or_else(|| "ROC".into()),
                x_label: "false positive rate".into(),
                y_label: "true positive rate".into(),
                series,
                x_range: Some((0.0, 1.0)),
                y_range: Some((0.0, 1.0)),
                diagonal: true,
            }
        }
        PlotKind::AccEpoch => {
            for (i, path) in args.inputs.iter().enumerate() {
                let t = Table::read(path)?;
                let name = label(i);
                series.push(nonempty(
                    &format!("{name} test"),
                    t.xy("epoch", "test_acc", None)?,
                    false,
                )?);
                series.push(nonempty(
                    &format!("{name} train"),
                    t.xy("epoch", "train_acc", None)?,
                    true,
                )?);
            }
            LinePlot {
                title: args.title.clone().unwrap_or_else(|| "Accuracy".into()),
                x_label: "epoch".into(),
                y_label: "accuracy".into(),
                series,
                x_range: None,
                y_range: None,
                diagonal: false,
            }
        }
        PlotKind::AucSweep => {
            if args.inputs.len() != 1 {
                return Err(CliError::Config(
                    "auc-sweep takes exactly one sweep.csv".into(),
                ));
            }
            let t = Table::read(&args.inputs[0])?;
            let model_col = t.column("model")?;
            let mut models: Vec<String> = Vec::new();
            for row in &t.rows {
                let m = row.get(model_col).cloned().unwrap_or_default();
                if !models.contains(&m) {
                    models.push(m);
                }
            }
            if models.is_empty() {
                return Err(CliError::Config("sweep file has no rows".into()));
            }
            let axis = t
                .column("axis")
                .ok()
                .and_then(|i| t.rows[0].get(i).cloned());
            for m in &models {
                series.push(nonempty(
                    m,
                    t.xy("value", "median_auc", Some(("model", m)))?,
                    false,
                )?);
            }
            LinePlot {
                title: args.title.clone().unwrap_or_else(|| "Median AUC".into()),
                x_label: axis.unwrap_or_else(|| "value".into()),
                y_label: "median AUC".into(),
                series,
                x_range: None,
                y_range: None,
                diagonal: false,
            }
        }
    };
    let svg = plot.render();
    fsutil::write_atomic(&args.out, svg.as_bytes())?;
    Ok(format!(
        "wrote {} with {} series",
        args.out.display(),
        plot.series.len()
    ))
}
