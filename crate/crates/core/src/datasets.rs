//! The three Z₂×Z₂-structured toy datasets on the unit square.
//!
//! Each oracle evaluates its closed-form raw label (built from Heaviside
//! steps with `H(0) = 1`) and thresholds it: raw `> 0` is class 1, anything
//! else class 0.

use std::io::{Read, Write};
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{stream_rng, Stream};
use crate::symmetry::{LabelAction, PointTransform};

/// Circle radius for the symmetric dataset.
pub const SYMMETRIC_RADIUS: f64 = 1.1;
/// Circle radius for the fully anti-symmetric dataset.
pub const FULLY_ANTISYMMETRIC_RADIUS: f64 = 1.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x1: f64,
    pub x2: f64,
}

impl Point2 {
    pub const fn new(x1: f64, x2: f64) -> Self {
        Point2 { x1, x2 }
    }

    pub fn in_unit_square(&self) -> bool {
        (-1.0..=1.0).contains(&self.x1) && (-1.0..=1.0).contains(&self.x2)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DatasetKind {
    Symmetric,
    AntiSymmetric,
    FullyAntiSymmetric,
}

impl DatasetKind {
    pub const ALL: [DatasetKind; 3] = [
        DatasetKind::Symmetric,
        DatasetKind::AntiSymmetric,
        DatasetKind::FullyAntiSymmetric,
    ];

    pub fn label(self, p: Point2) -> u8 {
        match self {
            DatasetKind::Symmetric => label_symmetric(p),
            DatasetKind::AntiSymmetric => label_antisymmetric(p),
            DatasetKind::FullyAntiSymmetric => label_fully_antisymmetric(p),
        }
    }

    pub fn raw_label(self, p: Point2) -> f64 {
        match self {
            DatasetKind::Symmetric => raw_symmetric(p),
            DatasetKind::AntiSymmetric => raw_antisymmetric(p),
            DatasetKind::FullyAntiSymmetric => raw_fully_antisymmetric(p),
        }
    }

    /// How the thresholded label responds to each transform.
    pub fn label_action(self, t: PointTransform) -> LabelAction {
        use LabelAction::*;
        use PointTransform::*;
        match (self, t) {
            (_, Identity) => Invariant,
            (DatasetKind::Symmetric, _) => Invariant,
            (DatasetKind::AntiSymmetric, DiagSwap) => Invariant,
            (DatasetKind::AntiSymmetric, _) => Flip,
            (DatasetKind::FullyAntiSymmetric, Both) => Invariant,
            (DatasetKind::FullyAntiSymmetric, _) => Flip,
        }
    }

    /// Distance from `p` to the nearest curve on which the raw label can
    /// jump. Used to skip boundary points in symmetry checks.
    pub fn boundary_distance(self, p: Point2) -> f64 {
        let axes = p.x1.abs().min(p.x2.abs());
        let anti = (p.x1 + p.x2).abs() / std::f64::consts::SQRT_2;
        let diag = (p.x1 - p.x2).abs() / std::f64::consts::SQRT_2;
        let circles = |r: f64| {
            let d1 = ((p.x1 + 1.0).powi(2) + (p.x2 - 1.0).powi(2)).sqrt();
            let d2 = ((p.x1 - 1.0).powi(2) + (p.x2 + 1.0).powi(2)).sqrt();
            (d1 - r).abs().min((d2 - r).abs())
        };
        match self {
            DatasetKind::Symmetric => circles(SYMMETRIC_RADIUS),
            DatasetKind::AntiSymmetric => axes.min(anti),
            DatasetKind::FullyAntiSymmetric => axes
                .min(anti)
                .min(diag)
                .min(circles(FULLY_ANTISYMMETRIC_RADIUS)),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            DatasetKind::Symmetric => "symmetric",
            DatasetKind::AntiSymmetric => "anti-symmetric",
            DatasetKind::FullyAntiSymmetric => "fully-anti-symmetric",
        }
    }
}

impl std::fmt::Display for DatasetKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DatasetKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "symmetric" | "sym" => Ok(DatasetKind::Symmetric),
            "anti-symmetric" | "antisymmetric" | "anti" => Ok(DatasetKind::AntiSymmetric),
            "fully-anti-symmetric" | "fully-antisymmetric" | "full" => {
                Ok(DatasetKind::FullyAntiSymmetric)
            }
            other => Err(Error::Parse(format!("unknown dataset kind '{other}'"))),
        }
    }
}

fn heaviside(x: f64) -> f64 {
    if x >= 0.0 {
        1.0
    } else {
        0.0
    }
}

fn inside(r: f64, cx: f64, cy: f64, p: Point2) -> f64 {
    heaviside(r - ((p.x1 - cx).powi(2) + (p.x2 - cy).powi(2)).sqrt())
}

fn threshold(raw: f64) -> u8 {
    u8::from(raw > 0.0)
}

pub fn raw_symmetric(p: Point2) -> f64 {
    let r = SYMMETRIC_RADIUS;
    2.0 * inside(r, -1.0, 1.0, p) + 2.0 * inside(r, 1.0, -1.0, p) - 1.0
}

pub fn raw_antisymmetric(p: Point2) -> f64 {
    let (x1, x2) = (p.x1, p.x2);
    let h = heaviside;
    h(-x1) * h(-x2) + h(-x1) * h(x2) * h(x1 + x2) - h(x1) * h(x2) + h(x1) * h(-x2) * h(x1 + x2)
}

pub fn raw_fully_antisymmetric(p: Point2) -> f64 {
    let (x1, x2) = (p.x1, p.x2);
    let h = heaviside;
    let r = FULLY_ANTISYMMETRIC_RADIUS;
    let upper_left = inside(r, -1.0, 1.0, p);
    let lower_right = inside(r, 1.0, -1.0, p);
    h(x1) * h(x2) * (2.0 * h(x1 - x2) - 1.0)
        + h(-x1) * h(-x2) * (2.0 * h(x2 - x1) - 1.0)
        + h(-x1) * h(x2) * h(x1 + x2) * (2.0 * upper_left - 1.0)
        + h(-x1) * h(x2) * h(-x1 - x2) * (1.0 - 2.0 * upper_left)
        + h(x1) * h(-x2) * h(x1 + x2) * (1.0 - 2.0 * lower_right)
        + h(x1) * h(-x2) * h(-x1 - x2) * (2.0 * lower_right - 1.0)
}

pub fn label_symmetric(p: Point2) -> u8 {
    threshold(raw_symmetric(p))
}

pub fn label_antisymmetric(p: Point2) -> u8 {
    threshold(raw_antisymmetric(p))
}

pub fn label_fully_antisymmetric(p: Point2) -> u8 {
    threshold(raw_fully_antisymmetric(p))
}

#[derive(Clone, Debug, PartialEq)]
pub struct LabeledDataset {
    pub kind: DatasetKind,
    pub seed: u64,
    points: Vec<Point2>,
    labels: Vec<u8>,
}

impl LabeledDataset {
    pub fn new(kind: DatasetKind, seed: u64, points: Vec<Point2>, labels: Vec<u8>) -> Result<Self> {
        if points.len() != labels.len() {
            return Err(Error::LengthMismatch {
                expected: points.len(),
                got: labels.len(),
            });
        }
        if let Some(&bad) = labels.iter().find(|&&l| l > 1) {
            return Err(Error::InvalidLabel(bad));
        }
        if let Some(p) = points.iter().find(|p| !p.in_unit_square()) {
            return Err(Error::PointOutOfRange(p.x1, p.x2));
        }
        Ok(LabeledDataset {
            kind,
            seed,
            points,
            labels,
        })
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Point2, u8)> + '_ {
        self.points.iter().copied().zip(self.labels.iter().copied())
    }

    pub fn class_counts(&self) -> [usize; 2] {
        let ones = self.labels.iter().filter(|&&l| l == 1).count();
        [self.len() - ones, ones]
    }

    /// Writes `x1,x2,label` rows with 17 significant digits.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["x1", "x2", "label"])?;
        for (p, y) in self.iter() {
            w.write_record([fmt_f64(p.x1), fmt_f64(p.x2), y.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R, kind: DatasetKind, seed: u64) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        let headers = r.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["x1", "x2", "label"] {
            return Err(Error::Parse(format!(
                "expected header x1,x2,label, found {}",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut points = Vec::new();
        let mut labels = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            let field = |i: usize| -> Result<&str> {
                rec.get(i)
                    .ok_or_else(|| Error::Parse(format!("missing column {i}")))
            };
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("bad number '{s}': {e}")))
            };
            points.push(Point2::new(parse(field(0)?)?, parse(field(1)?)?));
            let y: u8 = field(2)?
                .trim()
                .parse()
                .map_err(|e| Error::Parse(format!("bad label: {e}")))?;
            labels.push(y);
        }
        Self::new(kind, seed, points, labels)
    }
}

/// Round-trip-exact decimal with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// `n` points i.i.d. uniform on `[-1, 1]²`, labelled by `kind`'s oracle.
pub fn sample(kind: DatasetKind, n: usize, seed: u64) -> Result<LabeledDataset> {
    sample_stream(kind, n, seed, Stream::Train)
}

/// Like [`sample`] but draws from a named RNG stream of `seed`, so train and
/// test sets of one run are independent yet reproducible.
pub fn sample_stream(
    kind: DatasetKind,
    n: usize,
    seed: u64,
    stream: Stream,
) -> Result<LabeledDataset> {
    if n == 0 {
        return Err(Error::Empty("dataset size"));
    }
    let mut rng = stream_rng(seed, stream);
    let points: Vec<Point2> = (0..n)
        .map(|_| Point2::new(rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0)))
        .collect();
    let labels = points.iter().map(|&p| kind.label(p)).collect();
    LabeledDataset::new(kind, seed, points, labels)
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SymmetryReport {
    pub checked: usize,
    pub skipped_boundary: usize,
    pub violations: usize,
}

impl SymmetryReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Points closer than this to a decision boundary are skipped.
pub const BOUNDARY_EXCLUSION: f64 = 1e-9;

/// Checks the thresholded labels against the expected action of every
/// non-trivial transform on a `resolution × resolution` grid, plus
/// involution consistency (applying a transform twice).
pub fn verify_dataset_symmetry(kind: DatasetKind, resolution: usize) -> Result<SymmetryReport> {
    if resolution < 2 {
        return Err(Error::Config(format!(
            "grid resolution must be at least 2, got {resolution}"
        )));
    }
    let mut report = SymmetryReport::default();
    let step = 2.0 / (resolution - 1) as f64;
    for i in 0..resolution {
        for j in 0..resolution {
            let p = Point2::new(-1.0 + i as f64 * step, -1.0 + j as f64 * step);
            if kind.boundary_distance(p) < BOUNDARY_EXCLUSION {
                report.skipped_boundary += 1;
                continue;
            }
            report.checked += 1;
            let y = kind.label(p);
            for t in PointTransform::NON_TRIVIAL {
                let image = t.apply(p);
                let expected = match kind.label_action(t) {
                    LabelAction::Invariant => y,
                    LabelAction::Flip => 1 - y,
                };
                if kind.label(image) != expected || kind.label(t.apply(image)) != y {
                    report.violations += 1;
                }
            }
        }
    }
    Ok(report)
}
