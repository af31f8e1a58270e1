//! Dataset labels against independent oracles: class fractions from direct
//! numerical integration and the symmetry table on dense grids.

use eqnn_core::datasets::{sample, sample_stream, verify_dataset_symmetry, LabeledDataset};
use eqnn_core::symmetry::{LabelAction, PointTransform};
use eqnn_core::{DatasetKind, Point2, Stream};

/// Area of `{(x, y) ∈ [−1, 1]² : (x − cx)² + (y − cy)² ≤ r²}` by the
/// midpoint rule over `x`, with the vertical extent solved exactly.
fn clipped_disc_area(cx: f64, cy: f64, r: f64) -> f64 {
    let n = 200_000;
    let dx = 2.0 / n as f64;
    (0..n)
        .map(|i| {
            let x = -1.0 + (i as f64 + 0.5) * dx;
            let h2 = r * r - (x - cx).powi(2);
            if h2 <= 0.0 {
                return 0.0;
            }
            let h = h2.sqrt();
            let (lo, hi) = ((cy - h).max(-1.0), (cy + h).min(1.0));
            (hi - lo).max(0.0) * dx
        })
        .sum()
}

fn class1_fraction(d: &LabeledDataset) -> f64 {
    d.class_counts()[1] as f64 / d.len() as f64
}

#[test]
fn symmetric_fraction_matches_integrated_area() {
    // Two disjoint corner discs of radius 1.1 over a square of area 4.
    let expected = (clipped_disc_area(-1.0, 1.0, 1.1) + clipped_disc_area(1.0, -1.0, 1.1)) / 4.0;
    assert!((expected - std::f64::consts::PI * 1.21 / 8.0).abs() < 1e-6);
    for seed in [1, 2] {
        let d = sample(DatasetKind::Symmetric, 100_000, seed).unwrap();
        let f = class1_fraction(&d);
        assert!(
            (f - expected).abs() < 0.01,
            "seed {seed}: {f} vs {expected}"
        );
    }
}

#[test]
fn antisymmetric_classes_are_balanced() {
    for seed in [1, 2] {
        let d = sample(DatasetKind::AntiSymmetric, 100_000, seed).unwrap();
        let f = class1_fraction(&d);
        assert!((f - 0.5).abs() < 0.01, "seed {seed}: {f}");
    }
}

#[test]
fn fully_antisymmetric_classes_are_balanced() {
    // The diagonal swap maps the square to itself and flips every label.
    let d = sample(DatasetKind::FullyAntiSymmetric, 100_000, 3).unwrap();
    assert!((class1_fraction(&d) - 0.5).abs() < 0.01);
}

#[test]
fn grids_have_no_symmetry_violations() {
    for kind in DatasetKind::ALL {
        let r = verify_dataset_symmetry(kind, 201).unwrap();
        assert_eq!(r.violations, 0, "{kind}");
        assert!(
            r.checked > 30_000,
            "{kind}: only {} points checked",
            r.checked
        );
    }
}

#[test]
fn symmetry_table() {
    use LabelAction::{Flip, Invariant};
    use PointTransform::{AntiDiagNegSwap, Both, DiagSwap};
    let table = [
        (DatasetKind::Symmetric, [Invariant, Invariant, Invariant]),
        (DatasetKind::AntiSymmetric, [Invariant, Flip, Flip]),
        (DatasetKind::FullyAntiSymmetric, [Flip, Flip, Invariant]),
    ];
    for (kind, actions) in table {
        for (t, a) in [DiagSwap, AntiDiagNegSwap, Both].into_iter().zip(actions) {
            assert_eq!(kind.label_action(t), a, "{kind} {t:?}");
        }
    }
}

#[test]
fn labels_are_involution_consistent() {
    let d = sample(DatasetKind::FullyAntiSymmetric, 5_000, 9).unwrap();
    for kind in DatasetKind::ALL {
        for &p in d.points() {
            for t in PointTransform::NON_TRIVIAL {
                assert_eq!(kind.label(t.apply(t.apply(p))), kind.label(p));
            }
        }
    }
}

#[test]
fn streams_are_independent_and_reproducible() {
    let a = sample_stream(DatasetKind::Symmetric, 50, 4, Stream::Train).unwrap();
    let b = sample_stream(DatasetKind::Symmetric, 50, 4, Stream::Test).unwrap();
    assert_ne!(a.points(), b.points());
    assert_eq!(
        a,
        sample_stream(DatasetKind::Symmetric, 50, 4, Stream::Train).unwrap()
    );
    assert!(a.points().iter().all(Point2::in_unit_square));
    assert_eq!(a.class_counts().iter().sum::<usize>(), 50);
}
