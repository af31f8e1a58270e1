//! ROC/AUC invariants checked against the pairwise-count oracle.

use eqnn_core::metrics::{auc, auc_oracle, roc};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Scores and labels with both classes present; `levels > 0` quantises the
/// scores so ties are frequent.
fn instance() -> impl Strategy<Value = (Vec<f64>, Vec<u8>)> {
    (2usize..200, 0u32..6, any::<u64>()).prop_map(|(n, levels, seed)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut labels: Vec<u8> = (0..n).map(|_| rng.random_range(0..=1)).collect();
        labels[0] = 0;
        labels[n - 1] = 1;
        let scores = (0..n)
            .map(|_| {
                let s: f64 = rng.random();
                if levels == 0 {
                    s
                } else {
                    (s * f64::from(levels)).floor() / f64::from(levels)
                }
            })
            .collect();
        (scores, labels)
    })
}

proptest! {
    #[test]
    fn trapezoid_equals_pairwise((scores, labels) in instance()) {
        let a = auc(&roc(&scores, &labels).unwrap());
        let b = auc_oracle(&scores, &labels).unwrap();
        prop_assert!((a - b).abs() < 1e-12, "{a} vs {b}");
    }

    #[test]
    fn invariant_under_monotone_maps((scores, labels) in instance(), k in 0.1f64..10.0, c in -5.0f64..5.0) {
        let base = auc(&roc(&scores, &labels).unwrap());
        let affine: Vec<f64> = scores.iter().map(|s| k * s + c).collect();
        let exp: Vec<f64> = scores.iter().map(|s| s.exp()).collect();
        prop_assert!((auc(&roc(&affine, &labels).unwrap()) - base).abs() < 1e-12);
        prop_assert!((auc(&roc(&exp, &labels).unwrap()) - base).abs() < 1e-12);
    }

    #[test]
    fn label_inversion_complements((scores, labels) in instance()) {
        let flipped: Vec<u8> = labels.iter().map(|l| 1 - l).collect();
        let a = auc_oracle(&scores, &labels).unwrap();
        let b = auc_oracle(&scores, &flipped).unwrap();
        prop_assert_eq!(a + b, 1.0);
        let t = auc(&roc(&scores, &labels).unwrap()) + auc(&roc(&scores, &flipped).unwrap());
        prop_assert!((t - 1.0).abs() < 1e-12);
    }

    #[test]
    fn curve_is_monotone_with_fixed_endpoints((scores, labels) in instance()) {
        let c = roc(&scores, &labels).unwrap();
        prop_assert_eq!((c.fpr[0], c.tpr[0]), (0.0, 0.0));
        prop_assert_eq!((*c.fpr.last().unwrap(), *c.tpr.last().unwrap()), (1.0, 1.0));
        prop_assert!(c.fpr.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(c.tpr.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(c.thresholds.windows(2).all(|w| w[0] > w[1]));
    }
}

#[test]
fn random_scores_give_chance_auc() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..5 {
        let labels: Vec<u8> = (0..2000).map(|i| (i % 2) as u8).collect();
        let scores: Vec<f64> = (0..2000).map(|_| rng.random()).collect();
        let a = auc_oracle(&scores, &labels).unwrap();
        assert!((a - 0.5).abs() < 0.03, "{a}");
    }
}
