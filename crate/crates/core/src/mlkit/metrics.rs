//! Classification metrics: confusion counts and the four standard scores,
//! kept as exact rationals so identities hold without rounding.

use serde::{Deserialize, Serialize};

use crate::types::Ratio;

/// Binary confusion counts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl Confusion {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }

    /// Tally predictions against reference labels (positive class = 1).
    pub fn from_predictions(truth: &[u8], predicted: &[u8]) -> Self {
        let mut c = Confusion::default();
        for (&t, &p) in truth.iter().zip(predicted.iter()) {
            match (t, p) {
                (1, 1) => c.tp += 1,
                (0, 1) => c.fp += 1,
                (0, 0) => c.tn += 1,
                (1, 0) => c.fn_ += 1,
                _ => {}
            }
        }
        c
    }
}

/// The four scores with their confusion counts.  Precision and recall are
/// defined as zero when their denominator is zero; the flags record that
/// degeneracy.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metrics {
    pub accuracy: Ratio,
    pub precision: Ratio,
    pub recall: Ratio,
    pub f1: Ratio,
    pub confusion: Confusion,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub precision_undefined: bool,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub recall_undefined: bool,
}

impl Metrics {
    /// Compute all four scores from confusion counts:
    /// accuracy = (tp+tn)/total, precision = tp/(tp+fp),
    /// recall = tp/(tp+fn), f1 = 2·precision·recall/(precision+recall)
    /// — algebraically 2·tp/(2·tp+fp+fn), kept exact.
    pub fn from_confusion(confusion: Confusion) -> Self {
        let total = confusion.total() as u128;
        let accuracy = if total == 0 {
            Ratio::ZERO
        } else {
            Ratio::new((confusion.tp + confusion.tn) as u128, total)
        };
        let positive_predictions = (confusion.tp + confusion.fp) as u128;
        let precision_undefined = positive_predictions == 0;
        let precision = if precision_undefined {
            Ratio::ZERO
        } else {
            Ratio::new(confusion.tp as u128, positive_predictions)
        };
        let actual_positives = (confusion.tp + confusion.fn_) as u128;
        let recall_undefined = actual_positives == 0;
        let recall = if recall_undefined {
            Ratio::ZERO
        } else {
            Ratio::new(confusion.tp as u128, actual_positives)
        };
        let f1_denominator = 2 * confusion.tp as u128 + (confusion.fp + confusion.fn_) as u128;
        let f1 = if f1_denominator == 0 {
            Ratio::ZERO
        } else {
            Ratio::new(2 * confusion.tp as u128, f1_denominator)
        };
        Metrics {
            accuracy,
            precision,
            recall,
            f1,
            confusion,
            precision_undefined,
            recall_undefined,
        }
    }

    /// Score a prediction vector against reference labels.
    pub fn from_predictions(truth: &[u8], predicted: &[u8]) -> Self {
        Metrics::from_confusion(Confusion::from_predictions(truth, predicted))
    }
}
