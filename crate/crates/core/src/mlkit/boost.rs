//! Gradient-boosted regression trees with logistic loss.

use serde::{Deserialize, Serialize};

use super::dataset::Dataset;

const BOOST_MAX_DEPTH: usize = 3;
const BOOST_MIN_SAMPLES_LEAF: usize = 5;
const LEAF_VALUE_CLAMP: f64 = 4.0;
const HESSIAN_EPS: f64 = 1e-12;

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "node")]
enum RegNode {
    Leaf {
        value: f64,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: Box<RegNode>,
        right: Box<RegNode>,
    },
}

impl RegNode {
    fn value_for(&self, row: &[f64]) -> f64 {
        match self {
            RegNode::Leaf { value } => *value,
            RegNode::Split {
                feature,
                threshold,
                left,
                right,
            } => {
                if row[*feature] <= *threshold {
                    left.value_for(row)
                } else {
                    right.value_for(row)
                }
            }
        }
    }

    fn tally_splits(&self, counts: &mut [u64]) {
        if let RegNode::Split {
            feature,
            left,
            right,
            ..
        } = self
        {
            counts[*feature] += 1;
            left.tally_splits(counts);
            right.tally_splits(counts);
        }
    }
}

/// Newton-step leaf value: Σ gradient / Σ hessian, clamped for stability.
fn leaf_value(indices: &[usize], residuals: &[f64], hessians: &[f64]) -> f64 {
    let num: f64 = indices.iter().map(|&i| residuals[i]).sum();
    let den: f64 = indices.iter().map(|&i| hessians[i]).sum();
    (num / (den + HESSIAN_EPS)).clamp(-LEAF_VALUE_CLAMP, LEAF_VALUE_CLAMP)
}

struct RegSplit {
    feature: usize,
    threshold: f64,
    score: f64,
}

/// Squared-error reduction search: maximize Σ_L r² /|L| + Σ_R r² /|R|,
/// which must beat the parent's own (Σ r)² / n — a node whose residuals
/// carry no first-order structure stays a leaf.  Deterministic
/// tie-breaks as in the classification trees.
fn best_reg_split(
    points: &[Vec<f64>],
    residuals: &[f64],
    indices: &[usize],
    min_samples_leaf: usize,
) -> Option<RegSplit> {
    let total = indices.len();
    let total_sum: f64 = indices.iter().map(|&i| residuals[i]).sum();
    let parent_score = total_sum * total_sum / total as f64;
    let mut best: Option<RegSplit> = None;
    let mut order: Vec<usize> = indices.to_vec();
    let dims = points[0].len();
    for feature in 0..dims {
        order.sort_by(|&a, &b| {
            points[a][feature]
                .partial_cmp(&points[b][feature])
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });
        let mut left_sum = 0.0;
        for cut in 1..total {
            let prev = order[cut - 1];
            left_sum += residuals[prev];
            let lo = points[prev][feature];
            let hi = points[order[cut]][feature];
            if hi <= lo {
                continue;
            }
            if cut < min_samples_leaf || total - cut < min_samples_leaf {
                continue;
            }
            let right_sum = total_sum - left_sum;
            let score =
                left_sum * left_sum / cut as f64 + right_sum * right_sum / (total - cut) as f64;
            let threshold = lo + (hi - lo) / 2.0;
            let better = match &best {
                None => score > parent_score + 1e-12,
                Some(b) => {
                    score > b.score + 1e-12
                        || ((score - b.score).abs() <= 1e-12
                            && (feature < b.feature
                                || (feature == b.feature && threshold < b.threshold)))
                }
            };
            if better {
                best = Some(RegSplit {
                    feature,
                    threshold,
                    score,
                });
            }
        }
    }
    best
}

fn grow_reg(
    points: &[Vec<f64>],
    residuals: &[f64],
    hessians: &[f64],
    indices: &[usize],
    depth: usize,
) -> RegNode {
    if depth >= BOOST_MAX_DEPTH || indices.len() < 2 * BOOST_MIN_SAMPLES_LEAF {
        return RegNode::Leaf {
            value: leaf_value(indices, residuals, hessians),
        };
    }
    match best_reg_split(points, residuals, indices, BOOST_MIN_SAMPLES_LEAF) {
        None => RegNode::Leaf {
            value: leaf_value(indices, residuals, hessians),
        },
        Some(split) => {
            let (mut left, mut right) = (Vec::new(), Vec::new());
            for &i in indices {
                if points[i][split.feature] <= split.threshold {
                    left.push(i);
                } else {
                    right.push(i);
                }
            }
            RegNode::Split {
                feature: split.feature,
                threshold: split.threshold,
                left: Box::new(grow_reg(points, residuals, hessians, &left, depth + 1)),
                right: Box::new(grow_reg(points, residuals, hessians, &right, depth + 1)),
            }
        }
    }
}

/// Boosted ensemble for binary classification.  Stage 0 is the log-odds
/// of the positive class; each stage fits a depth-limited regression tree
/// to the current residuals y − σ(F) and applies a Newton leaf update
/// scaled by the learning rate.  The procedure draws no random numbers,
/// so identical data always produces identical models.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoostModel {
    pub learning_rate: f64,
    pub n_estimators: usize,
    dims: usize,
    prior_score: f64,
    trees: Vec<RegNode>,
}

impl BoostModel {
    pub fn fit(train: &Dataset, learning_rate: f64, n_estimators: usize) -> Self {
        let points: Vec<Vec<f64>> = train.samples.iter().map(|s| s.features.clone()).collect();
        let labels: Vec<f64> = train.samples.iter().map(|s| f64::from(s.label)).collect();
        let n = points.len();
        let dims = if n == 0 { 0 } else { points[0].len() };
        let positives = labels.iter().filter(|&&y| y > 0.5).count();
        let prior = ((positives as f64 + 0.5) / (n as f64 - positives as f64 + 0.5)).ln();

        let mut scores = vec![prior; n];
        let indices: Vec<usize> = (0..n).collect();
        let mut trees = Vec::with_capacity(n_estimators);
        for _ in 0..n_estimators {
            let mut residuals = vec![0.0; n];
            let mut hessians = vec![0.0; n];
            for i in 0..n {
                let p = sigmoid(scores[i]);
                residuals[i] = labels[i] - p;
                hessians[i] = p * (1.0 - p);
            }
            let tree = grow_reg(&points, &residuals, &hessians, &indices, 0);
            for i in 0..n {
                scores[i] += learning_rate * tree.value_for(&points[i]);
            }
            trees.push(tree);
        }
        BoostModel {
            learning_rate,
            n_estimators,
            dims,
            prior_score: prior,
            trees,
        }
    }

    /// Raw additive score F(x); the predicted class is 1 when F(x) > 0.
    pub fn decision_value(&self, row: &[f64]) -> f64 {
        self.prior_score
            + self.learning_rate * self.trees.iter().map(|t| t.value_for(row)).sum::<f64>()
    }

    pub fn predict_row(&self, row: &[f64]) -> u8 {
        if self.decision_value(row) > 0.0 {
            1
        } else {
            0
        }
    }

    /// Number of split nodes using each feature, summed over all stages.
    pub fn split_counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.dims];
        for tree in &self.trees {
            tree.tally_splits(&mut counts);
        }
        counts
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mlkit::dataset::LabeledSample;

    fn dataset(rows: &[(f64, f64, u8)]) -> Dataset {
        let mut d = Dataset::new(vec!["x".into(), "y".into()]);
        for (i, &(x, y, label)) in rows.iter().enumerate() {
            d.push(LabeledSample {
                token_id: format!("t{i}"),
                features: vec![x, y],
                label,
            })
            .expect("push");
        }
        d
    }

    fn conjunction_rows() -> Vec<(f64, f64, u8)> {
        // Label = (x > 3) AND (y > 3): a feature interaction that needs
        // depth ≥ 2, with four jittered corner clusters of 8 points each.
        let mut rows = Vec::new();
        for i in 0..8 {
            let jitter = i as f64 * 0.07;
            for (cx, cy) in [(0.0, 0.0), (0.0, 6.0), (6.0, 0.0), (6.0, 6.0)] {
                let label = u8::from(cx > 3.0 && cy > 3.0);
                rows.push((cx + jitter, cy - jitter, label));
            }
        }
        rows
    }

    #[test]
    fn learns_a_two_feature_conjunction() {
        let d = dataset(&conjunction_rows());
        let model = BoostModel::fit(&d, 0.2, 60);
        assert_eq!(model.predict_row(&[0.2, 0.2]), 0);
        assert_eq!(model.predict_row(&[0.2, 6.2]), 0);
        assert_eq!(model.predict_row(&[6.2, 0.2]), 0);
        assert_eq!(model.predict_row(&[6.2, 6.2]), 1);
    }

    #[test]
    fn fit_is_exactly_reproducible() {
        let d = dataset(&conjunction_rows());
        let a = BoostModel::fit(&d, 0.1, 30);
        let b = BoostModel::fit(&d, 0.1, 30);
        assert_eq!(a, b);
        for row in [[0.2, 0.8], [0.6, 0.6]] {
            assert!((a.decision_value(&row) - b.decision_value(&row)).abs() == 0.0);
        }
    }

    #[test]
    fn prior_alone_predicts_the_majority_class() {
        let rows: Vec<(f64, f64, u8)> = (0..10).map(|i| (i as f64, 0.0, u8::from(i < 3))).collect();
        let d = dataset(&rows);
        let model = BoostModel::fit(&d, 0.1, 0);
        assert!(model.prior_score < 0.0);
        assert_eq!(model.predict_row(&[100.0, 0.0]), 0);
    }

    #[test]
    fn more_stages_reduce_training_error() {
        let d = dataset(&conjunction_rows());
        let short = BoostModel::fit(&d, 0.1, 2);
        let long = BoostModel::fit(&d, 0.1, 80);
        let errors = |m: &BoostModel| {
            d.samples
                .iter()
                .filter(|s| m.predict_row(&s.features) != s.label)
                .count()
        };
        assert!(errors(&long) <= errors(&short));
        assert_eq!(errors(&long), 0);
    }

    #[test]
    fn split_counts_cover_both_interacting_features() {
        let d = dataset(&conjunction_rows());
        let model = BoostModel::fit(&d, 0.2, 40);
        let counts = model.split_counts();
        assert!(counts[0] > 0 && counts[1] > 0, "{counts:?}");
    }
}
