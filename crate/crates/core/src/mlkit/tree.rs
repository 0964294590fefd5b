//! Gini-impurity decision trees and bootstrap-aggregated forests.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::dataset::Dataset;

/// One splitmix64 round; used to derive independent per-tree and per-fold
/// seeds from a base seed without correlated streams.
pub(crate) fn derive_seed(base: u64, salt: u64) -> u64 {
    let mut z = base ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "node")]
enum TreeNode {
    Leaf {
        label: u8,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
}

impl TreeNode {
    fn classify(&self, row: &[f64]) -> u8 {
        match self {
            TreeNode::Leaf { label } => *label,
            TreeNode::Split {
                feature,
                threshold,
                left,
                right,
            } => {
                if row[*feature] <= *threshold {
                    left.classify(row)
                } else {
                    right.classify(row)
                }
            }
        }
    }

    fn tally_splits(&self, counts: &mut [u64]) {
        if let TreeNode::Split {
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

fn gini(ones: usize, total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let p = ones as f64 / total as f64;
    2.0 * p * (1.0 - p)
}

fn majority(indices: &[usize], labels: &[u8]) -> u8 {
    let ones = indices.iter().filter(|&&i| labels[i] == 1).count();
    if 2 * ones > indices.len() {
        1
    } else {
        0
    }
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    gain: f64,
}

/// Exhaustive threshold search over the given candidate features; ties
/// break toward the lower feature index, then the lower threshold, so the
/// tree is a pure function of its inputs.
fn best_split(
    points: &[Vec<f64>],
    labels: &[u8],
    indices: &[usize],
    candidates: &[usize],
    min_samples_leaf: usize,
) -> Option<BestSplit> {
    let total = indices.len();
    let total_ones = indices.iter().filter(|&&i| labels[i] == 1).count();
    let parent = gini(total_ones, total);
    let mut best: Option<BestSplit> = None;
    let mut order: Vec<usize> = indices.to_vec();
    for &feature in candidates {
        order.sort_by(|&a, &b| {
            points[a][feature]
                .partial_cmp(&points[b][feature])
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });
        let mut left_ones = 0usize;
        for cut in 1..total {
            let prev = order[cut - 1];
            if labels[prev] == 1 {
                left_ones += 1;
            }
            let lo = points[prev][feature];
            let hi = points[order[cut]][feature];
            if hi <= lo {
                continue;
            }
            if cut < min_samples_leaf || total - cut < min_samples_leaf {
                continue;
            }
            let weighted = (cut as f64 * gini(left_ones, cut)
                + (total - cut) as f64 * gini(total_ones - left_ones, total - cut))
                / total as f64;
            let gain = parent - weighted;
            let threshold = lo + (hi - lo) / 2.0;
            let better = match &best {
                None => gain > 1e-12,
                Some(b) => {
                    gain > b.gain + 1e-12
                        || ((gain - b.gain).abs() <= 1e-12
                            && (feature < b.feature
                                || (feature == b.feature && threshold < b.threshold)))
                }
            };
            if better {
                best = Some(BestSplit {
                    feature,
                    threshold,
                    gain,
                });
            }
        }
    }
    best
}

fn grow(
    points: &[Vec<f64>],
    labels: &[u8],
    indices: &[usize],
    depth: usize,
    max_depth: usize,
    min_samples_leaf: usize,
    feature_sample: Option<usize>,
    rng: &mut ChaCha8Rng,
) -> TreeNode {
    let ones = indices.iter().filter(|&&i| labels[i] == 1).count();
    let pure = ones == 0 || ones == indices.len();
    if pure || depth >= max_depth || indices.len() < 2 * min_samples_leaf {
        return TreeNode::Leaf {
            label: majority(indices, labels),
        };
    }
    let dims = points[0].len();
    let candidates: Vec<usize> = match feature_sample {
        None => (0..dims).collect(),
        Some(count) => {
            let mut pool: Vec<usize> = (0..dims).collect();
            // Partial Fisher-Yates: the first `count` entries are the draw.
            for slot in 0..count.min(dims) {
                let pick = rng.gen_range(slot..dims);
                pool.swap(slot, pick);
            }
            let mut chosen = pool[..count.min(dims)].to_vec();
            chosen.sort_unstable();
            chosen
        }
    };
    match best_split(points, labels, indices, &candidates, min_samples_leaf) {
        None => TreeNode::Leaf {
            label: majority(indices, labels),
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
            TreeNode::Split {
                feature: split.feature,
                threshold: split.threshold,
                left: Box::new(grow(
                    points,
                    labels,
                    &left,
                    depth + 1,
                    max_depth,
                    min_samples_leaf,
                    feature_sample,
                    rng,
                )),
                right: Box::new(grow(
                    points,
                    labels,
                    &right,
                    depth + 1,
                    max_depth,
                    min_samples_leaf,
                    feature_sample,
                    rng,
                )),
            }
        }
    }
}

/// Single CART-style classification tree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    root: TreeNode,
}

const TREE_MAX_DEPTH: usize = 16;

impl DecisionTree {
    pub fn fit(train: &Dataset, min_samples_leaf: usize) -> Self {
        let points: Vec<Vec<f64>> = train.samples.iter().map(|s| s.features.clone()).collect();
        let labels: Vec<u8> = train.samples.iter().map(|s| s.label).collect();
        let indices: Vec<usize> = (0..points.len()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        DecisionTree {
            root: grow(
                &points,
                &labels,
                &indices,
                0,
                TREE_MAX_DEPTH,
                min_samples_leaf.max(1),
                None,
                &mut rng,
            ),
        }
    }

    pub fn predict_row(&self, row: &[f64]) -> u8 {
        self.root.classify(row)
    }
}

/// Bagged ensemble of Gini trees: each tree sees a bootstrap resample and
/// draws ceil(sqrt(d)) candidate features per split.  Prediction is the
/// majority vote of the trees; feature usage is summed over every split
/// node as a cheap importance signal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub n_estimators: usize,
    pub min_samples_leaf: usize,
    dims: usize,
    trees: Vec<DecisionTree>,
}

impl ForestModel {
    pub fn fit(train: &Dataset, n_estimators: usize, min_samples_leaf: usize, seed: u64) -> Self {
        let points: Vec<Vec<f64>> = train.samples.iter().map(|s| s.features.clone()).collect();
        let labels: Vec<u8> = train.samples.iter().map(|s| s.label).collect();
        let n = points.len();
        let dims = if n == 0 { 0 } else { points[0].len() };
        let feature_sample = ((dims as f64).sqrt().ceil() as usize).clamp(1, dims.max(1));
        let trees = (0..n_estimators)
            .map(|t| {
                let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, t as u64));
                let indices: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
                DecisionTree {
                    root: grow(
                        &points,
                        &labels,
                        &indices,
                        0,
                        TREE_MAX_DEPTH,
                        min_samples_leaf.max(1),
                        Some(feature_sample),
                        &mut rng,
                    ),
                }
            })
            .collect();
        ForestModel {
            n_estimators,
            min_samples_leaf,
            dims,
            trees,
        }
    }

    pub fn predict_row(&self, row: &[f64]) -> u8 {
        let ones = self
            .trees
            .iter()
            .filter(|t| t.predict_row(row) == 1)
            .count();
        if 2 * ones > self.trees.len() {
            1
        } else {
            0
        }
    }

    /// Number of split nodes using each feature, summed over all trees.
    pub fn split_counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.dims];
        for tree in &self.trees {
            tree.root.tally_splits(&mut counts);
        }
        counts
    }
}
