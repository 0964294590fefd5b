//! Grid search, cross-validation, and held-out evaluation for the four
//! model families.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::boost::BoostModel;
use super::dataset::Dataset;
use super::knn::KnnModel;
use super::metrics::Metrics;
use super::svm::{SvmKernel, SvmModel};
use super::tree::{derive_seed, ForestModel};

pub const TEST_FRACTION: f64 = 0.2;
pub const CV_FOLDS: usize = 10;
pub const MODEL_FILE_VERSION: u32 = 1;

/// The four classifier families exposed to callers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Knn,
    SvmPoly,
    RandomForest,
    GradientBoostedTrees,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [
        ModelKind::Knn,
        ModelKind::SvmPoly,
        ModelKind::RandomForest,
        ModelKind::GradientBoostedTrees,
    ];
}

/// One point in a family's hyperparameter grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "family")]
pub enum ModelConfig {
    Knn {
        n_neighbors: usize,
        leaf_size: usize,
    },
    Svm {
        #[serde(flatten)]
        kernel: SvmKernel,
    },
    RandomForest {
        n_estimators: usize,
        min_samples_leaf: usize,
    },
    GradientBoostedTrees {
        learning_rate: f64,
        n_estimators: usize,
    },
}

impl ModelConfig {
    pub fn kind(&self) -> ModelKind {
        match self {
            ModelConfig::Knn { .. } => ModelKind::Knn,
            ModelConfig::Svm { .. } => ModelKind::SvmPoly,
            ModelConfig::RandomForest { .. } => ModelKind::RandomForest,
            ModelConfig::GradientBoostedTrees { .. } => ModelKind::GradientBoostedTrees,
        }
    }
}

/// Published search grid for each family.
pub fn default_grid(kind: ModelKind) -> Vec<ModelConfig> {
    match kind {
        ModelKind::Knn => {
            let mut grid = Vec::new();
            for n_neighbors in [5, 10, 15] {
                for leaf_size in [10, 50, 100] {
                    grid.push(ModelConfig::Knn {
                        n_neighbors,
                        leaf_size,
                    });
                }
            }
            grid
        }
        ModelKind::SvmPoly => {
            let mut grid = vec![ModelConfig::Svm {
                kernel: SvmKernel::Linear,
            }];
            for degree in [2, 3, 4, 5] {
                grid.push(ModelConfig::Svm {
                    kernel: SvmKernel::Poly { degree },
                });
            }
            grid
        }
        ModelKind::RandomForest => {
            let mut grid = Vec::new();
            for n_estimators in [50, 100, 200] {
                for min_samples_leaf in [5, 10, 50] {
                    grid.push(ModelConfig::RandomForest {
                        n_estimators,
                        min_samples_leaf,
                    });
                }
            }
            grid
        }
        ModelKind::GradientBoostedTrees => {
            let mut grid = Vec::new();
            for learning_rate in [0.1, 0.2, 0.5] {
                for n_estimators in [50, 100, 500] {
                    grid.push(ModelConfig::GradientBoostedTrees {
                        learning_rate,
                        n_estimators,
                    });
                }
            }
            grid
        }
    }
}

/// A fitted classifier of any family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "model")]
pub enum Model {
    Knn(KnnModel),
    Svm(SvmModel),
    Forest(ForestModel),
    Boost(BoostModel),
}

impl Model {
    pub fn predict_row(&self, row: &[f64]) -> u8 {
        match self {
            Model::Knn(m) => m.predict_row(row),
            Model::Svm(m) => m.predict_row(row),
            Model::Forest(m) => m.predict_row(row),
            Model::Boost(m) => m.predict_row(row),
        }
    }

    pub fn predict(&self, dataset: &Dataset) -> Vec<u8> {
        dataset
            .samples
            .par_iter()
            .map(|s| self.predict_row(&s.features))
            .collect()
    }

    /// Per-feature split usage for tree ensembles; `None` for the
    /// distance- and margin-based families.
    pub fn split_counts(&self) -> Option<Vec<u64>> {
        match self {
            Model::Forest(m) => Some(m.split_counts()),
            Model::Boost(m) => Some(m.split_counts()),
            _ => None,
        }
    }
}

#[derive(Debug, Error, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case", tag = "error")]
pub enum TrainError {
    #[error("the hyperparameter grid is empty")]
    EmptyGrid,
    #[error("config {position} in the grid belongs to a different model family")]
    ForeignConfig { position: usize },
    #[error("training data contains a single class; nothing separates")]
    SingleClass,
    #[error("too few samples to split: {samples}")]
    TooFewSamples { samples: usize },
}

/// Outcome of a grid-search run: the refit winner, its held-out metrics,
/// and the mean cross-validated F1 that each candidate earned (`None`
/// when the grid had a single entry and cross-validation was skipped).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrainReport {
    pub kind: ModelKind,
    pub seed: u64,
    /// Column schema the model was fitted on, in order.
    pub feature_names: Vec<String>,
    pub best_config: ModelConfig,
    pub cv_scores: Vec<(ModelConfig, Option<f64>)>,
    pub test_metrics: Metrics,
    pub model: Model,
}

/// On-disk JSON envelope for a fitted model.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModelFile {
    pub version: u32,
    pub kind: ModelKind,
    pub config: ModelConfig,
    pub seed: u64,
    /// Column schema the model expects; empty in files written before the
    /// field existed.
    #[serde(default)]
    pub feature_names: Vec<String>,
    pub model: Model,
}

impl ModelFile {
    pub fn from_report(report: &TrainReport) -> Self {
        ModelFile {
            version: MODEL_FILE_VERSION,
            kind: report.kind,
            config: report.best_config,
            seed: report.seed,
            feature_names: report.feature_names.clone(),
            model: report.model.clone(),
        }
    }
}

fn fit_config(train: &Dataset, config: ModelConfig, seed: u64) -> Model {
    match config {
        ModelConfig::Knn {
            n_neighbors,
            leaf_size,
        } => Model::Knn(KnnModel::fit(train, n_neighbors, leaf_size)),
        ModelConfig::Svm { kernel } => Model::Svm(SvmModel::fit(train, kernel, seed)),
        ModelConfig::RandomForest {
            n_estimators,
            min_samples_leaf,
        } => Model::Forest(ForestModel::fit(
            train,
            n_estimators,
            min_samples_leaf,
            seed,
        )),
        ModelConfig::GradientBoostedTrees {
            learning_rate,
            n_estimators,
        } => Model::Boost(BoostModel::fit(train, learning_rate, n_estimators)),
    }
}

pub fn evaluate(model: &Model, test: &Dataset) -> Metrics {
    let truth: Vec<u8> = test.samples.iter().map(|s| s.label).collect();
    let predicted = model.predict(test);
    Metrics::from_predictions(&truth, &predicted)
}

/// Mean F1 over stratified folds for one candidate configuration.
/// Scaling for the distance/margin families happens inside each fit, so
/// every fold's scaler sees only that fold's training portion.
fn cross_validate(train: &Dataset, folds: &[Vec<usize>], config: ModelConfig, seed: u64) -> f64 {
    let scores: Vec<f64> = folds
        .par_iter()
        .enumerate()
        .map(|(f, held_out)| {
            let held: std::collections::BTreeSet<usize> = held_out.iter().copied().collect();
            let fit_indices: Vec<usize> = (0..train.len()).filter(|i| !held.contains(i)).collect();
            let fit_part = train.subset(&fit_indices);
            let eval_part = train.subset(held_out);
            let model = fit_config(&fit_part, config, derive_seed(seed, 0x0f0f + f as u64));
            evaluate(&model, &eval_part).f1.as_f64()
        })
        .collect();
    scores.iter().sum::<f64>() / scores.len() as f64
}

/// Full training procedure: stratified 80/20 split, 10-fold stratified
/// cross-validation over the grid (skipped when only one candidate is
/// offered), refit of the best candidate on the entire training side, and
/// evaluation on the untouched 20%.  Stratified fold assignment keeps
/// both classes in every fold whenever the class counts allow, which is
/// what prevents degenerate single-class folds.
pub fn train(
    dataset: &Dataset,
    kind: ModelKind,
    grid: &[ModelConfig],
    seed: u64,
) -> Result<TrainReport, TrainError> {
    if grid.is_empty() {
        return Err(TrainError::EmptyGrid);
    }
    if let Some(position) = grid.iter().position(|c| c.kind() != kind) {
        return Err(TrainError::ForeignConfig { position });
    }
    if dataset.count_label(0) == 0 || dataset.count_label(1) == 0 {
        return Err(TrainError::SingleClass);
    }
    if dataset.len() < 5 {
        return Err(TrainError::TooFewSamples {
            samples: dataset.len(),
        });
    }

    let (train_part, test_part) = dataset.split(TEST_FRACTION, derive_seed(seed, 1));

    let cv_scores: Vec<(ModelConfig, Option<f64>)> = if grid.len() == 1 {
        vec![(grid[0], None)]
    } else {
        let folds = train_part.stratified_folds(CV_FOLDS, derive_seed(seed, 2));
        grid.par_iter()
            .map(|&config| {
                (
                    config,
                    Some(cross_validate(&train_part, &folds, config, seed)),
                )
            })
            .collect()
    };

    let best_config = if grid.len() == 1 {
        grid[0]
    } else {
        // Strict > keeps the earliest grid entry on ties.
        let mut best = cv_scores[0];
        for &candidate in &cv_scores[1..] {
            if candidate.1 > best.1 {
                best = candidate;
            }
        }
        best.0
    };

    let model = fit_config(&train_part, best_config, derive_seed(seed, 3));
    let test_metrics = evaluate(&model, &test_part);
    Ok(TrainReport {
        kind,
        seed,
        feature_names: dataset.feature_names.clone(),
        best_config,
        cv_scores,
        test_metrics,
        model,
    })
}
