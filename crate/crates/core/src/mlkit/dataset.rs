//! Labeled feature datasets: CSV exchange format, shuffled stratified
//! splits, fold assignment, and min-max scaling.

use std::io::{Read, Write};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// One row: a token, its numeric feature vector, and a binary label.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledSample {
    pub token_id: String,
    pub features: Vec<f64>,
    pub label: u8,
}

/// A set of samples sharing one feature space.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    /// Column names, one per feature dimension.
    pub feature_names: Vec<String>,
    pub samples: Vec<LabeledSample>,
}

/// Dataset shape and I/O failures.
#[derive(Clone, Debug, PartialEq, Eq, Error, Serialize, Deserialize)]
#[serde(tag = "error", rename_all = "snake_case")]
pub enum DatasetError {
    #[error("csv error: {detail}")]
    Csv { detail: String },
    #[error("row {row} has {found} features, expected {expected}")]
    RaggedRow {
        row: usize,
        found: usize,
        expected: usize,
    },
    #[error("row {row} has label {found}, expected 0 or 1")]
    BadLabel { row: usize, found: String },
}

impl Dataset {
    pub fn new(feature_names: Vec<String>) -> Self {
        Dataset {
            feature_names,
            samples: Vec::new(),
        }
    }

    /// Add a row, enforcing the dataset's dimensionality.
    pub fn push(&mut self, sample: LabeledSample) -> Result<(), DatasetError> {
        if sample.features.len() != self.feature_names.len() {
            return Err(DatasetError::RaggedRow {
                row: self.samples.len(),
                found: sample.features.len(),
                expected: self.feature_names.len(),
            });
        }
        self.samples.push(sample);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Count of samples carrying `label`.
    pub fn count_label(&self, label: u8) -> usize {
        self.samples.iter().filter(|s| s.label == label).count()
    }

    /// Write as CSV: header `token_id,label,<feature columns...>`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), DatasetError> {
        let mut out = csv::Writer::from_writer(writer);
        let mut header = vec!["token_id".to_string(), "label".to_string()];
        header.extend(self.feature_names.iter().cloned());
        out.write_record(&header).map_err(csv_err)?;
        for sample in &self.samples {
            let mut row = vec![sample.token_id.clone(), sample.label.to_string()];
            row.extend(sample.features.iter().map(|v| format_feature(*v)));
            out.write_record(&row).map_err(csv_err)?;
        }
        out.flush().map_err(|e| DatasetError::Csv {
            detail: e.to_string(),
        })?;
        Ok(())
    }

    /// Read the CSV format produced by [`Dataset::write_csv`].
    pub fn read_csv<R: Read>(reader: R) -> Result<Dataset, DatasetError> {
        let mut input = csv::Reader::from_reader(reader);
        let header = input.headers().map_err(csv_err)?.clone();
        let feature_names: Vec<String> = header.iter().skip(2).map(|s| s.to_string()).collect();
        let mut dataset = Dataset::new(feature_names);
        for (row, record) in input.records().enumerate() {
            let record = record.map_err(csv_err)?;
            let token_id = record.get(0).unwrap_or_default().to_string();
            let label_text = record.get(1).unwrap_or_default();
            let label: u8 = match label_text {
                "0" => 0,
                "1" => 1,
                other => {
                    return Err(DatasetError::BadLabel {
                        row,
                        found: other.to_string(),
                    })
                }
            };
            let features: Vec<f64> = record
                .iter()
                .skip(2)
                .map(|v| v.parse::<f64>().unwrap_or(0.0))
                .collect();
            dataset.push(LabeledSample {
                token_id,
                features,
                label,
            })?;
        }
        Ok(dataset)
    }

    /// Stratified shuffled split: `test_fraction` of each class goes to the
    /// test set, the rest to training.  Deterministic per seed.
    pub fn split(&self, test_fraction: f64, seed: u64) -> (Dataset, Dataset) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut train = Dataset::new(self.feature_names.clone());
        let mut test = Dataset::new(self.feature_names.clone());
        for label in [0u8, 1] {
            let mut indices: Vec<usize> = (0..self.samples.len())
                .filter(|&i| self.samples[i].label == label)
                .collect();
            indices.shuffle(&mut rng);
            let n_test = ((indices.len() as f64) * test_fraction).round() as usize;
            for (rank, &i) in indices.iter().enumerate() {
                let destination = if rank < n_test { &mut test } else { &mut train };
                destination.samples.push(self.samples[i].clone());
            }
        }
        (train, test)
    }

    /// Stratified fold assignment: returns `folds` index lists covering the
    /// dataset, each with near-equal class shares.  Deterministic per seed.
    pub fn stratified_folds(&self, folds: usize, seed: u64) -> Vec<Vec<usize>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut assignment: Vec<Vec<usize>> = vec![Vec::new(); folds.max(1)];
        for label in [0u8, 1] {
            let mut indices: Vec<usize> = (0..self.samples.len())
                .filter(|&i| self.samples[i].label == label)
                .collect();
            indices.shuffle(&mut rng);
            for (rank, &i) in indices.iter().enumerate() {
                assignment[rank % folds.max(1)].push(i);
            }
        }
        assignment
    }

    /// Subset by indices, preserving feature names.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            feature_names: self.feature_names.clone(),
            samples: indices.iter().map(|&i| self.samples[i].clone()).collect(),
        }
    }
}

fn csv_err(e: csv::Error) -> DatasetError {
    DatasetError::Csv {
        detail: e.to_string(),
    }
}

/// Render a feature value without losing precision, printing integers
/// without a trailing `.0`.
fn format_feature(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

/// Per-dimension min-max scaling to [0, 1], fitted on one dataset and
/// applied to others (distance-based models only; trees consume raw
/// features).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinMaxScaler {
    pub mins: Vec<f64>,
    pub maxs: Vec<f64>,
}

impl MinMaxScaler {
    pub fn fit(dataset: &Dataset) -> Self {
        let dims = dataset.feature_names.len();
        let mut mins = vec![f64::INFINITY; dims];
        let mut maxs = vec![f64::NEG_INFINITY; dims];
        for sample in &dataset.samples {
            for (d, &v) in sample.features.iter().enumerate() {
                mins[d] = mins[d].min(v);
                maxs[d] = maxs[d].max(v);
            }
        }
        for d in 0..dims {
            if !mins[d].is_finite() {
                mins[d] = 0.0;
                maxs[d] = 0.0;
            }
        }
        MinMaxScaler { mins, maxs }
    }

    /// Scale one row; constant dimensions map to 0.
    pub fn transform_row(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .enumerate()
            .map(|(d, &v)| {
                let span = self.maxs[d] - self.mins[d];
                if span > 0.0 {
                    (v - self.mins[d]) / span
                } else {
                    0.0
                }
            })
            .collect()
    }

    pub fn transform(&self, dataset: &Dataset) -> Dataset {
        Dataset {
            feature_names: dataset.feature_names.clone(),
            samples: dataset
                .samples
                .iter()
                .map(|s| LabeledSample {
                    token_id: s.token_id.clone(),
                    features: self.transform_row(&s.features),
                    label: s.label,
                })
                .collect(),
        }
    }
}
