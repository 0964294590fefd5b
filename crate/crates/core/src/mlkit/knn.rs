//! k-nearest-neighbor classification over min-max-scaled features.

use serde::{Deserialize, Serialize};

use super::dataset::{Dataset, MinMaxScaler};

/// Fitted nearest-neighbor model.  Features are scaled to [0, 1] at fit
/// time (distances are meaningless across raw feature magnitudes) and the
/// same scaling is applied to queries.  `leaf_size` is a search-tree build
/// parameter in the reference implementations; the exhaustive search here
/// gives identical predictions for any value, so it is recorded but does
/// not affect the fit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KnnModel {
    pub n_neighbors: usize,
    pub leaf_size: usize,
    scaler: MinMaxScaler,
    points: Vec<Vec<f64>>,
    labels: Vec<u8>,
}

impl KnnModel {
    pub fn fit(train: &Dataset, n_neighbors: usize, leaf_size: usize) -> Self {
        let scaler = MinMaxScaler::fit(train);
        let scaled = scaler.transform(train);
        KnnModel {
            n_neighbors,
            leaf_size,
            scaler,
            points: scaled.samples.iter().map(|s| s.features.clone()).collect(),
            labels: scaled.samples.iter().map(|s| s.label).collect(),
        }
    }

    /// Majority vote among the k nearest training points; distance ties
    /// break by training index, vote ties by the nearest neighbor's label.
    pub fn predict_row(&self, row: &[f64]) -> u8 {
        let query = self.scaler.transform_row(row);
        let mut scored: Vec<(f64, usize)> = self
            .points
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let d: f64 = p
                    .iter()
                    .zip(query.iter())
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                (d, i)
            })
            .collect();
        scored.sort_by(|a, b| {
            a.0.partial_cmp(&b.0)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.1.cmp(&b.1))
        });
        let k = self.n_neighbors.max(1).min(scored.len());
        let votes_for_one = scored[..k]
            .iter()
            .filter(|&&(_, i)| self.labels[i] == 1)
            .count();
        match (2 * votes_for_one).cmp(&k) {
            std::cmp::Ordering::Greater => 1,
            std::cmp::Ordering::Less => 0,
            std::cmp::Ordering::Equal => self.labels[scored[0].1],
        }
    }
}
