//! Support-vector classification via the simplified SMO procedure.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::dataset::{Dataset, MinMaxScaler};

const PENALTY_C: f64 = 10.0;
const TOLERANCE: f64 = 1e-3;
const MAX_QUIET_PASSES: usize = 5;
const MAX_TOTAL_SWEEPS: usize = 200;
const ALPHA_EPS: f64 = 1e-8;

/// Kernel choices exposed by the configuration grid: linear, and
/// inhomogeneous polynomial (x·z + 1)^degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kernel")]
pub enum SvmKernel {
    Linear,
    Poly { degree: u32 },
}

impl SvmKernel {
    fn apply(self, a: &[f64], b: &[f64]) -> f64 {
        let dot: f64 = a.iter().zip(b.iter()).map(|(x, y)| x * y).sum();
        match self {
            SvmKernel::Linear => dot,
            SvmKernel::Poly { degree } => (dot + 1.0).powi(degree as i32),
        }
    }
}

/// Fitted soft-margin classifier.  Only points with non-zero multipliers
/// are retained; the decision value is Σ αᵢ yᵢ K(xᵢ, x) + b with labels
/// mapped to ±1 (class 1 → +1).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub kernel: SvmKernel,
    scaler: MinMaxScaler,
    support_points: Vec<Vec<f64>>,
    support_targets: Vec<f64>,
    multipliers: Vec<f64>,
    bias: f64,
}

impl SvmModel {
    pub fn fit(train: &Dataset, kernel: SvmKernel, seed: u64) -> Self {
        let scaler = MinMaxScaler::fit(train);
        let scaled = scaler.transform(train);
        let points: Vec<Vec<f64>> = scaled.samples.iter().map(|s| s.features.clone()).collect();
        let targets: Vec<f64> = scaled
            .samples
            .iter()
            .map(|s| if s.label == 1 { 1.0 } else { -1.0 })
            .collect();
        let n = points.len();

        let mut gram = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in i..n {
                let k = kernel.apply(&points[i], &points[j]);
                gram[i][j] = k;
                gram[j][i] = k;
            }
        }

        let mut alphas = vec![0.0; n];
        let mut bias = 0.0;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let decision = |alphas: &[f64], bias: f64, gram_row: &[f64]| -> f64 {
            alphas
                .iter()
                .zip(targets.iter())
                .zip(gram_row.iter())
                .map(|((a, y), k)| a * y * k)
                .sum::<f64>()
                + bias
        };

        let mut quiet_passes = 0;
        let mut sweeps = 0;
        while quiet_passes < MAX_QUIET_PASSES && sweeps < MAX_TOTAL_SWEEPS && n > 1 {
            sweeps += 1;
            let mut changed = 0;
            for i in 0..n {
                let err_i = decision(&alphas, bias, &gram[i]) - targets[i];
                let violates = (targets[i] * err_i < -TOLERANCE && alphas[i] < PENALTY_C)
                    || (targets[i] * err_i > TOLERANCE && alphas[i] > 0.0);
                if !violates {
                    continue;
                }
                let mut j = rng.gen_range(0..n - 1);
                if j >= i {
                    j += 1;
                }
                let err_j = decision(&alphas, bias, &gram[j]) - targets[j];
                let (alpha_i_old, alpha_j_old) = (alphas[i], alphas[j]);
                let (low, high) = if (targets[i] - targets[j]).abs() > f64::EPSILON {
                    (
                        (alpha_j_old - alpha_i_old).max(0.0),
                        (PENALTY_C + alpha_j_old - alpha_i_old).min(PENALTY_C),
                    )
                } else {
                    (
                        (alpha_i_old + alpha_j_old - PENALTY_C).max(0.0),
                        (alpha_i_old + alpha_j_old).min(PENALTY_C),
                    )
                };
                if high - low < f64::EPSILON {
                    continue;
                }
                let eta = 2.0 * gram[i][j] - gram[i][i] - gram[j][j];
                if eta >= 0.0 {
                    continue;
                }
                let mut alpha_j = alpha_j_old - targets[j] * (err_i - err_j) / eta;
                alpha_j = alpha_j.clamp(low, high);
                if (alpha_j - alpha_j_old).abs() < 1e-5 {
                    continue;
                }
                let alpha_i = alpha_i_old + targets[i] * targets[j] * (alpha_j_old - alpha_j);
                alphas[i] = alpha_i;
                alphas[j] = alpha_j;
                let b1 = bias
                    - err_i
                    - targets[i] * (alpha_i - alpha_i_old) * gram[i][i]
                    - targets[j] * (alpha_j - alpha_j_old) * gram[i][j];
                let b2 = bias
                    - err_j
                    - targets[i] * (alpha_i - alpha_i_old) * gram[i][j]
                    - targets[j] * (alpha_j - alpha_j_old) * gram[j][j];
                bias = if alpha_i > 0.0 && alpha_i < PENALTY_C {
                    b1
                } else if alpha_j > 0.0 && alpha_j < PENALTY_C {
                    b2
                } else {
                    (b1 + b2) / 2.0
                };
                changed += 1;
            }
            if changed == 0 {
                quiet_passes += 1;
            } else {
                quiet_passes = 0;
            }
        }

        let mut support_points = Vec::new();
        let mut support_targets = Vec::new();
        let mut multipliers = Vec::new();
        for i in 0..n {
            if alphas[i] > ALPHA_EPS {
                support_points.push(points[i].clone());
                support_targets.push(targets[i]);
                multipliers.push(alphas[i]);
            }
        }
        SvmModel {
            kernel,
            scaler,
            support_points,
            support_targets,
            multipliers,
            bias,
        }
    }

    pub fn decision_value(&self, row: &[f64]) -> f64 {
        let query = self.scaler.transform_row(row);
        self.support_points
            .iter()
            .zip(self.support_targets.iter())
            .zip(self.multipliers.iter())
            .map(|((p, y), a)| a * y * self.kernel.apply(p, &query))
            .sum::<f64>()
            + self.bias
    }

    pub fn predict_row(&self, row: &[f64]) -> u8 {
        if self.decision_value(row) > 0.0 {
            1
        } else {
            0
        }
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

    fn blobs() -> Dataset {
        let mut rows = Vec::new();
        for i in 0..10 {
            let off = (i as f64) * 0.07;
            rows.push((0.0 + off, 0.3 - off, 0));
            rows.push((4.0 + off, 4.3 - off, 1));
        }
        dataset(&rows)
    }

    #[test]
    fn linear_kernel_separates_blobs() {
        let model = SvmModel::fit(&blobs(), SvmKernel::Linear, 7);
        assert_eq!(model.predict_row(&[0.2, 0.2]), 0);
        assert_eq!(model.predict_row(&[4.2, 4.2]), 1);
        assert!(!model.support_points.is_empty());
    }

    #[test]
    fn poly_kernel_handles_a_ring() {
        // Inner cluster vs surrounding points: not linearly separable in 2d.
        let mut rows = vec![
            (0.0, 0.0, 1),
            (0.1, 0.1, 1),
            (-0.1, 0.1, 1),
            (0.1, -0.1, 1),
            (-0.1, -0.1, 1),
        ];
        for k in 0..8 {
            let th = k as f64 * std::f64::consts::FRAC_PI_4;
            rows.push((2.0 * th.cos(), 2.0 * th.sin(), 0));
        }
        let d = dataset(&rows);
        let model = SvmModel::fit(&d, SvmKernel::Poly { degree: 2 }, 3);
        assert_eq!(model.predict_row(&[0.0, 0.05]), 1);
        assert_eq!(model.predict_row(&[2.0, 0.1]), 0);
    }

    #[test]
    fn fit_is_deterministic_per_seed() {
        let d = blobs();
        let a = SvmModel::fit(&d, SvmKernel::Linear, 11);
        let b = SvmModel::fit(&d, SvmKernel::Linear, 11);
        assert_eq!(a, b);
    }

    #[test]
    fn decision_value_sign_matches_prediction() {
        let model = SvmModel::fit(&blobs(), SvmKernel::Linear, 5);
        for row in [[0.1, 0.2], [4.4, 4.1], [2.0, 2.0]] {
            let predicted = model.predict_row(&row);
            let value = model.decision_value(&row);
            assert_eq!(predicted == 1, value > 0.0);
        }
    }
}
