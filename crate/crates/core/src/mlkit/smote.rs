//! Borderline minority oversampling.
//!
//! Class balance is restored by synthesizing minority samples along the
//! segments between borderline minority points and their minority
//! neighbors.  A minority point is borderline when more than half of its
//! `k` nearest neighbors (Euclidean, over the whole set) belong to the
//! majority class — those are the points sitting near the decision surface
//! where extra support helps.  When no point qualifies, synthesis falls
//! back to the whole minority class so balancing always completes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::dataset::LabeledSample;

/// Oversampling failures.
#[derive(Clone, Debug, PartialEq, Eq, Error, Serialize, Deserialize)]
#[serde(tag = "error", rename_all = "snake_case")]
pub enum SmoteError {
    #[error("class {label} has no samples")]
    EmptyClass { label: u8 },
    #[error("minority class has {size} sample(s); at least 2 required")]
    TinyMinority { size: usize },
    #[error("k = {k} must be below the sample count {samples}")]
    KTooLarge { k: usize, samples: usize },
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Indices of the `k` nearest neighbors of `origin` among `candidates`
/// (excluding `origin` itself), ties broken by index for determinism.
fn nearest(origin: usize, candidates: &[usize], samples: &[LabeledSample], k: usize) -> Vec<usize> {
    let mut scored: Vec<(f64, usize)> = candidates
        .iter()
        .copied()
        .filter(|&c| c != origin)
        .map(|c| {
            (
                squared_distance(&samples[origin].features, &samples[c].features),
                c,
            )
        })
        .collect();
    scored.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.1.cmp(&b.1))
    });
    scored.into_iter().take(k).map(|(_, i)| i).collect()
}

/// Balance a two-class sample set by borderline oversampling of the
/// minority class.
///
/// Synthetic points are convex combinations `x + λ·(x' − x)` with λ drawn
/// uniformly from [0, 1], `x` a borderline minority sample and `x'` one of
/// its `k` nearest minority neighbors.  The output contains the input
/// followed by the synthetic points; class counts come out equal.
/// Deterministic per seed.  An already balanced input is returned
/// unchanged.
pub fn smote_balance(
    samples: &[LabeledSample],
    k: usize,
    seed: u64,
) -> Result<Vec<LabeledSample>, SmoteError> {
    let count_one = samples.iter().filter(|s| s.label == 1).count();
    let count_zero = samples.len() - count_one;
    if count_zero == 0 {
        return Err(SmoteError::EmptyClass { label: 0 });
    }
    if count_one == 0 {
        return Err(SmoteError::EmptyClass { label: 1 });
    }
    if count_zero == count_one {
        return Ok(samples.to_vec());
    }
    let (minority_label, minority_count, majority_count) = if count_one < count_zero {
        (1u8, count_one, count_zero)
    } else {
        (0u8, count_zero, count_one)
    };
    if minority_count < 2 {
        return Err(SmoteError::TinyMinority {
            size: minority_count,
        });
    }
    if k >= samples.len() {
        return Err(SmoteError::KTooLarge {
            k,
            samples: samples.len(),
        });
    }

    let all: Vec<usize> = (0..samples.len()).collect();
    let minority: Vec<usize> = all
        .iter()
        .copied()
        .filter(|&i| samples[i].label == minority_label)
        .collect();

    // Borderline selection: more than half of the k nearest neighbors in
    // the full set belong to the majority class.
    let mut base: Vec<usize> = minority
        .iter()
        .copied()
        .filter(|&i| {
            let neighbors = nearest(i, &all, samples, k);
            let majority_neighbors = neighbors
                .iter()
                .filter(|&&n| samples[n].label != minority_label)
                .count();
            2 * majority_neighbors > neighbors.len()
        })
        .collect();
    if base.is_empty() {
        base = minority.clone();
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut output = samples.to_vec();
    let deficit = majority_count - minority_count;
    for serial in 0..deficit {
        let x = base[rng.gen_range(0..base.len())];
        let neighbors = nearest(x, &minority, samples, k.min(minority.len() - 1));
        let x_prime = neighbors[rng.gen_range(0..neighbors.len())];
        let lambda: f64 = rng.gen_range(0.0..=1.0);
        let features: Vec<f64> = samples[x]
            .features
            .iter()
            .zip(samples[x_prime].features.iter())
            .map(|(&a, &b)| a + lambda * (b - a))
            .collect();
        output.push(LabeledSample {
            token_id: format!("smote-{serial}"),
            features,
            label: minority_label,
        });
    }
    Ok(output)
}
