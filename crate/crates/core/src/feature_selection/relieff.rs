use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{AttributeScores, FeatureSelectionError, Result, Selector};
use crate::dataset::TimeSeriesDataset;
use crate::neighbors::{by_distance_then_index, Neighbor};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReliefFParams {
    /// Nearest hits and nearest misses (per other class) per sampled instance.
    pub k_hits_misses: usize,
    /// Number of sampled instances; `None` walks every instance in order.
    pub sample_count: Option<usize>,
    pub seed: u64,
}

impl Default for ReliefFParams {
    fn default() -> Self {
        Self {
            k_hits_misses: 10,
            sample_count: None,
            seed: 1,
        }
    }
}

/// ReliefF attribute weights.
///
/// Differences are range-normalized per attribute and neighbours are found
/// by the sum of those differences. Misses from each other class are weighted
/// by that class's prior relative to the non-own-class mass.
pub fn relieff_scores(ds: &TimeSeriesDataset, params: &ReliefFParams) -> Result<AttributeScores> {
    if params.k_hits_misses == 0 {
        return Err(FeatureSelectionError::InvalidParams(
            "ReliefF needs k >= 1".into(),
        ));
    }
    let n = ds.n_instances();
    let m = ds.n_attributes();
    let classes = ds.class_indices();
    let n_classes = ds.class_universe().len();
    if n_classes < 2 {
        return Err(FeatureSelectionError::SingleClassDataset);
    }

    let mut lo = vec![f64::INFINITY; m];
    let mut hi = vec![f64::NEG_INFINITY; m];
    for row in ds.rows() {
        for (a, &v) in row.iter().enumerate() {
            lo[a] = lo[a].min(v);
            hi[a] = hi[a].max(v);
        }
    }
    let inv_range: Vec<f64> = lo
        .iter()
        .zip(&hi)
        .map(|(l, h)| if h > l { 1.0 / (h - l) } else { 0.0 })
        .collect();
    let diff = |a: usize, x: &[f64], y: &[f64]| (x[a] - y[a]).abs() * inv_range[a];

    let mut priors = vec![0.0; n_classes];
    for &c in &classes {
        priors[c] += 1.0 / n as f64;
    }

    let sample: Vec<usize> = match params.sample_count {
        Some(s) if s < n => {
            let mut all: Vec<usize> = (0..n).collect();
            all.shuffle(&mut ChaCha8Rng::seed_from_u64(params.seed));
            all.truncate(s.max(1));
            all
        }
        _ => (0..n).collect(),
    };
    let m_samples = sample.len() as f64;

    let mut weights = vec![0.0; m];
    let mut nearest: Vec<Vec<Neighbor>> = vec![Vec::new(); n_classes];
    for &i in &sample {
        let xi = ds.row(i);
        for list in nearest.iter_mut() {
            list.clear();
        }
        for j in (0..n).filter(|&j| j != i) {
            let xj = ds.row(j);
            let d: f64 = (0..m).map(|a| diff(a, xi, xj)).sum();
            nearest[classes[j]].push(Neighbor {
                index: j,
                distance: d,
            });
        }
        let own = classes[i];
        for (c, list) in nearest.iter_mut().enumerate() {
            let k = params.k_hits_misses.min(list.len());
            if k == 0 {
                continue;
            }
            if k < list.len() {
                list.select_nth_unstable_by(k, by_distance_then_index);
                list.truncate(k);
            }
            let scale = if c == own {
                -1.0 / (m_samples * k as f64)
            } else {
                priors[c] / (1.0 - priors[own]) / (m_samples * k as f64)
            };
            for nb in list.iter() {
                let xj = ds.row(nb.index);
                for (a, w) in weights.iter_mut().enumerate() {
                    *w += scale * diff(a, xi, xj);
                }
            }
        }
    }

    Ok(AttributeScores {
        selector: Selector::ReliefF,
        scores: weights,
    })
}
