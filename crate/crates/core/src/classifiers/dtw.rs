//! Dynamic time warping and the 1-nearest-neighbour classifier built on it.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ClassifierError, Result};
use crate::dataset::TimeSeriesDataset;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DtwParams {
    /// Sakoe-Chiba band half-width as a fraction of the longer series; 1 is unconstrained.
    pub window_fraction: f64,
}

impl Default for DtwParams {
    fn default() -> Self {
        Self {
            window_fraction: 1.0,
        }
    }
}

impl DtwParams {
    pub fn validate(&self) -> Result<()> {
        if self.window_fraction > 0.0 && self.window_fraction <= 1.0 {
            Ok(())
        } else {
            Err(ClassifierError::InvalidParams(format!(
                "window fraction must be in (0, 1], got {}",
                self.window_fraction
            )))
        }
    }

    fn band(&self, a_len: usize, b_len: usize) -> usize {
        (self.window_fraction * a_len.max(b_len) as f64).ceil() as usize
    }
}

/// Accumulated squared-difference cost of the best warping path.
/// The result is not square-rooted.
pub fn dtw_distance(a: &[f64], b: &[f64], params: &DtwParams) -> Result<f64> {
    params.validate()?;
    if a.is_empty() || b.is_empty() {
        return Err(ClassifierError::EmptySeries);
    }
    let band = params.band(a.len(), b.len());
    if a.len().abs_diff(b.len()) > band {
        return Err(ClassifierError::BandTooNarrow);
    }
    Ok(dtw_bounded(a, b, band, f64::INFINITY))
}

/// DTW with early abandoning: returns `INFINITY` as soon as every cell of a
/// row is at least `cutoff`, since the final cost can then not beat it.
fn dtw_bounded(a: &[f64], b: &[f64], band: usize, cutoff: f64) -> f64 {
    let m = b.len();
    let mut prev = vec![f64::INFINITY; m + 1];
    let mut curr = vec![f64::INFINITY; m + 1];
    prev[0] = 0.0;
    for (i, &x) in a.iter().enumerate() {
        let row = i + 1;
        let lo = row.saturating_sub(band).max(1);
        let hi = (row + band).min(m);
        curr.fill(f64::INFINITY);
        let mut row_min = f64::INFINITY;
        for col in lo..=hi {
            let d = x - b[col - 1];
            let best = prev[col - 1].min(prev[col]).min(curr[col - 1]);
            let v = d * d + best;
            curr[col] = v;
            row_min = row_min.min(v);
        }
        if row_min >= cutoff {
            return f64::INFINITY;
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    prev[m]
}

/// Labels each test row with the label of its DTW-nearest training row;
/// ties go to the smaller training index.
pub fn classify_dtw1nn(
    train: &TimeSeriesDataset,
    test: &TimeSeriesDataset,
    params: &DtwParams,
) -> Result<Vec<String>> {
    params.validate()?;
    if train.n_attributes() != test.n_attributes() {
        return Err(ClassifierError::WidthMismatch {
            train: train.n_attributes(),
            test: test.n_attributes(),
        });
    }
    let m = train.n_attributes();
    let band = params.band(m, m);
    let train_rows: Vec<&[f64]> = train.rows().collect();
    let test_rows: Vec<&[f64]> = test.rows().collect();
    Ok(test_rows
        .par_iter()
        .map(|query| {
            let mut best = f64::INFINITY;
            let mut best_index = 0;
            for (j, candidate) in train_rows.iter().enumerate() {
                let d = dtw_bounded(query, candidate, band, best);
                if d < best {
                    best = d;
                    best_index = j;
                }
            }
            train.label(best_index).to_string()
        })
        .collect())
}
