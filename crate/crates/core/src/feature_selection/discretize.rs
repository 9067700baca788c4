use serde::{Deserialize, Serialize};

use crate::dataset::TimeSeriesDataset;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum DiscretizationStrategy {
    #[default]
    EqualWidth,
}

/// Cut points for every attribute of one dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizationSpec {
    pub strategy: DiscretizationStrategy,
    pub bins: usize,
    /// Strictly increasing per attribute; empty for a constant attribute.
    pub cut_points: Vec<Vec<f64>>,
}

impl DiscretizationSpec {
    /// Bin of `value` for `attribute`. A value equal to a cut point lands in
    /// the upper bin.
    pub fn bin(&self, attribute: usize, value: f64) -> usize {
        self.cut_points[attribute].partition_point(|&c| c <= value)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Discretized {
    pub spec: DiscretizationSpec,
    /// One column of bin codes per attribute.
    pub columns: Vec<Vec<usize>>,
}

pub(crate) fn equal_width_cuts(column: &[f64], bins: usize) -> Vec<f64> {
    let (lo, hi) = column
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    if hi <= lo {
        return Vec::new();
    }
    let mut cuts: Vec<f64> = (1..bins)
        .map(|j| lo + (hi - lo) * j as f64 / bins as f64)
        .collect();
    cuts.dedup();
    cuts
}

/// Splits each attribute's `[min, max]` into `bins` equal-width intervals.
///
/// `bins` below 2 is raised to 2.
pub fn discretize_equal_width(ds: &TimeSeriesDataset, bins: usize) -> Discretized {
    let bins = bins.max(2);
    let mut cut_points = Vec::with_capacity(ds.n_attributes());
    let mut columns = Vec::with_capacity(ds.n_attributes());
    for a in 0..ds.n_attributes() {
        let column = ds.column(a);
        let cuts = equal_width_cuts(&column, bins);
        columns.push(
            column
                .iter()
                .map(|&v| cuts.partition_point(|&c| c <= v))
                .collect(),
        );
        cut_points.push(cuts);
    }
    Discretized {
        spec: DiscretizationSpec {
            strategy: DiscretizationStrategy::EqualWidth,
            bins,
            cut_points,
        },
        columns,
    }
}
