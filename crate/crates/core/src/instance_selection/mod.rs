//! Instance scoring (Distance2kNN, LDIS, LKRR) and ratio-based cutting of
//! the scored training set.

mod lkrr;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use lkrr::{
    kernel_ridge_predict, lkrr_iterative_removal, score_lkrr, Bandwidth, KernelKind, LkrrBreakdown,
    LkrrParams,
};

use crate::dataset::TimeSeriesDataset;
use crate::neighbors::{self, distance_unchecked, knn_among, DistanceKind, NeighborError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InstanceSelectionError {
    #[error(transparent)]
    Neighbor(#[from] NeighborError),
    #[error("kernel system is singular")]
    SingularSystem,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("weighted variance is zero for every feature")]
    DegenerateVariance,
    #[error("cannot remove {l} instances, at most {max} allowed")]
    LTooLarge { l: usize, max: usize },
    #[error("instance selection needs at least two instances, got {0}")]
    FewerThanTwoInstances(usize),
    #[error("selection ratio must be in (0, 1], got {0}")]
    InvalidRatio(f64),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("unknown instance selection method `{0}`")]
    UnknownMethod(String),
}

pub type Result<T, E = InstanceSelectionError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum ISMethod {
    Distance2kNN,
    Ldis,
    Lkrr,
}

impl ISMethod {
    pub fn name(&self) -> &'static str {
        match self {
            ISMethod::Distance2kNN => "Dist2kNN",
            ISMethod::Ldis => "LDIS",
            ISMethod::Lkrr => "LKRR",
        }
    }
}

impl fmt::Display for ISMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ISMethod {
    type Err = InstanceSelectionError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dist2knn" | "distance2knn" => Ok(ISMethod::Distance2kNN),
            "ldis" => Ok(ISMethod::Ldis),
            "lkrr" => Ok(ISMethod::Lkrr),
            _ => Err(InstanceSelectionError::UnknownMethod(s.to_string())),
        }
    }
}

impl TryFrom<String> for ISMethod {
    type Error = InstanceSelectionError;

    fn try_from(value: String) -> Result<Self> {
        value.parse()
    }
}

impl From<ISMethod> for String {
    fn from(value: ISMethod) -> Self {
        value.name().to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ISConfig {
    pub method: ISMethod,
    pub k_neighbours: usize,
    /// Fraction of training instances to keep, in (0, 1].
    pub od_sel_ratio: f64,
    /// Keep the highest scores (true) or the lowest (false).
    pub od_desc_order: bool,
    pub distance: DistanceKind,
}

impl ISConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k_neighbours == 0 {
            return Err(NeighborError::KZero.into());
        }
        check_ratio(self.od_sel_ratio)
    }
}

fn check_ratio(ratio: f64) -> Result<()> {
    if ratio > 0.0 && ratio <= 1.0 {
        Ok(())
    } else {
        Err(InstanceSelectionError::InvalidRatio(ratio))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceScores {
    pub method: ISMethod,
    pub scores: Vec<f64>,
    pub config: ISConfig,
}

impl InstanceScores {
    /// Cuts these scores with the ratio and order of their own config.
    pub fn select(&self) -> Result<Vec<usize>> {
        select_instances(
            &self.scores,
            self.config.od_sel_ratio,
            self.config.od_desc_order,
        )
    }
}

/// Sum of distances from each instance to its k nearest neighbours.
pub fn score_distance2knn(ds: &TimeSeriesDataset, cfg: &ISConfig) -> Result<InstanceScores> {
    cfg.validate()?;
    let n = ds.n_instances();
    neighbors::check_k(cfg.k_neighbours, n)?;
    let points: Vec<&[f64]> = ds.rows().collect();
    let all: Vec<usize> = (0..n).collect();
    let scores = (0..n)
        .map(|i| {
            knn_among(&points, &all, i, cfg.k_neighbours, cfg.distance)
                .iter()
                .map(|nb| nb.distance)
                .sum()
        })
        .collect();
    Ok(InstanceScores {
        method: ISMethod::Distance2kNN,
        scores,
        config: *cfg,
    })
}

/// Local density per class: the negated mean distance from an instance to
/// every other instance of its own class. Higher is denser. A class with a
/// single member gets density 0.
pub fn score_ldis(ds: &TimeSeriesDataset, cfg: &ISConfig) -> Result<InstanceScores> {
    cfg.validate()?;
    let classes = ds.class_indices();
    let n_classes = ds.class_universe().len();
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); n_classes];
    for (i, &c) in classes.iter().enumerate() {
        members[c].push(i);
    }
    let mut scores = vec![0.0; ds.n_instances()];
    for group in &members {
        if group.len() < 2 {
            continue;
        }
        let others = (group.len() - 1) as f64;
        for &i in group {
            let total: f64 = group
                .iter()
                .filter(|&&j| j != i)
                .map(|&j| distance_unchecked(ds.row(i), ds.row(j), cfg.distance))
                .sum();
            scores[i] = -total / others;
        }
    }
    Ok(InstanceScores {
        method: ISMethod::Ldis,
        scores,
        config: *cfg,
    })
}

/// Scores every training instance with the method named in `cfg`.
pub fn score_instances(
    ds: &TimeSeriesDataset,
    cfg: &ISConfig,
    lkrr_params: &LkrrParams,
) -> Result<InstanceScores> {
    match cfg.method {
        ISMethod::Distance2kNN => score_distance2knn(ds, cfg),
        ISMethod::Ldis => score_ldis(ds, cfg),
        ISMethod::Lkrr => score_lkrr(ds, cfg, lkrr_params).map(|(s, _)| s),
    }
}

/// Number of instances kept for a ratio: `floor(ratio·n)`, never below two.
pub fn instances_to_keep(n: usize, ratio: f64) -> usize {
    ((ratio * n as f64).floor() as usize).max(2).min(n)
}

/// Keeps the top `max(2, floor(ratio·n))` instances by score (descending or
/// ascending, ties to the smaller index) and returns them in index order.
pub fn select_instances(scores: &[f64], ratio: f64, desc: bool) -> Result<Vec<usize>> {
    check_ratio(ratio)?;
    let n = scores.len();
    if n < 2 {
        return Err(InstanceSelectionError::FewerThanTwoInstances(n));
    }
    let count = instances_to_keep(n, ratio);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        let by_score = if desc {
            scores[b].total_cmp(&scores[a])
        } else {
            scores[a].total_cmp(&scores[b])
        };
        by_score.then(a.cmp(&b))
    });
    let mut keep = order[..count].to_vec();
    keep.sort_unstable();
    Ok(keep)
}
