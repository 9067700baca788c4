//! Vector distances and exact linear-scan nearest-neighbour search.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::TimeSeriesDataset;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NeighborError {
    #[error("vectors have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("k must be at least 1")]
    KZero,
    #[error("k = {k} but only {available} other instances exist")]
    KTooLarge { k: usize, available: usize },
    #[error("query index {index} out of range for {len} instances")]
    QueryOutOfRange { index: usize, len: usize },
    #[error("Minkowski order must be finite and positive, got {0}")]
    InvalidOrder(f64),
    #[error("unknown distance `{0}`")]
    UnknownDistance(String),
}

/// The four vector-space metrics available to the instance selectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum DistanceKind {
    Chebyshev,
    Euclidean,
    Manhattan,
    Minkowski { p: f64 },
}

impl DistanceKind {
    pub const DEFAULT_MINKOWSKI_ORDER: f64 = 2.0;

    pub fn minkowski(p: f64) -> Result<Self, NeighborError> {
        if p.is_finite() && p > 0.0 {
            Ok(Self::Minkowski { p })
        } else {
            Err(NeighborError::InvalidOrder(p))
        }
    }

    /// The four kinds in the order the experiment grid enumerates them.
    pub fn all() -> [DistanceKind; 4] {
        [
            Self::Chebyshev,
            Self::Euclidean,
            Self::Manhattan,
            Self::Minkowski {
                p: Self::DEFAULT_MINKOWSKI_ORDER,
            },
        ]
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Chebyshev => "Chebyshev",
            Self::Euclidean => "Euclidean",
            Self::Manhattan => "Manhattan",
            Self::Minkowski { .. } => "Minkowski",
        }
    }
}

impl fmt::Display for DistanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Minkowski { p } if *p != Self::DEFAULT_MINKOWSKI_ORDER => {
                write!(f, "Minkowski({p})")
            }
            other => f.write_str(other.name()),
        }
    }
}

impl FromStr for DistanceKind {
    type Err = NeighborError;

    /// Accepts `Chebyshev`, `Euclidean`, `Manhattan`, `Minkowski` and
    /// `Minkowski(<p>)`, case-insensitively, with an optional `Distance` suffix.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_ascii_lowercase();
        let base = lower.trim_end_matches("distance");
        match base {
            "chebyshev" => Ok(Self::Chebyshev),
            "euclidean" => Ok(Self::Euclidean),
            "manhattan" => Ok(Self::Manhattan),
            "minkowski" => Self::minkowski(Self::DEFAULT_MINKOWSKI_ORDER),
            _ => {
                let order = base
                    .strip_prefix("minkowski(")
                    .and_then(|rest| rest.strip_suffix(')'))
                    .and_then(|p| p.trim().parse::<f64>().ok())
                    .ok_or_else(|| NeighborError::UnknownDistance(s.to_string()))?;
                Self::minkowski(order)
            }
        }
    }
}

impl TryFrom<String> for DistanceKind {
    type Error = NeighborError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        value.parse()
    }
}

impl From<DistanceKind> for String {
    fn from(value: DistanceKind) -> Self {
        value.to_string()
    }
}

pub fn distance(a: &[f64], b: &[f64], kind: DistanceKind) -> Result<f64, NeighborError> {
    if a.len() != b.len() {
        return Err(NeighborError::LengthMismatch(a.len(), b.len()));
    }
    Ok(distance_unchecked(a, b, kind))
}

pub(crate) fn distance_unchecked(a: &[f64], b: &[f64], kind: DistanceKind) -> f64 {
    let diffs = a.iter().zip(b).map(|(x, y)| (x - y).abs());
    match kind {
        DistanceKind::Chebyshev => diffs.fold(0.0, f64::max),
        DistanceKind::Euclidean => diffs.map(|d| d * d).sum::<f64>().sqrt(),
        DistanceKind::Manhattan => diffs.sum(),
        DistanceKind::Minkowski { p } => {
            if p == 2.0 {
                diffs.map(|d| d * d).sum::<f64>().sqrt()
            } else if p == 1.0 {
                diffs.sum()
            } else {
                diffs.map(|d| d.powf(p)).sum::<f64>().powf(1.0 / p)
            }
        }
    }
}

pub(crate) fn squared_euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    pub index: usize,
    pub distance: f64,
}

/// Neighbours of one query, nearest first, ties broken by smaller index.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborList {
    /// `None` for a query that is not part of the searched set.
    pub query_index: Option<usize>,
    pub entries: Vec<Neighbor>,
}

impl NeighborList {
    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().map(|n| n.index)
    }
}

pub(crate) fn by_distance_then_index(a: &Neighbor, b: &Neighbor) -> std::cmp::Ordering {
    a.distance
        .total_cmp(&b.distance)
        .then(a.index.cmp(&b.index))
}

/// k nearest members of `candidates` to `query` (by position in `points`),
/// excluding the query itself.
pub(crate) fn knn_among<R: AsRef<[f64]>>(
    points: &[R],
    candidates: &[usize],
    query: usize,
    k: usize,
    kind: DistanceKind,
) -> Vec<Neighbor> {
    let q = points[query].as_ref();
    let mut all: Vec<Neighbor> = candidates
        .iter()
        .filter(|&&j| j != query)
        .map(|&j| Neighbor {
            index: j,
            distance: distance_unchecked(q, points[j].as_ref(), kind),
        })
        .collect();
    if k < all.len() {
        all.select_nth_unstable_by(k, by_distance_then_index);
        all.truncate(k);
    }
    all.sort_by(by_distance_then_index);
    all
}

pub(crate) fn check_k(k: usize, n: usize) -> Result<(), NeighborError> {
    if k == 0 {
        return Err(NeighborError::KZero);
    }
    let available = n.saturating_sub(1);
    if k > available {
        return Err(NeighborError::KTooLarge { k, available });
    }
    Ok(())
}

/// Exact k-nearest-neighbour search among the other rows of `ds`.
pub fn knn_search(
    ds: &TimeSeriesDataset,
    query_index: usize,
    k: usize,
    kind: DistanceKind,
) -> Result<NeighborList, NeighborError> {
    let n = ds.n_instances();
    if query_index >= n {
        return Err(NeighborError::QueryOutOfRange {
            index: query_index,
            len: n,
        });
    }
    check_k(k, n)?;
    let rows: Vec<&[f64]> = ds.rows().collect();
    let candidates: Vec<usize> = (0..n).collect();
    Ok(NeighborList {
        query_index: Some(query_index),
        entries: knn_among(&rows, &candidates, query_index, k, kind),
    })
}
