//! Univariate attribute ranking with five filter criteria, and the ratio
//! cut that turns a ranking into an attribute subset.

mod discretize;
mod entropy;
mod oner;
mod relieff;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use discretize::{
    discretize_equal_width, DiscretizationSpec, DiscretizationStrategy, Discretized,
};
pub use entropy::{conditional_entropy, entropy, gain_ratio, info_gain, symmetrical_uncertainty};
pub use oner::oner_score;
pub use relieff::{relieff_scores, ReliefFParams};

use crate::dataset::TimeSeriesDataset;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FeatureSelectionError {
    #[error("input is empty")]
    EmptyInput,
    #[error("length mismatch ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("dataset has a single class; ReliefF misses are undefined")]
    SingleClassDataset,
    #[error("no attribute scores to select from")]
    EmptyScores,
    #[error("attribute ratio must be in (0, 1], got {0}")]
    InvalidRatio(f64),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("unknown attribute selector `{0}`")]
    UnknownSelector(String),
}

pub type Result<T, E = FeatureSelectionError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Selector {
    GainRatio,
    InfoGain,
    OneR,
    ReliefF,
    SymmetricalUncertainty,
}

impl Selector {
    pub fn all() -> [Selector; 5] {
        [
            Selector::GainRatio,
            Selector::InfoGain,
            Selector::OneR,
            Selector::ReliefF,
            Selector::SymmetricalUncertainty,
        ]
    }

    pub fn name(&self) -> &'static str {
        match self {
            Selector::GainRatio => "GainRatio",
            Selector::InfoGain => "InfoGain",
            Selector::OneR => "OneR",
            Selector::ReliefF => "ReliefF",
            Selector::SymmetricalUncertainty => "SymmetricalUncertainty",
        }
    }
}

impl fmt::Display for Selector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Selector {
    type Err = FeatureSelectionError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gainratio" | "gainr" => Ok(Selector::GainRatio),
            "infogain" => Ok(Selector::InfoGain),
            "oner" => Ok(Selector::OneR),
            "relieff" | "relief" => Ok(Selector::ReliefF),
            "symmetricaluncertainty" | "symmetricaluncert" | "symmu" => {
                Ok(Selector::SymmetricalUncertainty)
            }
            _ => Err(FeatureSelectionError::UnknownSelector(s.to_string())),
        }
    }
}

impl TryFrom<String> for Selector {
    type Error = FeatureSelectionError;

    fn try_from(value: String) -> Result<Self> {
        value.parse()
    }
}

impl From<Selector> for String {
    fn from(value: Selector) -> Self {
        value.name().to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FSConfig {
    pub selector: Selector,
    pub att_sel_ratio: f64,
}

impl FSConfig {
    pub fn validate(&self) -> Result<()> {
        check_ratio(self.att_sel_ratio)
    }
}

fn check_ratio(ratio: f64) -> Result<()> {
    if ratio > 0.0 && ratio <= 1.0 {
        Ok(())
    } else {
        Err(FeatureSelectionError::InvalidRatio(ratio))
    }
}

/// Knobs shared by the selectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SelectorParams {
    /// Equal-width bins used by the entropy-based selectors.
    pub bins: usize,
    pub oner_bucket_min: usize,
    pub relieff: ReliefFParams,
}

impl Default for SelectorParams {
    fn default() -> Self {
        Self {
            bins: 10,
            oner_bucket_min: 6,
            relieff: ReliefFParams::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttributeScores {
    pub selector: Selector,
    /// One merit per attribute; higher is better.
    pub scores: Vec<f64>,
}

/// Scores every attribute of `ds` with `selector`.
pub fn score_attributes(
    ds: &TimeSeriesDataset,
    selector: Selector,
    params: &SelectorParams,
) -> Result<AttributeScores> {
    let labels = ds.class_indices();
    let scores = match selector {
        Selector::ReliefF => return relieff_scores(ds, &params.relieff),
        Selector::OneR => (0..ds.n_attributes())
            .map(|a| oner_score(&ds.column(a), &labels, params.oner_bucket_min))
            .collect::<Result<Vec<_>>>()?,
        Selector::GainRatio | Selector::InfoGain | Selector::SymmetricalUncertainty => {
            let merit = match selector {
                Selector::GainRatio => gain_ratio,
                Selector::InfoGain => info_gain,
                _ => symmetrical_uncertainty,
            };
            discretize_equal_width(ds, params.bins)
                .columns
                .iter()
                .map(|col| merit(col, &labels))
                .collect::<Result<Vec<_>>>()?
        }
    };
    Ok(AttributeScores { selector, scores })
}

/// Number of attributes kept for a ratio: `floor(ratio·m)`, at least one.
pub fn attributes_to_keep(m: usize, ratio: f64) -> usize {
    ((ratio * m as f64).floor() as usize).clamp(1, m.max(1))
}

/// Indices of the best `max(1, floor(ratio·m))` attributes, best first,
/// ties to the smaller index.
pub fn select_attributes(scores: &AttributeScores, ratio: f64) -> Result<Vec<usize>> {
    check_ratio(ratio)?;
    let m = scores.scores.len();
    if m == 0 {
        return Err(FeatureSelectionError::EmptyScores);
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| {
        scores.scores[b]
            .total_cmp(&scores.scores[a])
            .then(a.cmp(&b))
    });
    order.truncate(attributes_to_keep(m, ratio));
    Ok(order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Split;

    fn scores(v: Vec<f64>) -> AttributeScores {
        AttributeScores {
            selector: Selector::InfoGain,
            scores: v,
        }
    }

    #[test]
    fn cut_counts() {
        assert_eq!(
            select_attributes(&scores(vec![0.0; 637]), 0.002)
                .unwrap()
                .len(),
            1
        );
        assert_eq!(
            select_attributes(&scores(vec![0.0; 24]), 0.002)
                .unwrap()
                .len(),
            1
        );
        assert_eq!(
            select_attributes(&scores(vec![0.0; 100]), 0.66)
                .unwrap()
                .len(),
            66
        );
        assert_eq!(
            select_attributes(&scores(vec![0.0; 7]), 1.0).unwrap().len(),
            7
        );
        assert!(matches!(
            select_attributes(&scores(vec![]), 0.5),
            Err(FeatureSelectionError::EmptyScores)
        ));
        assert!(select_attributes(&scores(vec![1.0]), 1.5).is_err());
    }

    #[test]
    fn ranking_order() {
        let s = scores(vec![0.2, 0.9, 0.2, 0.5]);
        assert_eq!(select_attributes(&s, 1.0).unwrap(), vec![1, 3, 0, 2]);
        assert_eq!(select_attributes(&s, 0.5).unwrap(), vec![1, 3]);
    }

    #[test]
    fn selector_names() {
        for s in Selector::all() {
            assert_eq!(s.name().parse::<Selector>().unwrap(), s);
        }
        assert_eq!("Relief".parse::<Selector>().unwrap(), Selector::ReliefF);
        assert_eq!(
            "SymmU".parse::<Selector>().unwrap(),
            Selector::SymmetricalUncertainty
        );
    }

    #[test]
    fn every_selector_scores_every_attribute() {
        let rows: Vec<Vec<f64>> = (0..12)
            .map(|i| vec![i as f64, (i % 3) as f64, 1.0, (i * i) as f64 * 0.1])
            .collect();
        let labels = (0..12)
            .map(|i| if i < 6 { "a" } else { "b" }.to_string())
            .collect();
        let ds = TimeSeriesDataset::from_rows("s", Split::Train, rows, labels).unwrap();
        for s in Selector::all() {
            let out = score_attributes(&ds, s, &SelectorParams::default()).unwrap();
            assert_eq!(out.scores.len(), 4);
            assert!(
                out.scores.iter().all(|v| v.is_finite()),
                "{s}: {:?}",
                out.scores
            );
            // Attribute 0 separates the classes perfectly; the constant one carries nothing.
            let best = select_attributes(&out, 0.25).unwrap();
            assert!(best == vec![0] || best == vec![3], "{s}: {:?}", out.scores);
            if s != Selector::OneR {
                assert_eq!(out.scores[2], 0.0, "{s}");
            }
        }
    }
}
