//! DTW1NN and Rotation Forest classifiers, plus evaluation metrics.

mod dtw;
mod metrics;
mod rotation_forest;
mod tree;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use dtw::{classify_dtw1nn, dtw_distance, DtwParams};
pub use metrics::{evaluate, ConfusionMatrix, EvaluationSummary};
pub use rotation_forest::{
    predict_rotation_forest, train_rotation_forest, RotationForest, RotationForestParams,
};

use crate::dataset::TimeSeriesDataset;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClassifierError {
    #[error("series must be non-empty")]
    EmptySeries,
    #[error("warping band is too narrow to align the series ends")]
    BandTooNarrow,
    #[error("train has {train} attributes but test has {test}")]
    WidthMismatch { train: usize, test: usize },
    #[error("training data contains a single class")]
    SingleClassTraining,
    #[error("feature subset size {subset} exceeds {attributes} attributes")]
    SubsetTooLarge { subset: usize, attributes: usize },
    #[error("length mismatch ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("nothing to evaluate")]
    EmptyEvaluation,
    #[error("label `{0}` is not in the class universe")]
    LabelOutsideUniverse(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("unknown classifier `{0}`")]
    UnknownClassifier(String),
}

pub type Result<T, E = ClassifierError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum ClassifierKind {
    Dtw1nn,
    RotationForest,
}

impl ClassifierKind {
    pub fn name(&self) -> &'static str {
        match self {
            ClassifierKind::Dtw1nn => "DTW1NN",
            ClassifierKind::RotationForest => "RotF",
        }
    }
}

impl fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ClassifierKind {
    type Err = ClassifierError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dtw1nn" => Ok(ClassifierKind::Dtw1nn),
            "rotf" | "rotationforest" => Ok(ClassifierKind::RotationForest),
            _ => Err(ClassifierError::UnknownClassifier(s.to_string())),
        }
    }
}

impl TryFrom<String> for ClassifierKind {
    type Error = ClassifierError;

    fn try_from(value: String) -> Result<Self> {
        value.parse()
    }
}

impl From<ClassifierKind> for String {
    fn from(value: ClassifierKind) -> Self {
        value.name().to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifierParams {
    pub dtw: DtwParams,
    pub rotation_forest: RotationForestParams,
}

/// Trains `kind` on `train` and labels every row of `test`.
///
/// Rotation Forest's attribute subset size is capped at the number of
/// attributes, so heavily reduced datasets still train.
pub fn classify(
    kind: ClassifierKind,
    train: &TimeSeriesDataset,
    test: &TimeSeriesDataset,
    params: &ClassifierParams,
) -> Result<Vec<String>> {
    match kind {
        ClassifierKind::Dtw1nn => classify_dtw1nn(train, test, &params.dtw),
        ClassifierKind::RotationForest => {
            let rf = RotationForestParams {
                feature_subset_size: params
                    .rotation_forest
                    .feature_subset_size
                    .min(train.n_attributes()),
                ..params.rotation_forest
            };
            let model = train_rotation_forest(train, &rf)?;
            predict_rotation_forest(&model, test)
        }
    }
}
