use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::classifiers::EvaluationSummary;
use crate::dataset::TimeSeriesDataset;

/// Well-known slots steps read from and write to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ContextKey {
    TrainSet,
    TestSet,
    InstanceScores,
    SelectedInstances,
    AttributeScores,
    SelectedAttributes,
    Predictions,
    Evaluation,
}

impl fmt::Display for ContextKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone)]
pub enum ContextValue {
    Dataset(Arc<TimeSeriesDataset>),
    Scores(Arc<Vec<f64>>),
    Indices(Arc<Vec<usize>>),
    Labels(Arc<Vec<String>>),
    Evaluation(EvaluationSummary),
}

impl ContextValue {
    fn kind(&self) -> &'static str {
        match self {
            ContextValue::Dataset(_) => "dataset",
            ContextValue::Scores(_) => "scores",
            ContextValue::Indices(_) => "indices",
            ContextValue::Labels(_) => "labels",
            ContextValue::Evaluation(_) => "evaluation",
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ContextError {
    #[error("context key {0} was already written")]
    AlreadySet(ContextKey),
    #[error("context key {0} has not been written")]
    Missing(ContextKey),
    #[error("context key {key} holds {found}, expected {expected}")]
    WrongType {
        key: ContextKey,
        expected: &'static str,
        found: &'static str,
    },
}

/// Per-experiment blackboard. Every key can be written exactly once.
#[derive(Debug, Clone, Default)]
pub struct PipelineContext {
    values: BTreeMap<ContextKey, ContextValue>,
}

macro_rules! typed_getter {
    ($fn_name:ident, $variant:ident, $ty:ty, $label:literal) => {
        pub fn $fn_name(&self, key: ContextKey) -> Result<&$ty, ContextError> {
            match self.get(key)? {
                ContextValue::$variant(v) => Ok(v),
                other => Err(ContextError::WrongType {
                    key,
                    expected: $label,
                    found: other.kind(),
                }),
            }
        }
    };
}

impl PipelineContext {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, key: ContextKey, value: ContextValue) -> Result<(), ContextError> {
        if self.values.contains_key(&key) {
            return Err(ContextError::AlreadySet(key));
        }
        self.values.insert(key, value);
        Ok(())
    }

    pub fn contains(&self, key: ContextKey) -> bool {
        self.values.contains_key(&key)
    }

    pub fn get(&self, key: ContextKey) -> Result<&ContextValue, ContextError> {
        self.values.get(&key).ok_or(ContextError::Missing(key))
    }

    pub fn keys(&self) -> impl Iterator<Item = ContextKey> + '_ {
        self.values.keys().copied()
    }

    typed_getter!(dataset, Dataset, Arc<TimeSeriesDataset>, "dataset");
    typed_getter!(scores, Scores, Arc<Vec<f64>>, "scores");
    typed_getter!(indices, Indices, Arc<Vec<usize>>, "indices");
    typed_getter!(labels, Labels, Arc<Vec<String>>, "labels");
    typed_getter!(evaluation, Evaluation, EvaluationSummary, "evaluation");

    pub fn optional_indices(
        &self,
        key: ContextKey,
    ) -> Result<Option<&Arc<Vec<usize>>>, ContextError> {
        if self.contains(key) {
            self.indices(key).map(Some)
        } else {
            Ok(None)
        }
    }
}
