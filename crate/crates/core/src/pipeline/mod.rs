//! Experiment orchestration: per-experiment step pipelines over a shared
//! context, grid enumeration, suite execution and CSV output.

mod context;
mod grid;
mod record;
mod steps;

use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use thiserror::Error;

pub use context::{ContextError, ContextKey, ContextValue, PipelineContext};
pub use grid::{
    enumerate_attribute_grid, enumerate_grid, ComponentParams, ExperimentGridSpec, GridConfig,
};
pub use record::{write_results, write_results_csv, ExperimentVariant, ResultRecord};
pub use steps::{
    AttributeSelectionStep, ClassificationStep, EvaluationStep, InstanceSelectionStep, Pipeline,
    PipelineStep, StepEnv, SuiteCache,
};

use crate::classifiers::{ClassifierError, ClassifierKind};
use crate::dataset::{load_pair, DatasetDescriptor, DatasetError, TimeSeriesDataset};
use crate::feature_selection::{FSConfig, FeatureSelectionError};
use crate::instance_selection::{ISConfig, ISMethod, InstanceSelectionError};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("grid axis `{0}` is empty")]
    EmptyAxis(&'static str),
    #[error("grid axis `{axis}` has invalid value {value}")]
    InvalidAxisValue { axis: &'static str, value: String },
    #[error("records of different variants cannot share one file")]
    MixedVariants,
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    InstanceSelection(#[from] InstanceSelectionError),
    #[error(transparent)]
    FeatureSelection(#[from] FeatureSelectionError),
    #[error(transparent)]
    Classifier(#[from] ClassifierError),
    #[error(transparent)]
    Context(#[from] ContextError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Write(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("cannot build worker pool: {0}")]
    ThreadPool(String),
}

pub type Result<T, E = PipelineError> = std::result::Result<T, E>;

/// A train/test pair shared read-only by every experiment.
#[derive(Debug, Clone)]
pub struct DatasetPair {
    pub train: Arc<TimeSeriesDataset>,
    pub test: Arc<TimeSeriesDataset>,
}

impl DatasetPair {
    pub fn new(train: TimeSeriesDataset, test: TimeSeriesDataset) -> Self {
        Self {
            train: Arc::new(train),
            test: Arc::new(test),
        }
    }

    pub fn load(desc: &DatasetDescriptor) -> Result<Self> {
        let (train, test) = load_pair(desc)?;
        Ok(Self::new(train, test))
    }

    pub fn name(&self) -> &str {
        self.train.name()
    }

    fn fresh_context(&self) -> PipelineContext {
        let mut ctx = PipelineContext::new();
        ctx.insert(
            ContextKey::TrainSet,
            ContextValue::Dataset(self.train.clone()),
        )
        .expect("fresh context");
        ctx.insert(
            ContextKey::TestSet,
            ContextValue::Dataset(self.test.clone()),
        )
        .expect("fresh context");
        ctx
    }
}

/// Runs `pipeline` in a fresh context and fills `record` from what the
/// steps left behind. Errors become an error row.
fn execute(
    pair: &DatasetPair,
    pipeline: &Pipeline,
    env: StepEnv<'_>,
    mut record: ResultRecord,
) -> (ResultRecord, Option<PipelineError>) {
    let start = Instant::now();
    let mut ctx = pair.fresh_context();
    let outcome = pipeline.run(&mut ctx, env).and_then(|()| {
        let count =
            |key| -> Result<Option<usize>> { Ok(ctx.optional_indices(key)?.map(|v| v.len())) };
        record.num_instances_selected = count(ContextKey::SelectedInstances)?;
        record.num_attributes_selected = count(ContextKey::SelectedAttributes)?;
        record.metrics = Some(*ctx.evaluation(ContextKey::Evaluation)?);
        Ok(())
    });
    record.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    match outcome {
        Ok(()) => (record, None),
        Err(e) => {
            record.error = Some(e.to_string());
            (record, Some(e))
        }
    }
}

fn strict(result: (ResultRecord, Option<PipelineError>)) -> Result<ResultRecord> {
    match result {
        (record, None) => Ok(record),
        (_, Some(e)) => Err(e),
    }
}

/// Classifies the unmodified pair.
pub fn run_classification(
    pair: &DatasetPair,
    classifier: ClassifierKind,
    params: &ComponentParams,
) -> Result<ResultRecord> {
    let record = ResultRecord::new(
        ExperimentVariant::Classification,
        pair.name(),
        classifier.name(),
    );
    let env = StepEnv {
        params,
        cache: None,
    };
    strict(execute(
        pair,
        &Pipeline::classification(classifier),
        env,
        record,
    ))
}

fn attribute_record(pair: &DatasetPair, fs: &FSConfig, classifier: ClassifierKind) -> ResultRecord {
    let mut r = ResultRecord::new(
        ExperimentVariant::AttributeSelection,
        pair.name(),
        classifier.name(),
    );
    r.selector = fs.selector.name().to_string();
    r.att_sel_ratio = Some(fs.att_sel_ratio);
    r
}

/// Ranks attributes on the full training set, keeps the best share, and
/// classifies both sets projected onto them.
pub fn run_attribute_selection(
    pair: &DatasetPair,
    fs: &FSConfig,
    classifier: ClassifierKind,
    params: &ComponentParams,
) -> Result<ResultRecord> {
    let env = StepEnv {
        params,
        cache: None,
    };
    let pipeline = Pipeline::attribute_selection(*fs, classifier);
    strict(execute(
        pair,
        &pipeline,
        env,
        attribute_record(pair, fs, classifier),
    ))
}

fn instance_record(
    pair: &DatasetPair,
    is: &ISConfig,
    fs: &FSConfig,
    classifier: ClassifierKind,
) -> ResultRecord {
    let mut r = ResultRecord::new(
        ExperimentVariant::InstanceSelection,
        pair.name(),
        classifier.name(),
    );
    r.selector = fs.selector.name().to_string();
    r.is_method = is.method.name().to_string();
    r.k_neighbours = Some(is.k_neighbours);
    r.od_sel_ratio = Some(is.od_sel_ratio);
    r.od_desc_order = Some(is.od_desc_order);
    r.distance = Some(is.distance);
    r.att_sel_ratio = Some(fs.att_sel_ratio);
    r
}

/// Selects instances, ranks attributes on the selected instances only, then
/// classifies. The classifier sees the whole training set projected onto the
/// chosen attributes unless `train_on_selected_instances` is set.
pub fn run_instance_selection(
    pair: &DatasetPair,
    is: &ISConfig,
    fs: &FSConfig,
    classifier: ClassifierKind,
    params: &ComponentParams,
    train_on_selected_instances: bool,
) -> Result<ResultRecord> {
    let env = StepEnv {
        params,
        cache: None,
    };
    let pipeline = Pipeline::instance_selection(*is, *fs, classifier, train_on_selected_instances);
    strict(execute(
        pair,
        &pipeline,
        env,
        instance_record(pair, is, fs, classifier),
    ))
}

/// Every grid point for one (dataset, classifier, instance selector)
/// combination, in grid order. Failed points become error rows.
pub fn run_suite(
    pair: &DatasetPair,
    classifier: ClassifierKind,
    is_method: ISMethod,
    spec: &ExperimentGridSpec,
) -> Result<Vec<ResultRecord>> {
    let configs = enumerate_grid(spec)?;
    let params = spec.component_params();
    let cache = SuiteCache::new();
    let env = StepEnv {
        params: &params,
        cache: Some(&cache),
    };
    Ok(configs
        .par_iter()
        .map(|c| {
            let is = ISConfig {
                method: is_method,
                k_neighbours: c.k_neighbours,
                od_sel_ratio: c.od_sel_ratio,
                od_desc_order: c.od_desc_order,
                distance: c.distance,
            };
            let fs = FSConfig {
                selector: c.selector,
                att_sel_ratio: c.att_sel_ratio,
            };
            let pipeline =
                Pipeline::instance_selection(is, fs, classifier, spec.train_on_selected_instances);
            execute(
                pair,
                &pipeline,
                env,
                instance_record(pair, &is, &fs, classifier),
            )
            .0
        })
        .collect())
}

/// Every (attRatio, selector) point without instance selection.
pub fn run_attribute_suite(
    pair: &DatasetPair,
    classifier: ClassifierKind,
    spec: &ExperimentGridSpec,
) -> Result<Vec<ResultRecord>> {
    let configs = enumerate_attribute_grid(spec)?;
    let params = spec.component_params();
    let cache = SuiteCache::new();
    let env = StepEnv {
        params: &params,
        cache: Some(&cache),
    };
    Ok(configs
        .par_iter()
        .map(|&(att_sel_ratio, selector)| {
            let fs = FSConfig {
                selector,
                att_sel_ratio,
            };
            let pipeline = Pipeline::attribute_selection(fs, classifier);
            execute(
                pair,
                &pipeline,
                env,
                attribute_record(pair, &fs, classifier),
            )
            .0
        })
        .collect())
}

/// Runs `f` on a dedicated pool of `jobs` threads (0 picks the default).
pub fn run_in_pool<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| PipelineError::ThreadPool(e.to_string()))?;
    Ok(pool.install(f))
}

/// The record with the highest TP-rate; ties go to the earliest record.
pub fn best_record(records: &[ResultRecord]) -> Option<&ResultRecord> {
    records
        .iter()
        .filter(|r| r.metrics.is_some())
        .fold(None, |best: Option<&ResultRecord>, r| match best {
            Some(b) if b.tp_rate() >= r.tp_rate() => Some(b),
            _ => Some(r),
        })
}
