use std::collections::HashMap;
use std::hash::Hash;
use std::sync::{Arc, Mutex};

use super::context::{ContextKey, ContextValue, PipelineContext};
use super::grid::ComponentParams;
use super::Result;
use crate::classifiers::{classify, evaluate, ClassifierKind};
use crate::feature_selection::{score_attributes, select_attributes, FSConfig, Selector};
use crate::instance_selection::{score_instances, select_instances, ISConfig, ISMethod};

/// Thread-safe memo table. Values are computed outside the lock, so two
/// threads may race on the same key; every computation here is
/// deterministic, so whichever result lands first is the one kept.
struct Memo<K, V> {
    map: Mutex<HashMap<K, V>>,
}

impl<K: Eq + Hash, V: Clone> Memo<K, V> {
    fn new() -> Self {
        Self {
            map: Mutex::new(HashMap::new()),
        }
    }

    fn get_or_try<E>(
        &self,
        key: K,
        f: impl FnOnce() -> std::result::Result<V, E>,
    ) -> std::result::Result<V, E> {
        if let Some(v) = self.map.lock().expect("memo lock").get(&key) {
            return Ok(v.clone());
        }
        let v = f()?;
        Ok(self
            .map
            .lock()
            .expect("memo lock")
            .entry(key)
            .or_insert(v)
            .clone())
    }

    fn len(&self) -> usize {
        self.map.lock().expect("memo lock").len()
    }
}

type InstanceKey = (ISMethod, usize, String);
type AttributeKey = (Selector, Option<Vec<usize>>);
type ClassifyKey = (ClassifierKind, Vec<usize>, Option<Vec<usize>>);

/// Shares intermediate results between the experiments of one suite, which
/// must all run on the same dataset pair and component parameters.
pub struct SuiteCache {
    instance_scores: Memo<InstanceKey, Arc<Vec<f64>>>,
    attribute_scores: Memo<AttributeKey, Arc<Vec<f64>>>,
    predictions: Memo<ClassifyKey, Arc<Vec<String>>>,
}

impl Default for SuiteCache {
    fn default() -> Self {
        Self::new()
    }
}

impl SuiteCache {
    pub fn new() -> Self {
        Self {
            instance_scores: Memo::new(),
            attribute_scores: Memo::new(),
            predictions: Memo::new(),
        }
    }

    /// Number of distinct classifier trainings performed so far.
    pub fn classifications(&self) -> usize {
        self.predictions.len()
    }
}

/// What a step may consult besides the context.
#[derive(Clone, Copy)]
pub struct StepEnv<'a> {
    pub params: &'a ComponentParams,
    pub cache: Option<&'a SuiteCache>,
}

fn memoized<K: Eq + Hash, V: Clone, E>(
    memo: Option<&Memo<K, V>>,
    key: impl FnOnce() -> K,
    f: impl FnOnce() -> std::result::Result<V, E>,
) -> std::result::Result<V, E> {
    match memo {
        Some(m) => m.get_or_try(key(), f),
        None => f(),
    }
}

pub trait PipelineStep: Send + Sync {
    fn name(&self) -> &'static str;
    fn run(&self, ctx: &mut PipelineContext, env: StepEnv<'_>) -> Result<()>;
}

/// Scores the training instances and keeps the configured share of them.
pub struct InstanceSelectionStep(pub ISConfig);

impl PipelineStep for InstanceSelectionStep {
    fn name(&self) -> &'static str {
        "instance-selection"
    }

    fn run(&self, ctx: &mut PipelineContext, env: StepEnv<'_>) -> Result<()> {
        let cfg = &self.0;
        cfg.validate()?;
        let train = ctx.dataset(ContextKey::TrainSet)?.clone();
        let scores = memoized(
            env.cache.map(|c| &c.instance_scores),
            || (cfg.method, cfg.k_neighbours, cfg.distance.to_string()),
            || score_instances(&train, cfg, &env.params.lkrr).map(|s| Arc::new(s.scores)),
        )?;
        let keep = select_instances(&scores, cfg.od_sel_ratio, cfg.od_desc_order)?;
        ctx.insert(ContextKey::InstanceScores, ContextValue::Scores(scores))?;
        ctx.insert(
            ContextKey::SelectedInstances,
            ContextValue::Indices(Arc::new(keep)),
        )?;
        Ok(())
    }
}

/// Ranks attributes on the training set, restricted to the selected
/// instances when an earlier step chose some.
pub struct AttributeSelectionStep(pub FSConfig);

impl PipelineStep for AttributeSelectionStep {
    fn name(&self) -> &'static str {
        "attribute-selection"
    }

    fn run(&self, ctx: &mut PipelineContext, env: StepEnv<'_>) -> Result<()> {
        let cfg = &self.0;
        cfg.validate()?;
        let train = ctx.dataset(ContextKey::TrainSet)?.clone();
        let instances = ctx
            .optional_indices(ContextKey::SelectedInstances)?
            .cloned();
        let scores = memoized(
            env.cache.map(|c| &c.attribute_scores),
            || (cfg.selector, instances.as_deref().cloned()),
            || -> Result<_> {
                let scored = match &instances {
                    Some(keep) => score_attributes(
                        &train.subset_instances(keep)?,
                        cfg.selector,
                        &env.params.selectors,
                    )?,
                    None => score_attributes(&train, cfg.selector, &env.params.selectors)?,
                };
                Ok(Arc::new(scored.scores))
            },
        )?;
        let ranked = crate::feature_selection::AttributeScores {
            selector: cfg.selector,
            scores: scores.to_vec(),
        };
        let keep = select_attributes(&ranked, cfg.att_sel_ratio)?;
        ctx.insert(ContextKey::AttributeScores, ContextValue::Scores(scores))?;
        ctx.insert(
            ContextKey::SelectedAttributes,
            ContextValue::Indices(Arc::new(keep)),
        )?;
        Ok(())
    }
}

/// Trains on the (projected) training set and labels the test set.
pub struct ClassificationStep {
    pub classifier: ClassifierKind,
    pub train_on_selected_instances: bool,
}

impl PipelineStep for ClassificationStep {
    fn name(&self) -> &'static str {
        "classification"
    }

    fn run(&self, ctx: &mut PipelineContext, env: StepEnv<'_>) -> Result<()> {
        let train = ctx.dataset(ContextKey::TrainSet)?.clone();
        let test = ctx.dataset(ContextKey::TestSet)?.clone();
        let attributes = match ctx.optional_indices(ContextKey::SelectedAttributes)? {
            Some(a) => {
                let mut a = a.to_vec();
                a.sort_unstable();
                a
            }
            None => (0..train.n_attributes()).collect(),
        };
        let instances = if self.train_on_selected_instances {
            ctx.optional_indices(ContextKey::SelectedInstances)?
                .map(|v| v.to_vec())
        } else {
            None
        };
        let predictions = memoized(
            env.cache.map(|c| &c.predictions),
            || (self.classifier, attributes.clone(), instances.clone()),
            || -> Result<_> {
                let mut tr = train.project_attributes(&attributes)?;
                if let Some(keep) = &instances {
                    tr = tr.subset_instances(keep)?;
                }
                let te = test.project_attributes(&attributes)?;
                Ok(Arc::new(classify(
                    self.classifier,
                    &tr,
                    &te,
                    &env.params.classifiers,
                )?))
            },
        )?;
        ctx.insert(ContextKey::Predictions, ContextValue::Labels(predictions))?;
        Ok(())
    }
}

/// Scores the predictions against the test labels.
pub struct EvaluationStep;

impl PipelineStep for EvaluationStep {
    fn name(&self) -> &'static str {
        "evaluation"
    }

    fn run(&self, ctx: &mut PipelineContext, _env: StepEnv<'_>) -> Result<()> {
        let train = ctx.dataset(ContextKey::TrainSet)?;
        let test = ctx.dataset(ContextKey::TestSet)?;
        let mut universe = train.source_universe().to_vec();
        for label in test.class_universe() {
            if !universe.contains(label) {
                universe.push(label.clone());
            }
        }
        let predictions = ctx.labels(ContextKey::Predictions)?;
        let (_, summary) = evaluate(test.labels(), predictions, &universe)?;
        ctx.insert(ContextKey::Evaluation, ContextValue::Evaluation(summary))?;
        Ok(())
    }
}

/// An ordered list of steps run against one context.
#[derive(Default)]
pub struct Pipeline {
    steps: Vec<Box<dyn PipelineStep>>,
}

impl Pipeline {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_step(mut self, step: impl PipelineStep + 'static) -> Self {
        self.steps.push(Box::new(step));
        self
    }

    pub fn step_names(&self) -> Vec<&'static str> {
        self.steps.iter().map(|s| s.name()).collect()
    }

    pub fn run(&self, ctx: &mut PipelineContext, env: StepEnv<'_>) -> Result<()> {
        self.steps.iter().try_for_each(|s| s.run(ctx, env))
    }

    pub fn classification(classifier: ClassifierKind) -> Self {
        Self::new()
            .with_step(ClassificationStep {
                classifier,
                train_on_selected_instances: false,
            })
            .with_step(EvaluationStep)
    }

    pub fn attribute_selection(fs: FSConfig, classifier: ClassifierKind) -> Self {
        Self::new()
            .with_step(AttributeSelectionStep(fs))
            .with_step(ClassificationStep {
                classifier,
                train_on_selected_instances: false,
            })
            .with_step(EvaluationStep)
    }

    pub fn instance_selection(
        is: ISConfig,
        fs: FSConfig,
        classifier: ClassifierKind,
        train_on_selected_instances: bool,
    ) -> Self {
        Self::new()
            .with_step(InstanceSelectionStep(is))
            .with_step(AttributeSelectionStep(fs))
            .with_step(ClassificationStep {
                classifier,
                train_on_selected_instances,
            })
            .with_step(EvaluationStep)
    }
}
