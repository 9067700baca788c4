use serde::{Deserialize, Serialize};

use super::{PipelineError, Result};
use crate::classifiers::{ClassifierParams, DtwParams, RotationForestParams};
use crate::feature_selection::{Selector, SelectorParams};
use crate::instance_selection::LkrrParams;
use crate::neighbors::DistanceKind;

/// Parameter axes of an experimental suite plus the component settings
/// shared by every run in it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentGridSpec {
    pub k_neighbours: Vec<usize>,
    pub od_sel_ratios: Vec<f64>,
    pub od_desc_orders: Vec<bool>,
    pub distance_kinds: Vec<DistanceKind>,
    pub att_sel_ratios: Vec<f64>,
    pub selectors: Vec<Selector>,
    /// Overrides the seeds of the randomized components when set.
    pub seed: Option<u64>,
    /// Train the classifier on the selected instances instead of the whole
    /// (attribute-projected) training set.
    pub train_on_selected_instances: bool,
    pub lkrr: LkrrParams,
    pub selector_params: SelectorParams,
    pub rotation_forest: RotationForestParams,
    pub dtw: DtwParams,
}

impl Default for ExperimentGridSpec {
    fn default() -> Self {
        Self {
            k_neighbours: vec![1, 5, 10],
            od_sel_ratios: vec![0.0005, 0.05, 0.25, 0.5, 0.9],
            od_desc_orders: vec![true, false],
            distance_kinds: DistanceKind::all().to_vec(),
            att_sel_ratios: vec![0.002, 0.01, 0.1, 0.33, 0.66],
            selectors: Selector::all().to_vec(),
            seed: None,
            train_on_selected_instances: false,
            lkrr: LkrrParams::default(),
            selector_params: SelectorParams::default(),
            rotation_forest: RotationForestParams::default(),
            dtw: DtwParams::default(),
        }
    }
}

/// Component settings after applying the grid seed.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ComponentParams {
    pub lkrr: LkrrParams,
    pub selectors: SelectorParams,
    pub classifiers: ClassifierParams,
}

fn check_ratios(axis: &'static str, values: &[f64]) -> Result<()> {
    match values.iter().find(|r| !(**r > 0.0 && **r <= 1.0)) {
        Some(bad) => Err(PipelineError::InvalidAxisValue {
            axis,
            value: bad.to_string(),
        }),
        None => Ok(()),
    }
}

impl ExperimentGridSpec {
    pub fn validate(&self) -> Result<()> {
        let axes = [
            ("k_neighbours", self.k_neighbours.is_empty()),
            ("od_sel_ratios", self.od_sel_ratios.is_empty()),
            ("od_desc_orders", self.od_desc_orders.is_empty()),
            ("distance_kinds", self.distance_kinds.is_empty()),
            ("att_sel_ratios", self.att_sel_ratios.is_empty()),
            ("selectors", self.selectors.is_empty()),
        ];
        if let Some((axis, _)) = axes.iter().find(|(_, empty)| *empty) {
            return Err(PipelineError::EmptyAxis(axis));
        }
        if self.k_neighbours.contains(&0) {
            return Err(PipelineError::InvalidAxisValue {
                axis: "k_neighbours",
                value: "0".into(),
            });
        }
        check_ratios("od_sel_ratios", &self.od_sel_ratios)?;
        check_ratios("att_sel_ratios", &self.att_sel_ratios)
    }

    pub fn component_params(&self) -> ComponentParams {
        let mut params = ComponentParams {
            lkrr: self.lkrr,
            selectors: self.selector_params,
            classifiers: ClassifierParams {
                dtw: self.dtw,
                rotation_forest: self.rotation_forest,
            },
        };
        if let Some(seed) = self.seed {
            params.selectors.relieff.seed = seed;
            params.classifiers.rotation_forest.seed = seed;
        }
        params
    }
}

/// One point of the grid. `index` is its position in enumeration order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridConfig {
    pub index: usize,
    pub k_neighbours: usize,
    pub od_sel_ratio: f64,
    pub od_desc_order: bool,
    pub distance: DistanceKind,
    pub att_sel_ratio: f64,
    pub selector: Selector,
}

/// Full cross product, ordered by k, odRatio, order, distance, attRatio,
/// selector (the last axis varies fastest).
pub fn enumerate_grid(spec: &ExperimentGridSpec) -> Result<Vec<GridConfig>> {
    spec.validate()?;
    let mut out = Vec::new();
    for &k_neighbours in &spec.k_neighbours {
        for &od_sel_ratio in &spec.od_sel_ratios {
            for &od_desc_order in &spec.od_desc_orders {
                for &distance in &spec.distance_kinds {
                    for &att_sel_ratio in &spec.att_sel_ratios {
                        for &selector in &spec.selectors {
                            out.push(GridConfig {
                                index: out.len(),
                                k_neighbours,
                                od_sel_ratio,
                                od_desc_order,
                                distance,
                                att_sel_ratio,
                                selector,
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// The (attRatio, selector) sub-grid used by attribute-selection suites.
pub fn enumerate_attribute_grid(spec: &ExperimentGridSpec) -> Result<Vec<(f64, Selector)>> {
    spec.validate()?;
    Ok(spec
        .att_sel_ratios
        .iter()
        .flat_map(|&r| spec.selectors.iter().map(move |&s| (r, s)))
        .collect())
}
