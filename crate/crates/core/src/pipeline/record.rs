use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{PipelineError, Result};
use crate::classifiers::EvaluationSummary;
use crate::neighbors::DistanceKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ExperimentVariant {
    Classification,
    AttributeSelection,
    InstanceSelection,
}

impl ExperimentVariant {
    /// CSV header for this variant.
    pub fn columns(self) -> &'static [&'static str] {
        match self {
            ExperimentVariant::Classification => &[
                "dataset",
                "classifier",
                "tp_rate",
                "fp_rate",
                "precision",
                "recall",
                "f1",
                "wall_time_ms",
                "error",
            ],
            ExperimentVariant::AttributeSelection => &[
                "dataset",
                "classifier",
                "selector",
                "att_sel_ratio",
                "num_attributes_selected",
                "tp_rate",
                "fp_rate",
                "precision",
                "recall",
                "f1",
                "wall_time_ms",
                "error",
            ],
            ExperimentVariant::InstanceSelection => &[
                "dataset",
                "classifier",
                "selector",
                "is_method",
                "k_neighbours",
                "od_sel_ratio",
                "od_desc_order",
                "distance",
                "att_sel_ratio",
                "num_instances_selected",
                "num_attributes_selected",
                "tp_rate",
                "fp_rate",
                "precision",
                "recall",
                "f1",
                "wall_time_ms",
                "error",
            ],
        }
    }
}

/// One experiment: its parameters, selection counts and metrics.
/// Failed experiments carry `error` and no metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRecord {
    pub variant: ExperimentVariant,
    pub dataset: String,
    pub classifier: String,
    pub selector: String,
    pub is_method: String,
    pub k_neighbours: Option<usize>,
    pub od_sel_ratio: Option<f64>,
    pub od_desc_order: Option<bool>,
    pub distance: Option<DistanceKind>,
    pub att_sel_ratio: Option<f64>,
    pub num_instances_selected: Option<usize>,
    pub num_attributes_selected: Option<usize>,
    pub metrics: Option<EvaluationSummary>,
    pub wall_time_ms: f64,
    pub error: Option<String>,
}

impl ResultRecord {
    pub fn new(variant: ExperimentVariant, dataset: &str, classifier: &str) -> Self {
        Self {
            variant,
            dataset: dataset.to_string(),
            classifier: classifier.to_string(),
            selector: String::new(),
            is_method: String::new(),
            k_neighbours: None,
            od_sel_ratio: None,
            od_desc_order: None,
            distance: None,
            att_sel_ratio: None,
            num_instances_selected: None,
            num_attributes_selected: None,
            metrics: None,
            wall_time_ms: 0.0,
            error: None,
        }
    }

    pub fn tp_rate(&self) -> Option<f64> {
        self.metrics.map(|m| m.tp_rate)
    }

    /// Field values in the column order of [`ExperimentVariant::columns`].
    pub fn csv_fields(&self) -> Vec<String> {
        fn real(v: Option<f64>) -> String {
            v.map(|x| format!("{x:.6}")).unwrap_or_default()
        }
        fn count(v: Option<usize>) -> String {
            v.map(|x| x.to_string()).unwrap_or_default()
        }
        let m = self.metrics;
        let metrics = [
            real(m.map(|m| m.tp_rate)),
            real(m.map(|m| m.fp_rate)),
            real(m.map(|m| m.precision)),
            real(m.map(|m| m.recall)),
            real(m.map(|m| m.f1)),
            format!("{:.6}", self.wall_time_ms),
            self.error.clone().unwrap_or_default(),
        ];
        let mut out = vec![self.dataset.clone(), self.classifier.clone()];
        match self.variant {
            ExperimentVariant::Classification => {}
            ExperimentVariant::AttributeSelection => out.extend([
                self.selector.clone(),
                real(self.att_sel_ratio),
                count(self.num_attributes_selected),
            ]),
            ExperimentVariant::InstanceSelection => out.extend([
                self.selector.clone(),
                self.is_method.clone(),
                count(self.k_neighbours),
                real(self.od_sel_ratio),
                self.od_desc_order
                    .map(|b| b.to_string())
                    .unwrap_or_default(),
                self.distance.map(|d| d.to_string()).unwrap_or_default(),
                real(self.att_sel_ratio),
                count(self.num_instances_selected),
                count(self.num_attributes_selected),
            ]),
        }
        out.extend(metrics);
        out
    }
}

/// Writes a header plus one row per record. All records must share `variant`.
pub fn write_results<W: Write>(
    variant: ExperimentVariant,
    records: &[ResultRecord],
    out: W,
) -> Result<()> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    writer.write_record(variant.columns())?;
    for r in records {
        if r.variant != variant {
            return Err(PipelineError::MixedVariants);
        }
        writer.write_record(r.csv_fields())?;
    }
    writer.flush()?;
    Ok(())
}

pub fn write_results_csv(
    variant: ExperimentVariant,
    records: &[ResultRecord],
    path: &Path,
) -> Result<()> {
    let file = File::create(path).map_err(|e| PipelineError::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    write_results(variant, records, BufWriter::new(file))
}
