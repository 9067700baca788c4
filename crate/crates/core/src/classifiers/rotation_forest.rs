//! Rotation Forest: each tree is grown on data rotated by a block-diagonal
//! matrix of PCA loadings, one block per random attribute subset.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tree::DecisionTree;
use super::{ClassifierError, Result};
use crate::dataset::TimeSeriesDataset;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RotationForestParams {
    pub num_trees: usize,
    pub feature_subset_size: usize,
    /// Size of the per-subset resample used for PCA, as a fraction of the training set.
    pub bootstrap_fraction: f64,
    pub min_leaf: usize,
    pub seed: u64,
}

impl Default for RotationForestParams {
    fn default() -> Self {
        Self {
            num_trees: 10,
            feature_subset_size: 3,
            bootstrap_fraction: 0.75,
            min_leaf: 2,
            seed: 1,
        }
    }
}

/// PCA loadings for one attribute subset; `axes[c]` is component `c`.
#[derive(Debug, Clone, PartialEq)]
struct Block {
    attributes: Vec<usize>,
    axes: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
struct RotatedTree {
    blocks: Vec<Block>,
    tree: DecisionTree,
}

fn rotate(blocks: &[Block], x: &[f64]) -> Vec<f64> {
    blocks
        .iter()
        .flat_map(|b| {
            b.axes
                .iter()
                .map(|axis| b.attributes.iter().zip(axis).map(|(&a, w)| x[a] * w).sum())
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RotationForest {
    class_universe: Vec<String>,
    n_attributes: usize,
    trees: Vec<RotatedTree>,
}

fn principal_axes(sample: &[&[f64]], attributes: &[usize]) -> Vec<Vec<f64>> {
    let d = attributes.len();
    let s = sample.len() as f64;
    let mut mean = vec![0.0; d];
    for x in sample {
        for (k, &a) in attributes.iter().enumerate() {
            mean[k] += x[a] / s;
        }
    }
    let mut cov = DMatrix::<f64>::zeros(d, d);
    for x in sample {
        for r in 0..d {
            let xr = x[attributes[r]] - mean[r];
            for c in 0..d {
                cov[(r, c)] += xr * (x[attributes[c]] - mean[c]);
            }
        }
    }
    cov /= (s - 1.0).max(1.0);
    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .total_cmp(&eig.eigenvalues[a])
            .then(a.cmp(&b))
    });
    order
        .into_iter()
        .map(|c| {
            let mut axis: Vec<f64> = eig.eigenvectors.column(c).iter().copied().collect();
            // Fix the sign so the largest-magnitude loading is positive.
            let pivot = axis
                .iter()
                .copied()
                .fold(0.0f64, |m, v| if v.abs() > m.abs() { v } else { m });
            if pivot < 0.0 {
                axis.iter_mut().for_each(|v| *v = -*v);
            }
            axis
        })
        .collect()
}

fn grow_tree(
    rows: &[&[f64]],
    labels: &[usize],
    n_classes: usize,
    params: &RotationForestParams,
    tree_index: usize,
) -> RotatedTree {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    rng.set_stream(tree_index as u64);
    let n = rows.len();
    let m = rows[0].len();

    let mut attributes: Vec<usize> = (0..m).collect();
    attributes.shuffle(&mut rng);
    let sample_size = ((params.bootstrap_fraction * n as f64).round() as usize).max(2);
    let blocks: Vec<Block> = attributes
        .chunks(params.feature_subset_size)
        .map(|subset| {
            let sample: Vec<&[f64]> = (0..sample_size)
                .map(|_| rows[rng.gen_range(0..n)])
                .collect();
            Block {
                attributes: subset.to_vec(),
                axes: principal_axes(&sample, subset),
            }
        })
        .collect();

    let projected: Vec<Vec<f64>> = rows.iter().map(|x| rotate(&blocks, x)).collect();
    RotatedTree {
        tree: DecisionTree::fit(&projected, labels, n_classes, params.min_leaf),
        blocks,
    }
}

pub fn train_rotation_forest(
    train: &TimeSeriesDataset,
    params: &RotationForestParams,
) -> Result<RotationForest> {
    if params.num_trees == 0 || params.feature_subset_size == 0 {
        return Err(ClassifierError::InvalidParams(
            "num_trees and feature_subset_size must be positive".into(),
        ));
    }
    if !(params.bootstrap_fraction > 0.0 && params.bootstrap_fraction <= 1.0) {
        return Err(ClassifierError::InvalidParams(format!(
            "bootstrap fraction must be in (0, 1], got {}",
            params.bootstrap_fraction
        )));
    }
    if train.class_universe().len() < 2 {
        return Err(ClassifierError::SingleClassTraining);
    }
    let m = train.n_attributes();
    if params.feature_subset_size > m {
        return Err(ClassifierError::SubsetTooLarge {
            subset: params.feature_subset_size,
            attributes: m,
        });
    }
    let rows: Vec<&[f64]> = train.rows().collect();
    let labels = train.class_indices();
    let n_classes = train.class_universe().len();
    let trees = (0..params.num_trees)
        .into_par_iter()
        .map(|t| grow_tree(&rows, &labels, n_classes, params, t))
        .collect();
    Ok(RotationForest {
        class_universe: train.class_universe().to_vec(),
        n_attributes: m,
        trees,
    })
}

impl RotationForest {
    /// Majority vote over the trees, ties to the first label in class order.
    pub fn predict_row(&self, x: &[f64]) -> &str {
        let mut votes = vec![0usize; self.class_universe.len()];
        for t in &self.trees {
            votes[t.tree.predict(&rotate(&t.blocks, x))] += 1;
        }
        let mut best = 0;
        for (c, &v) in votes.iter().enumerate() {
            if v > votes[best] {
                best = c;
            }
        }
        &self.class_universe[best]
    }
}

pub fn predict_rotation_forest(
    model: &RotationForest,
    test: &TimeSeriesDataset,
) -> Result<Vec<String>> {
    if test.n_attributes() != model.n_attributes {
        return Err(ClassifierError::WidthMismatch {
            train: model.n_attributes,
            test: test.n_attributes(),
        });
    }
    let rows: Vec<&[f64]> = test.rows().collect();
    Ok(rows
        .par_iter()
        .map(|x| model.predict_row(x).to_string())
        .collect())
}
