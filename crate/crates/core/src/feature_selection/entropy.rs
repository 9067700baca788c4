//! Entropy-based merit measures over discrete attributes.
//!
//! Attributes and classes are both given as small integer codes; entropies
//! are in bits.

use super::{FeatureSelectionError, Result};

fn counts(codes: &[usize]) -> Vec<usize> {
    let size = codes.iter().copied().max().map_or(0, |m| m + 1);
    let mut c = vec![0usize; size];
    for &v in codes {
        c[v] += 1;
    }
    c
}

fn entropy_of_counts(counts: impl IntoIterator<Item = usize>, total: usize) -> f64 {
    let total = total as f64;
    counts
        .into_iter()
        .filter(|&c| c > 0)
        .map(|c| {
            let p = c as f64 / total;
            -p * p.log2()
        })
        .sum()
}

fn check_lengths(attr: &[usize], labels: &[usize]) -> Result<()> {
    if attr.len() != labels.len() {
        return Err(FeatureSelectionError::LengthMismatch(
            attr.len(),
            labels.len(),
        ));
    }
    if attr.is_empty() {
        return Err(FeatureSelectionError::EmptyInput);
    }
    Ok(())
}

/// Shannon entropy of a list of codes, with `0·log 0 = 0`.
pub fn entropy(labels: &[usize]) -> Result<f64> {
    if labels.is_empty() {
        return Err(FeatureSelectionError::EmptyInput);
    }
    Ok(entropy_of_counts(counts(labels), labels.len()))
}

/// `H(C | A)`.
pub fn conditional_entropy(attr: &[usize], labels: &[usize]) -> Result<f64> {
    check_lengths(attr, labels)?;
    let n_values = attr.iter().max().map_or(0, |m| m + 1);
    let n_classes = labels.iter().max().map_or(0, |m| m + 1);
    let mut table = vec![vec![0usize; n_classes]; n_values];
    for (&a, &c) in attr.iter().zip(labels) {
        table[a][c] += 1;
    }
    let n = attr.len() as f64;
    Ok(table
        .iter()
        .map(|row| {
            let size: usize = row.iter().sum();
            if size == 0 {
                0.0
            } else {
                size as f64 / n * entropy_of_counts(row.iter().copied(), size)
            }
        })
        .sum())
}

/// `H(C) − H(C | A)`, clamped at zero.
pub fn info_gain(attr: &[usize], labels: &[usize]) -> Result<f64> {
    check_lengths(attr, labels)?;
    let gain = entropy(labels)? - conditional_entropy(attr, labels)?;
    Ok(gain.max(0.0))
}

/// Information gain divided by the attribute's own entropy; 0 for a constant attribute.
pub fn gain_ratio(attr: &[usize], labels: &[usize]) -> Result<f64> {
    let gain = info_gain(attr, labels)?;
    let split_info = entropy(attr)?;
    Ok(if split_info > 0.0 {
        gain / split_info
    } else {
        0.0
    })
}

/// `2·IG / (H(C) + H(A))`.
pub fn symmetrical_uncertainty(attr: &[usize], labels: &[usize]) -> Result<f64> {
    let gain = info_gain(attr, labels)?;
    let denom = entropy(labels)? + entropy(attr)?;
    Ok(if denom > 0.0 {
        (2.0 * gain / denom).min(1.0)
    } else {
        0.0
    })
}
