use super::{FeatureSelectionError, Result};

fn argmax_first(counts: &[usize]) -> usize {
    let mut best = 0;
    for (c, &v) in counts.iter().enumerate() {
        if v > counts[best] {
            best = c;
        }
    }
    best
}

/// Training accuracy of the one-attribute rule built over `values`.
///
/// Instances are sorted by value and swept into buckets. A bucket closes once
/// some class holds `bucket_min` members, after absorbing any following
/// instances of its majority class and any instances sharing the last value.
/// Each bucket predicts its majority class.
pub fn oner_score(values: &[f64], labels: &[usize], bucket_min: usize) -> Result<f64> {
    if values.len() != labels.len() {
        return Err(FeatureSelectionError::LengthMismatch(
            values.len(),
            labels.len(),
        ));
    }
    if values.is_empty() {
        return Err(FeatureSelectionError::EmptyInput);
    }
    let bucket_min = bucket_min.max(1);
    let n = values.len();
    let n_classes = labels.iter().max().map_or(0, |m| m + 1);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));

    let mut correct = 0usize;
    let mut it = 0;
    while it < n {
        let mut counts = vec![0usize; n_classes];
        loop {
            counts[labels[order[it]]] += 1;
            it += 1;
            if it >= n || counts.iter().copied().max().unwrap_or(0) >= bucket_min {
                break;
            }
        }
        let majority = argmax_first(&counts);
        while it < n && labels[order[it]] == majority {
            counts[majority] += 1;
            it += 1;
        }
        while it < n && values[order[it]] == values[order[it - 1]] {
            counts[labels[order[it]]] += 1;
            it += 1;
        }
        correct += counts.iter().copied().max().unwrap_or(0);
    }
    Ok(correct as f64 / n as f64)
}
