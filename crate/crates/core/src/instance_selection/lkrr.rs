//! Local kernel ridge regression (LKRR) outlier scoring.
//!
//! Every instance has each of its feature values reconstructed from the same
//! feature of its k nearest neighbours by a kernel ridge regression fitted on
//! that neighbourhood alone. Reconstruction errors are normalized per feature
//! by a variance weighted with the mean squared neighbour distance `D_ii`, and
//! summed to the instance score `RE_i`. Boundary points reconstruct poorly, so
//! larger scores mean more outlying.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{ISConfig, ISMethod, InstanceScores, InstanceSelectionError, Result};
use crate::dataset::TimeSeriesDataset;
use crate::neighbors::{self, knn_among, squared_euclidean};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum KernelKind {
    /// `exp(-‖a−b‖² / (2σ²))`
    #[default]
    #[serde(alias = "rbf")]
    Rbf,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "BandwidthRepr", into = "BandwidthRepr")]
pub enum Bandwidth {
    Fixed(f64),
    /// Median of all pairwise Euclidean distances among the fitted points.
    #[default]
    MedianHeuristic,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum BandwidthRepr {
    Value(f64),
    Name(String),
}

impl TryFrom<BandwidthRepr> for Bandwidth {
    type Error = String;

    fn try_from(value: BandwidthRepr) -> std::result::Result<Self, Self::Error> {
        match value {
            BandwidthRepr::Value(v) if v.is_finite() && v > 0.0 => Ok(Bandwidth::Fixed(v)),
            BandwidthRepr::Value(v) => Err(format!("bandwidth must be positive, got {v}")),
            BandwidthRepr::Name(s) if s.eq_ignore_ascii_case("median") => {
                Ok(Bandwidth::MedianHeuristic)
            }
            BandwidthRepr::Name(s) => Err(format!("unknown bandwidth `{s}`")),
        }
    }
}

impl From<Bandwidth> for BandwidthRepr {
    fn from(value: Bandwidth) -> Self {
        match value {
            Bandwidth::Fixed(v) => BandwidthRepr::Value(v),
            Bandwidth::MedianHeuristic => BandwidthRepr::Name("median".into()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LkrrParams {
    pub kernel: KernelKind,
    pub bandwidth_sigma: Bandwidth,
    pub ridge_gamma: f64,
}

impl Default for LkrrParams {
    fn default() -> Self {
        Self {
            kernel: KernelKind::Rbf,
            bandwidth_sigma: Bandwidth::MedianHeuristic,
            ridge_gamma: 1e-3,
        }
    }
}

impl LkrrParams {
    pub fn validate(&self) -> Result<()> {
        if let Bandwidth::Fixed(s) = self.bandwidth_sigma {
            if !(s.is_finite() && s > 0.0) {
                return Err(InstanceSelectionError::InvalidParams(format!(
                    "bandwidth must be positive, got {s}"
                )));
            }
        }
        if !(self.ridge_gamma.is_finite() && self.ridge_gamma >= 0.0) {
            return Err(InstanceSelectionError::InvalidParams(format!(
                "ridge gamma must be non-negative, got {}",
                self.ridge_gamma
            )));
        }
        Ok(())
    }

    fn resolve_sigma<R: AsRef<[f64]>>(&self, points: &[R], active: &[usize]) -> f64 {
        match self.bandwidth_sigma {
            Bandwidth::Fixed(s) => s,
            Bandwidth::MedianHeuristic => median_pairwise_distance(points, active)
                .filter(|&m| m > 0.0)
                .unwrap_or(1.0),
        }
    }
}

impl fmt::Display for Bandwidth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bandwidth::Fixed(s) => write!(f, "{s}"),
            Bandwidth::MedianHeuristic => f.write_str("median"),
        }
    }
}

fn median_pairwise_distance<R: AsRef<[f64]>>(points: &[R], active: &[usize]) -> Option<f64> {
    let mut d = Vec::with_capacity(active.len() * active.len().saturating_sub(1) / 2);
    for (a, &i) in active.iter().enumerate() {
        for &j in &active[a + 1..] {
            d.push(squared_euclidean(points[i].as_ref(), points[j].as_ref()).sqrt());
        }
    }
    if d.is_empty() {
        return None;
    }
    let len = d.len();
    let mid = len / 2;
    let (lower, upper, _) = d.select_nth_unstable_by(mid, f64::total_cmp);
    let upper = *upper;
    if len % 2 == 1 {
        Some(upper)
    } else {
        let lower = lower.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Some(0.5 * (lower + upper))
    }
}

fn rbf(a: &[f64], b: &[f64], sigma: f64) -> f64 {
    (-squared_euclidean(a, b) / (2.0 * sigma * sigma)).exp()
}

/// Solves `(K + γI) w = k_x`. Predictions are then `wᵀy`, which equals
/// `k_xᵀ(K + γI)⁻¹y` because the system matrix is symmetric.
fn ridge_weights(gram: DMatrix<f64>, kx: &DVector<f64>, gamma: f64) -> Result<DVector<f64>> {
    let n = gram.nrows();
    let system = gram + DMatrix::<f64>::identity(n, n) * gamma;
    let finite = |w: &DVector<f64>| w.iter().all(|v| v.is_finite());
    if let Some(chol) = system.clone().cholesky() {
        let w = chol.solve(kx);
        if finite(&w) {
            return Ok(w);
        }
    }
    system
        .lu()
        .solve(kx)
        .filter(finite)
        .ok_or(InstanceSelectionError::SingularSystem)
}

fn gram_and_query(points: &[&[f64]], query: &[f64], sigma: f64) -> (DMatrix<f64>, DVector<f64>) {
    let n = points.len();
    let gram = DMatrix::from_fn(n, n, |r, c| {
        if r == c {
            1.0
        } else {
            rbf(points[r], points[c], sigma)
        }
    });
    let kx = DVector::from_fn(n, |r, _| rbf(query, points[r], sigma));
    (gram, kx)
}

/// Kernel ridge regression fitted on `(train_inputs, train_targets)` and
/// evaluated at `query`.
pub fn kernel_ridge_predict<R: AsRef<[f64]>>(
    train_inputs: &[R],
    train_targets: &[f64],
    query: &[f64],
    params: &LkrrParams,
) -> Result<f64> {
    params.validate()?;
    if train_inputs.is_empty() {
        return Err(InstanceSelectionError::DimensionMismatch(
            "no training points".into(),
        ));
    }
    if train_inputs.len() != train_targets.len() {
        return Err(InstanceSelectionError::DimensionMismatch(format!(
            "{} inputs but {} targets",
            train_inputs.len(),
            train_targets.len()
        )));
    }
    let inputs: Vec<&[f64]> = train_inputs.iter().map(AsRef::as_ref).collect();
    if let Some(bad) = inputs.iter().find(|x| x.len() != query.len()) {
        return Err(InstanceSelectionError::DimensionMismatch(format!(
            "input of length {} vs query of length {}",
            bad.len(),
            query.len()
        )));
    }
    let all: Vec<usize> = (0..inputs.len()).collect();
    let sigma = params.resolve_sigma(&inputs, &all);
    let (gram, kx) = gram_and_query(&inputs, query, sigma);
    let w = ridge_weights(gram, &kx, params.ridge_gamma)?;
    Ok(w.iter().zip(train_targets).map(|(a, y)| a * y).sum())
}

/// Every LKRR intermediate, rows in dataset order.
#[derive(Debug, Clone, PartialEq)]
pub struct LkrrBreakdown {
    /// Bandwidth actually used.
    pub sigma: f64,
    /// n × M squared reconstruction errors, row-major.
    pub re_matrix: Vec<Vec<f64>>,
    /// Mean squared Euclidean distance from each instance to its neighbours.
    pub d_diag: Vec<f64>,
    /// Per-feature means weighted by `d_diag`.
    pub mu: Vec<f64>,
    /// Per-feature variances weighted by `d_diag`.
    pub vw: Vec<f64>,
    /// Features whose weighted variance vanished; they contribute nothing to `re_total`.
    pub degenerate_features: Vec<usize>,
    pub re_total: Vec<f64>,
}

/// Relative size below which a weighted variance is treated as exactly zero.
const DEGENERATE_VARIANCE: f64 = 1e-12;

fn lkrr_breakdown(
    points: &[&[f64]],
    active: &[usize],
    cfg: &ISConfig,
    params: &LkrrParams,
) -> Result<LkrrBreakdown> {
    let n = active.len();
    neighbors::check_k(cfg.k_neighbours, n)?;
    if n < 2 {
        return Err(InstanceSelectionError::FewerThanTwoInstances(n));
    }
    let m = points[active[0]].len();
    let k = cfg.k_neighbours;
    let sigma = params.resolve_sigma(points, active);

    let mut re_matrix = Vec::with_capacity(n);
    let mut d_diag = Vec::with_capacity(n);
    for &i in active {
        let nbrs = knn_among(points, active, i, k, cfg.distance);
        let nbr_points: Vec<&[f64]> = nbrs.iter().map(|nb| points[nb.index]).collect();
        let (gram, kx) = gram_and_query(&nbr_points, points[i], sigma);
        let w = ridge_weights(gram, &kx, params.ridge_gamma)?;
        let re_row: Vec<f64> = (0..m)
            .map(|r| {
                let estimate: f64 = w.iter().zip(&nbr_points).map(|(a, x)| a * x[r]).sum();
                let e = estimate - points[i][r];
                e * e
            })
            .collect();
        re_matrix.push(re_row);
        let d = nbr_points
            .iter()
            .map(|x| squared_euclidean(points[i], x))
            .sum::<f64>()
            / nbr_points.len() as f64;
        d_diag.push(d);
    }

    let d_sum: f64 = d_diag.iter().sum();
    if d_sum <= 0.0 {
        return Err(InstanceSelectionError::DegenerateVariance);
    }
    let mut mu = vec![0.0; m];
    let mut vw = vec![0.0; m];
    let mut second_moment = vec![0.0; m];
    for (&i, &d) in active.iter().zip(&d_diag) {
        for r in 0..m {
            mu[r] += points[i][r] * d / d_sum;
        }
    }
    for (&i, &d) in active.iter().zip(&d_diag) {
        for r in 0..m {
            let x = points[i][r];
            vw[r] += (x - mu[r]) * (x - mu[r]) * d;
            second_moment[r] += x * x * d;
        }
    }
    let degenerate_features: Vec<usize> = (0..m)
        .filter(|&r| vw[r] <= DEGENERATE_VARIANCE * second_moment[r])
        .collect();
    if degenerate_features.len() == m {
        return Err(InstanceSelectionError::DegenerateVariance);
    }
    let mut usable = vec![true; m];
    for &r in &degenerate_features {
        usable[r] = false;
    }
    let re_total = re_matrix
        .iter()
        .map(|row| {
            row.iter()
                .zip(&vw)
                .zip(&usable)
                .filter(|(_, &ok)| ok)
                .map(|((re, v), _)| re / v)
                .sum()
        })
        .collect();

    Ok(LkrrBreakdown {
        sigma,
        re_matrix,
        d_diag,
        mu,
        vw,
        degenerate_features,
        re_total,
    })
}

/// Single-pass LKRR: one reconstruction error per instance. Labels are ignored.
pub fn score_lkrr(
    ds: &TimeSeriesDataset,
    cfg: &ISConfig,
    params: &LkrrParams,
) -> Result<(InstanceScores, LkrrBreakdown)> {
    cfg.validate()?;
    params.validate()?;
    let points: Vec<&[f64]> = ds.rows().collect();
    let active: Vec<usize> = (0..points.len()).collect();
    let breakdown = lkrr_breakdown(&points, &active, cfg, params)?;
    let scores = InstanceScores {
        method: ISMethod::Lkrr,
        scores: breakdown.re_total.clone(),
        config: *cfg,
    };
    Ok((scores, breakdown))
}

/// The original iterative procedure: remove the top-scoring instance `l`
/// times, refitting neighbourhoods and kernel on what remains. Returns the
/// removed indices in removal order.
pub fn lkrr_iterative_removal(
    ds: &TimeSeriesDataset,
    l: usize,
    cfg: &ISConfig,
    params: &LkrrParams,
) -> Result<Vec<usize>> {
    cfg.validate()?;
    params.validate()?;
    let n = ds.n_instances();
    if l == 0 || l + 2 > n {
        return Err(InstanceSelectionError::LTooLarge {
            l,
            max: n.saturating_sub(2),
        });
    }
    let points: Vec<&[f64]> = ds.rows().collect();
    let mut active: Vec<usize> = (0..n).collect();
    let mut removed = Vec::with_capacity(l);
    for _ in 0..l {
        let b = lkrr_breakdown(&points, &active, cfg, params)?;
        let (pos, _) =
            b.re_total
                .iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |best, (p, &v)| {
                    if v > best.1 {
                        (p, v)
                    } else {
                        best
                    }
                });
        removed.push(active.remove(pos));
    }
    Ok(removed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Split;
    use crate::neighbors::DistanceKind;

    fn one_d(values: &[f64]) -> TimeSeriesDataset {
        rows(values.iter().map(|&v| vec![v]).collect())
    }

    fn rows(rows: Vec<Vec<f64>>) -> TimeSeriesDataset {
        let n = rows.len();
        TimeSeriesDataset::from_rows("t", Split::Train, rows, vec!["c".into(); n]).unwrap()
    }

    fn cfg(k: usize) -> ISConfig {
        ISConfig {
            method: ISMethod::Lkrr,
            k_neighbours: k,
            od_sel_ratio: 1.0,
            od_desc_order: true,
            distance: DistanceKind::Euclidean,
        }
    }

    #[test]
    fn single_point_interpolates_without_ridge() {
        let p = LkrrParams {
            ridge_gamma: 0.0,
            ..Default::default()
        };
        let y = kernel_ridge_predict(&[vec![0.3, -1.0]], &[4.5], &[0.3, -1.0], &p).unwrap();
        assert!((y - 4.5).abs() < 1e-15);
    }

    #[test]
    fn heavy_ridge_shrinks_to_zero() {
        let p = LkrrParams {
            ridge_gamma: 1e9,
            bandwidth_sigma: Bandwidth::Fixed(1.0),
            ..Default::default()
        };
        let y = kernel_ridge_predict(&[vec![0.0], vec![1.0]], &[3.0, 7.0], &[0.5], &p).unwrap();
        assert!(y.abs() < 1e-8);
    }

    #[test]
    fn singular_system_without_ridge() {
        let p = LkrrParams {
            ridge_gamma: 0.0,
            bandwidth_sigma: Bandwidth::Fixed(1.0),
            ..Default::default()
        };
        let r = kernel_ridge_predict(&[vec![1.0], vec![1.0]], &[1.0, 2.0], &[0.0], &p);
        assert!(matches!(r, Err(InstanceSelectionError::SingularSystem)));
        let r = kernel_ridge_predict(&[vec![1.0]], &[1.0, 2.0], &[0.0], &p);
        assert!(matches!(
            r,
            Err(InstanceSelectionError::DimensionMismatch(_))
        ));
    }

    #[test]
    fn median_heuristic() {
        let pts: Vec<Vec<f64>> = [0.0, 1.0, 2.0, 3.0, 100.0]
            .iter()
            .map(|&v| vec![v])
            .collect();
        let all: Vec<usize> = (0..5).collect();
        assert_eq!(median_pairwise_distance(&pts, &all), Some(2.5));
        assert_eq!(median_pairwise_distance(&pts, &[0, 1, 4]), Some(99.0));
        assert_eq!(median_pairwise_distance(&pts, &[2]), None);
    }

    #[test]
    fn duplicate_neighbour_reconstructs_exactly() {
        let ds = rows(vec![
            vec![0.5, -0.25],
            vec![0.5, -0.25],
            vec![3.0, 1.0],
            vec![-2.0, 4.0],
        ]);
        let p = LkrrParams {
            ridge_gamma: 0.0,
            ..Default::default()
        };
        let (scores, b) = score_lkrr(&ds, &cfg(1), &p).unwrap();
        assert_eq!(scores.scores[0], 0.0);
        assert_eq!(scores.scores[1], 0.0);
        assert_eq!(b.re_matrix[0], vec![0.0, 0.0]);
        assert!(scores.scores[2] > 0.0 && scores.scores[3] > 0.0);
    }

    // Expected values come from an independent numpy transcription of the
    // scores: explicit matrix inverse, brute-force neighbours.
    #[test]
    fn five_point_line_matches_reference() {
        let ds = one_d(&[0.0, 1.0, 2.0, 3.0, 100.0]);
        let (scores, b) = score_lkrr(&ds, &cfg(2), &LkrrParams::default()).unwrap();
        assert_eq!(b.sigma, 2.5);
        assert_eq!(b.d_diag, vec![2.5, 1.0, 1.0, 2.5, 9506.5]);
        let expected = [
            6.6431893858076763e-09,
            7.0035570504751335e-08,
            2.8014228201900719e-07,
            2.9802765102648928e-06,
            1.4732416338454288e-01,
        ];
        for (got, want) in scores.scores.iter().zip(expected) {
            assert!((got - want).abs() <= 1e-9 * want, "{got} vs {want}");
        }
        assert!((b.mu[0] - 99.92752404477848).abs() < 1e-9);
        assert!((b.vw[0] - 67877.52782887475).abs() < 1e-6);
    }

    #[test]
    fn totals_are_normalized_sums() {
        let ds = rows(vec![
            vec![0.0, 1.0, 5.0],
            vec![0.5, 1.5, 4.0],
            vec![1.0, 0.0, 4.5],
            vec![3.0, 2.0, 6.0],
            vec![-1.0, 0.5, 3.0],
            vec![8.0, -4.0, 0.0],
        ]);
        let (_, b) = score_lkrr(&ds, &cfg(3), &LkrrParams::default()).unwrap();
        for (row, &total) in b.re_matrix.iter().zip(&b.re_total) {
            let sum: f64 = row.iter().zip(&b.vw).map(|(re, v)| re / v).sum();
            assert!((sum - total).abs() <= 1e-9 * total.abs().max(f64::MIN_POSITIVE));
            assert!(row.iter().all(|&re| re >= 0.0));
        }
        assert!(b.d_diag.iter().all(|&d| d >= 0.0));
    }

    #[test]
    fn constant_feature_is_dropped() {
        let base = [0.0, 1.0, 2.0, 3.0, 100.0, 4.5, -7.0];
        let plain = one_d(&base);
        let padded = rows(base.iter().map(|&v| vec![v, 42.0]).collect());
        let (a, _) = score_lkrr(&plain, &cfg(2), &LkrrParams::default()).unwrap();
        let (b, bd) = score_lkrr(&padded, &cfg(2), &LkrrParams::default()).unwrap();
        assert_eq!(bd.degenerate_features, vec![1]);
        assert_eq!(a.scores, b.scores);
    }

    #[test]
    fn all_identical_is_degenerate() {
        let ds = one_d(&[1.0, 1.0, 1.0]);
        let r = score_lkrr(&ds, &cfg(1), &LkrrParams::default());
        assert!(matches!(r, Err(InstanceSelectionError::DegenerateVariance)));
    }

    #[test]
    fn iterative_removal_takes_both_extremes_first() {
        let ds = one_d(&[0.0, 1.0, 2.0, 3.0, 100.0, -100.0]);
        let removed = lkrr_iterative_removal(&ds, 2, &cfg(2), &LkrrParams::default()).unwrap();
        assert_eq!(removed, vec![5, 4]);
        assert!(matches!(
            lkrr_iterative_removal(&ds, 5, &cfg(2), &LkrrParams::default()),
            Err(InstanceSelectionError::LTooLarge { l: 5, max: 4 })
        ));
    }

    #[test]
    fn k_too_large() {
        let ds = one_d(&[0.0, 1.0, 2.0]);
        assert!(score_lkrr(&ds, &cfg(3), &LkrrParams::default()).is_err());
    }
}
