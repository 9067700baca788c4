use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tsispipe::feature_selection::{
    entropy, gain_ratio, info_gain, oner_score, relieff_scores, score_attributes,
    select_attributes, symmetrical_uncertainty, ReliefFParams, Selector, SelectorParams,
};
use tsispipe::{Split, TimeSeriesDataset};

fn dataset(rows: Vec<Vec<f64>>, labels: &[&str]) -> TimeSeriesDataset {
    TimeSeriesDataset::from_rows(
        "fs",
        Split::Train,
        rows,
        labels.iter().map(|s| s.to_string()).collect(),
    )
    .unwrap()
}

/// ReliefF transcribed loop by loop: full sort of all other instances,
/// first k of each class, prior-weighted misses.
fn relieff_literal(rows: &[Vec<f64>], classes: &[usize], k: usize) -> Vec<f64> {
    let n = rows.len();
    let m = rows[0].len();
    let n_classes = classes.iter().max().unwrap() + 1;
    let mut lo = vec![f64::INFINITY; m];
    let mut hi = vec![f64::NEG_INFINITY; m];
    for r in rows {
        for a in 0..m {
            lo[a] = lo[a].min(r[a]);
            hi[a] = hi[a].max(r[a]);
        }
    }
    let diff = |a: usize, i: usize, j: usize| {
        if hi[a] > lo[a] {
            (rows[i][a] - rows[j][a]).abs() / (hi[a] - lo[a])
        } else {
            0.0
        }
    };
    let prior = |c: usize| classes.iter().filter(|&&x| x == c).count() as f64 / n as f64;
    let mut w = vec![0.0; m];
    for i in 0..n {
        let mut others: Vec<(f64, usize)> = (0..n)
            .filter(|&j| j != i)
            .map(|j| ((0..m).map(|a| diff(a, i, j)).sum(), j))
            .collect();
        others.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap().then(x.1.cmp(&y.1)));
        for c in 0..n_classes {
            let near: Vec<usize> = others
                .iter()
                .filter(|&&(_, j)| classes[j] == c)
                .take(k)
                .map(|&(_, j)| j)
                .collect();
            if near.is_empty() {
                continue;
            }
            let found = near.len() as f64;
            for a in 0..m {
                let total: f64 = near.iter().map(|&j| diff(a, i, j)).sum();
                if c == classes[i] {
                    w[a] -= total / (n as f64 * found);
                } else {
                    w[a] += prior(c) / (1.0 - prior(classes[i])) * total / (n as f64 * found);
                }
            }
        }
    }
    w
}

#[test]
fn relieff_matches_literal_transcription() {
    // Continuous values, so no two neighbour distances tie.
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let rows: Vec<Vec<f64>> = (0..10)
        .map(|_| vec![rng.gen_range(0.0..1.0), rng.gen_range(0.0..5.0)])
        .collect();
    let labels = ["a", "a", "a", "b", "b", "a", "b", "c", "a", "b"];
    let classes: Vec<usize> = labels
        .iter()
        .map(|l| (l.as_bytes()[0] - b'a') as usize)
        .collect();
    let ds = dataset(rows.clone(), &labels);
    for k in [1, 2, 3, 10] {
        let params = ReliefFParams {
            k_hits_misses: k,
            ..Default::default()
        };
        let got = relieff_scores(&ds, &params).unwrap().scores;
        let want = relieff_literal(&rows, &classes, k);
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() < 1e-12, "k={k}: {got:?} vs {want:?}");
        }
    }
}

#[test]
fn relieff_duplicate_and_constant_columns() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let rows: Vec<Vec<f64>> = (0..20)
        .map(|i| {
            let x = rng.gen_range(0.0..1.0) + if i % 2 == 0 { 1.0 } else { 0.0 };
            vec![x, x, 7.0, rng.gen_range(0.0..1.0)]
        })
        .collect();
    let labels: Vec<&str> = (0..20)
        .map(|i| if i % 2 == 0 { "p" } else { "q" })
        .collect();
    let w = relieff_scores(&dataset(rows, &labels), &ReliefFParams::default())
        .unwrap()
        .scores;
    assert_eq!(w[0], w[1]);
    assert_eq!(w[2], 0.0);
    assert!(w[0] > w[3]);
}

/// Best training accuracy over every split of the sorted values into
/// contiguous buckets where each bucket but the last holds at least
/// `bucket_min` of its majority class and no equal values are separated.
fn oner_exhaustive(values: &[f64], labels: &[usize], bucket_min: usize) -> f64 {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap().then(a.cmp(&b)));
    let n_classes = labels.iter().max().unwrap() + 1;
    let mut best = 0usize;
    for mask in 0u32..(1 << (n - 1)) {
        let cut_ok =
            (0..n - 1).all(|p| mask & (1 << p) == 0 || values[order[p]] != values[order[p + 1]]);
        if !cut_ok {
            continue;
        }
        let mut correct = 0;
        let mut counts = vec![0usize; n_classes];
        let mut valid = true;
        for p in 0..n {
            counts[labels[order[p]]] += 1;
            let closes = p == n - 1 || mask & (1 << p) != 0;
            if closes {
                let top = *counts.iter().max().unwrap();
                if p != n - 1 && top < bucket_min {
                    valid = false;
                    break;
                }
                correct += top;
                counts.iter_mut().for_each(|c| *c = 0);
            }
        }
        if valid {
            best = best.max(correct);
        }
    }
    best as f64 / n as f64
}

#[test]
fn oner_twelve_point_interleaved() {
    let values: Vec<f64> = (1..=12).map(f64::from).collect();
    let labels = [0, 0, 0, 1, 0, 1, 1, 1, 0, 1, 1, 0];
    // Buckets: 000 | 10111 | 0110, right 3 + 4 + 2.
    let got = oner_score(&values, &labels, 3).unwrap();
    assert_eq!(got, 9.0 / 12.0);
    // Greedy bucketing is not optimal: 00010 | 111011 | 0 gets 10.
    assert_eq!(oner_exhaustive(&values, &labels, 3), 10.0 / 12.0);

    let separable = [0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1];
    assert_eq!(oner_score(&values, &separable, 3).unwrap(), 1.0);
    assert_eq!(oner_exhaustive(&values, &separable, 3), 1.0);
}

#[test]
fn oner_bounded_by_majority_and_exhaustive_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..200 {
        let n = rng.gen_range(1..=12);
        let values: Vec<f64> = (0..n).map(|_| f64::from(rng.gen_range(0..6))).collect();
        let labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..3)).collect();
        let bucket_min = rng.gen_range(1..5);
        let got = oner_score(&values, &labels, bucket_min).unwrap();
        let majority = (0..3)
            .map(|c| labels.iter().filter(|&&l| l == c).count())
            .max()
            .unwrap() as f64
            / n as f64;
        assert!(got >= majority - 1e-15);
        assert!(got <= oner_exhaustive(&values, &labels, bucket_min) + 1e-15);
    }
}

fn ranking(scores: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    idx
}

#[test]
fn every_selector_is_invariant_to_renaming_and_row_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let n = 30;
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let c = (i % 3) as f64;
            (0..6)
                .map(|a| rng.gen_range(0.0..1.0) + c * (a as f64) * 0.2)
                .collect()
        })
        .collect();
    let names = ["x", "y", "z"];
    let renamed = ["k", "l", "m"];
    let labels: Vec<&str> = (0..n).map(|i| names[i % 3]).collect();
    let labels2: Vec<&str> = (0..n).map(|i| renamed[i % 3]).collect();
    let perm: Vec<usize> = (0..n).map(|i| (i * 7) % n).collect();
    let ds = dataset(rows.clone(), &labels);
    let ds_renamed = dataset(rows.clone(), &labels2);
    let ds_perm = dataset(
        perm.iter().map(|&i| rows[i].clone()).collect(),
        &perm.iter().map(|&i| labels[i]).collect::<Vec<_>>(),
    );
    let params = SelectorParams::default();
    for s in Selector::all() {
        let base = score_attributes(&ds, s, &params).unwrap().scores;
        let other = score_attributes(&ds_renamed, s, &params).unwrap().scores;
        assert_eq!(base, other, "{s}");
        let permuted = score_attributes(&ds_perm, s, &params).unwrap().scores;
        for (a, b) in base.iter().zip(&permuted) {
            assert!((a - b).abs() < 1e-12, "{s}");
        }
        assert_eq!(ranking(&base), ranking(&permuted), "{s}");
        assert!(base.iter().all(|v| v.is_finite()));
        let all = select_attributes(&score_attributes(&ds, s, &params).unwrap(), 1.0).unwrap();
        assert_eq!(all.len(), 6);
    }
}

fn discrete(max: usize, len: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0..max, len)
}

proptest! {
    #[test]
    fn entropy_family_bounds(
        (attr, labels) in (1usize..40).prop_flat_map(|n| (discrete(5, n), discrete(3, n)))
    ) {
        let hc = entropy(&labels).unwrap();
        let ha = entropy(&attr).unwrap();
        let ig = info_gain(&attr, &labels).unwrap();
        prop_assert!(ig >= 0.0);
        prop_assert!(ig <= hc.min(ha) + 1e-12);
        let su = symmetrical_uncertainty(&attr, &labels).unwrap();
        prop_assert!((0.0..=1.0).contains(&su));
        let gr = gain_ratio(&attr, &labels).unwrap();
        if ha > 0.0 {
            prop_assert_eq!(gr, ig / ha);
        } else {
            prop_assert_eq!(gr, 0.0);
        }
    }
}
