use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tsispipe::instance_selection::{
    kernel_ridge_predict, lkrr_iterative_removal, score_lkrr, Bandwidth, ISConfig, ISMethod,
    LkrrParams,
};
use tsispipe::neighbors::DistanceKind;
use tsispipe::{Split, TimeSeriesDataset};

fn dataset(rows: Vec<Vec<f64>>) -> TimeSeriesDataset {
    let n = rows.len();
    TimeSeriesDataset::from_rows("lkrr", Split::Train, rows, vec!["x".into(); n]).unwrap()
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
fn duplicate_instances_reconstruct_exactly_without_ridge() {
    let params = LkrrParams {
        ridge_gamma: 0.0,
        ..Default::default()
    };
    let ds = dataset(vec![
        vec![0.2, 1.0, -0.5],
        vec![0.2, 1.0, -0.5],
        vec![3.0, -2.0, 0.7],
        vec![1.5, 0.1, 2.2],
        vec![-1.0, 0.4, 0.9],
    ]);
    let (scores, breakdown) = score_lkrr(&ds, &cfg(1), &params).unwrap();
    assert_eq!(breakdown.re_matrix[0], vec![0.0; 3]);
    assert_eq!(breakdown.re_matrix[1], vec![0.0; 3]);
    assert_eq!(scores.scores[0], 0.0);
    assert_eq!(scores.scores[1], 0.0);
}

#[test]
fn single_pass_top_matches_first_iterative_removal() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let params = LkrrParams::default();
    for trial in 0..50 {
        let n = rng.gen_range(6..16);
        let m = rng.gen_range(1..5);
        let mut rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        // Plant one clear outlier at a random position.
        let planted = rng.gen_range(0..n);
        rows[planted].iter_mut().for_each(|v| *v += 8.0);
        let ds = dataset(rows);
        let k = rng.gen_range(1..4);
        let (scores, _) = score_lkrr(&ds, &cfg(k), &params).unwrap();
        let argmax = scores
            .scores
            .iter()
            .enumerate()
            .fold(
                (0, f64::NEG_INFINITY),
                |b, (i, &v)| if v > b.1 { (i, v) } else { b },
            )
            .0;
        let removed = lkrr_iterative_removal(&ds, 1, &cfg(k), &params).unwrap();
        assert_eq!(removed, vec![argmax], "trial {trial}");
    }
}

#[test]
fn far_point_is_the_top_outlier() {
    let ds = dataset(vec![
        vec![0.0],
        vec![1.0],
        vec![2.0],
        vec![3.0],
        vec![100.0],
    ]);
    let (scores, _) = score_lkrr(&ds, &cfg(2), &LkrrParams::default()).unwrap();
    assert!(scores.scores[4] > scores.scores[..4].iter().copied().fold(f64::MIN, f64::max));
    let kept = tsispipe::instance_selection::select_instances(&scores.scores, 0.2, true).unwrap();
    assert!(kept.contains(&4));
}

#[test]
fn two_point_ridge_matches_cramer() {
    let params = LkrrParams {
        bandwidth_sigma: Bandwidth::Fixed(1.0),
        ridge_gamma: 0.1,
        ..Default::default()
    };
    let got = kernel_ridge_predict(&[vec![0.0], vec![1.0]], &[1.0, 2.0], &[0.5], &params).unwrap();

    let k01 = (-0.5f64).exp();
    let (a, b, c, d) = (1.1, k01, k01, 1.1);
    let (y0, y1) = (1.0, 2.0);
    let det = a * d - b * c;
    let alpha0 = (y0 * d - b * y1) / det;
    let alpha1 = (a * y1 - c * y0) / det;
    let kq = (-0.125f64).exp();
    let cramer = kq * alpha0 + kq * alpha1;

    assert!((got - cramer).abs() < 1e-9);
    assert!((got - 1.5513877191046794).abs() < 1e-9);
}

#[test]
fn scores_ignore_labels_and_follow_row_permutation() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let rows: Vec<Vec<f64>> = (0..12)
        .map(|_| (0..3).map(|_| rng.gen_range(-2.0..2.0)).collect())
        .collect();
    let plain = dataset(rows.clone());
    let labelled = TimeSeriesDataset::from_rows(
        "l",
        Split::Train,
        rows.clone(),
        (0..12).map(|i| format!("{}", i % 2)).collect(),
    )
    .unwrap();
    let params = LkrrParams::default();
    let a = score_lkrr(&plain, &cfg(3), &params).unwrap().0.scores;
    let b = score_lkrr(&labelled, &cfg(3), &params).unwrap().0.scores;
    assert_eq!(a, b);

    let perm: Vec<usize> = (0..12).rev().collect();
    let shuffled = dataset(perm.iter().map(|&i| rows[i].clone()).collect());
    let c = score_lkrr(&shuffled, &cfg(3), &params).unwrap().0.scores;
    for (pos, &orig) in perm.iter().enumerate() {
        assert!((c[pos] - a[orig]).abs() <= 1e-9 * a[orig].abs().max(1.0));
    }
}
