mod common;

use std::collections::HashMap;

use bugidf::corpus::{Class, DocId};
use bugidf::eval::{chrono_split, kfold_split, mann_whitney};
use bugidf::features::{FeatureRow, SparseFeatureMatrix};
use chrono::{Duration, TimeZone, Utc};
use common::exact_mann_whitney_p;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn fold_partition_laws() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..1000 {
        let k = rng.gen_range(2..=20);
        let n = rng.gen_range(k..=500);
        let seed = rng.gen();
        let folds = kfold_split(n, k, seed).unwrap();
        let mut seen = vec![false; n];
        for f in &folds {
            for &i in f {
                assert!(!seen[i]);
                seen[i] = true;
            }
        }
        assert!(seen.iter().all(|&s| s));
        let (lo, hi) = folds
            .iter()
            .fold((usize::MAX, 0), |(lo, hi), f| (lo.min(f.len()), hi.max(f.len())));
        assert!(hi - lo <= 1);
        assert_eq!(folds, kfold_split(n, k, seed).unwrap());
    }
}

#[test]
fn chrono_split_745() {
    let rows: Vec<FeatureRow<f64>> = (0..745)
        .map(|i| FeatureRow {
            doc_id: DocId::new("HTTPCLIENT", format!("HTTPCLIENT-{i}")),
            label: Class::Bug,
            values: vec![],
        })
        .collect();
    let m = SparseFeatureMatrix::new(rows, vec![]).unwrap();
    let base = Utc.with_ymd_and_hms(2005, 1, 1, 0, 0, 0).unwrap();
    let ts: HashMap<_, _> = m
        .rows
        .iter()
        .enumerate()
        .map(|(i, r)| (r.doc_id.clone(), base + Duration::hours(((i * 7919) % 745) as i64)))
        .collect();
    let (train, test) = chrono_split(&m, &ts, 0.9).unwrap();
    assert_eq!((train.len(), test.len()), (670, 75));
    let newest_train = train.iter().map(|&i| ts[&m.rows[i].doc_id]).max().unwrap();
    let oldest_test = test.iter().map(|&i| ts[&m.rows[i].doc_id]).min().unwrap();
    assert!(newest_train <= oldest_test);
}

#[test]
fn normal_approximation_tracks_exact_test_without_ties() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..2000 {
        let na = rng.gen_range(1..=7);
        let nb = rng.gen_range(1..=7);
        let mut pool: Vec<f64> = (0..na + nb).map(|i| i as f64).collect();
        pool.shuffle(&mut rng);
        let (a, b) = pool.split_at(na);
        let r = mann_whitney(a, b);
        let exact = exact_mann_whitney_p(a, b);
        assert!(
            (r.p_two_sided - exact).abs() <= 0.15,
            "{a:?} {b:?}: normal {} exact {exact}",
            r.p_two_sided
        );
    }
}

#[test]
fn exact_oracle_on_small_case() {
    assert!((exact_mann_whitney_p(&[1.0, 2.0], &[3.0, 4.0]) - 1.0 / 3.0).abs() < 1e-12);
    // Tied pools: the conditional distribution only takes two values here.
    assert_eq!(exact_mann_whitney_p(&[1.0, 1.0, 0.0], &[1.0, 1.0]), 1.0);
}

#[test]
fn u_symmetry_and_range() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..500 {
        let a: Vec<f64> = (0..rng.gen_range(1..30)).map(|_| rng.gen_range(0..10) as f64).collect();
        let b: Vec<f64> = (0..rng.gen_range(1..30)).map(|_| rng.gen_range(0..10) as f64).collect();
        let ab = mann_whitney(&a, &b);
        let ba = mann_whitney(&b, &a);
        let prod = (a.len() * b.len()) as f64;
        assert_eq!(ab.u_statistic + ba.u_statistic, prod);
        assert!((0.0..=prod).contains(&ab.u_statistic));
        assert!(ab.p_two_sided > 0.0 && ab.p_two_sided <= 1.0);
    }
    let tied = mann_whitney(&[3.0; 4], &[3.0; 6]);
    assert!(tied.all_tied);
    assert_eq!(tied.p_two_sided, 1.0);
}
