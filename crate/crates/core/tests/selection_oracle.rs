mod common;

use bugidf::corpus::{Class, DocId};
use bugidf::features::{chi2_scores, select_cfs, select_chi2, subset_merit, FeatureRow, SparseFeatureMatrix};
use common::{exhaustive_cfs, random_binary_matrix};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn matrix(rows: &[(Class, &[(u32, f64)])], nf: usize) -> SparseFeatureMatrix<f64> {
    SparseFeatureMatrix::new(
        rows.iter()
            .enumerate()
            .map(|(i, (label, values))| FeatureRow {
                doc_id: DocId::new("F", i.to_string()),
                label: *label,
                values: values.to_vec(),
            })
            .collect(),
        (0..nf).map(|f| format!("f{f}")).collect(),
    )
    .unwrap()
}

/// Chi-squared from a dense table: rows are classes, columns are features.
fn dense_chi2(table: [&[f64]; 2]) -> Vec<f64> {
    let class_total: Vec<f64> = table.iter().map(|r| r.iter().sum()).collect();
    let total: f64 = class_total.iter().sum();
    (0..table[0].len())
        .map(|f| {
            let feat: f64 = table[0][f] + table[1][f];
            if feat == 0.0 {
                return 0.0;
            }
            (0..2)
                .map(|c| {
                    let e = feat * class_total[c] / total;
                    (table[c][f] - e).powi(2) / e
                })
                .sum()
        })
        .collect()
}

#[test]
fn chi2_hand_fixtures() {
    // BUG-only feature with balanced class mass: O = (10, 0), E = (5, 5).
    let m = matrix(&[(Class::Bug, &[(0, 10.0)]), (Class::NonBug, &[(1, 10.0)])], 2);
    let s = chi2_scores(&m).unwrap();
    assert!((s[0] - 10.0).abs() < 1e-9);

    // Class masses 12 and 6. Feature 0: O = (2, 4), E = (4, 2) -> 1 + 2 = 3.
    let m = matrix(
        &[
            (Class::Bug, &[(0, 2.0), (1, 10.0)]),
            (Class::NonBug, &[(0, 4.0), (1, 2.0)]),
        ],
        2,
    );
    let s = chi2_scores(&m).unwrap();
    assert!((s[0] - 3.0).abs() < 1e-9);
    // Feature 1: total 12, E = (8, 4), O = (10, 2): 4/8 + 4/4 = 1.5.
    assert!((s[1] - 1.5).abs() < 1e-9);
}

#[test]
fn chi2_matches_dense_computation() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..50 {
        let m = random_binary_matrix(&mut rng, 6);
        let mut table = [vec![0.0; 6], vec![0.0; 6]];
        for r in &m.rows {
            for &(f, v) in &r.values {
                table[r.label.index()][f as usize] += v;
            }
        }
        let Ok(scores) = chi2_scores(&m) else { continue };
        let expect = dense_chi2([&table[0], &table[1]]);
        for (a, b) in scores.iter().zip(&expect) {
            assert!((a - b).abs() < 1e-9);
        }
    }
}

#[test]
fn chi2_rank_invariant_under_duplication() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let m = random_binary_matrix(&mut rng, 6);
        let mut doubled = m.clone();
        doubled.rows.extend(m.rows.iter().cloned());
        let (Ok(a), Ok(b)) = (select_chi2(&m, 3), select_chi2(&doubled, 3)) else {
            continue;
        };
        assert_eq!(a.kept, b.kept);
    }
}

#[test]
fn cfs_matches_exhaustive_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for i in 0..150 {
        let m = random_binary_matrix(&mut rng, 6);
        let got = select_cfs(&m).unwrap();
        let (best, argmax) = exhaustive_cfs(&m);
        let merit = got.merit.unwrap();
        assert!(
            (merit - best).abs() < 1e-12,
            "instance {i}: cfs {merit} vs exhaustive {best}"
        );
        assert!(
            argmax.contains(&got.kept),
            "instance {i}: {:?} not among {:?}",
            got.kept,
            argmax
        );
        assert!((subset_merit(&m, &got.kept) - merit).abs() < 1e-12);
    }
}

#[test]
fn four_feature_known_instance() {
    // f0 copies the label, f1 copies f0, f2 is noise, f3 is the complement of f0.
    let rows: Vec<(Class, Vec<(u32, f64)>)> = (0..16)
        .map(|i| {
            let bug = i % 2 == 0;
            let mut v = Vec::new();
            if bug {
                v.push((0, 1.0));
                v.push((1, 1.0));
            }
            if i % 4 < 2 {
                v.push((2, 1.0));
            }
            if !bug {
                v.push((3, 1.0));
            }
            (if bug { Class::Bug } else { Class::NonBug }, v)
        })
        .collect();
    let refs: Vec<(Class, &[(u32, f64)])> = rows.iter().map(|(c, v)| (*c, v.as_slice())).collect();
    let m = matrix(&refs, 4);
    let got = select_cfs(&m).unwrap();
    let (best, argmax) = exhaustive_cfs(&m);
    assert!((got.merit.unwrap() - 1.0).abs() < 1e-12);
    assert!((best - 1.0).abs() < 1e-12);
    assert!(argmax.contains(&got.kept));
    assert!(!got.kept.contains(&2));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cfs_beats_every_singleton(seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_binary_matrix(&mut rng, 5);
        let got = select_cfs(&m).unwrap();
        let merit = got.merit.unwrap();
        for f in 0..5 {
            prop_assert!(merit >= subset_merit(&m, &[f]) - 1e-12);
        }
    }

    #[test]
    fn chi2_kept_sets_nest(seed: u64, k1 in 1usize..6, k2 in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_binary_matrix(&mut rng, 6);
        if let (Ok(a), Ok(b)) = (select_chi2(&m, k1.min(k2)), select_chi2(&m, k1.max(k2))) {
            prop_assert!(a.kept.iter().all(|f| b.kept.contains(f)));
        }
    }
}
