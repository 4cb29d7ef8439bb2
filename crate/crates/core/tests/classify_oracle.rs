mod common;

use bugidf::classify::{
    gini, gradient, objective, predict_forest, train_forest, train_logistic, ClassifierConfig, ForestParams,
    LogisticParams, Model,
};
use bugidf::corpus::{Class, DocId};
use bugidf::eval::{multirun_forest, PipelineConfig, Selection};
use bugidf::features::{FeatureRow, SparseFeatureMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_matrix(rng: &mut ChaCha8Rng, n: usize, nf: usize) -> SparseFeatureMatrix<f64> {
    let rows = (0..n)
        .map(|i| FeatureRow {
            doc_id: DocId::new("R", format!("{i:03}")),
            label: if rng.gen_bool(0.5) { Class::Bug } else { Class::NonBug },
            values: (0..nf as u32)
                .filter_map(|f| {
                    if rng.gen_bool(0.4) {
                        Some((f, rng.gen_range(1..6) as f64))
                    } else {
                        None
                    }
                })
                .collect(),
        })
        .collect();
    SparseFeatureMatrix::new(rows, (0..nf).map(|f| format!("f{f}")).collect()).unwrap()
}

/// Rows where feature `f` is present in BUG rows only for `f < nf/2` and in
/// NONBUG rows only otherwise.
fn separable(rng: &mut ChaCha8Rng, n: usize, nf: usize) -> SparseFeatureMatrix<f64> {
    let half = nf as u32 / 2;
    let rows = (0..n)
        .map(|i| {
            let bug = i % 2 == 0;
            let range = if bug { 0..half } else { half..nf as u32 };
            let mut values: Vec<(u32, f64)> = range.clone().filter(|_| rng.gen_bool(0.5)).map(|f| (f, 1.0)).collect();
            if values.is_empty() {
                values.push((range.start, 2.0));
            }
            FeatureRow {
                doc_id: DocId::new("S", format!("{i:03}")),
                label: if bug { Class::Bug } else { Class::NonBug },
                values,
            }
        })
        .collect();
    SparseFeatureMatrix::new(rows, (0..nf).map(|f| format!("f{f}")).collect()).unwrap()
}

#[test]
fn gradient_matches_central_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for trial in 0..20 {
        let nf = rng.gen_range(1..12);
        let n = rng.gen_range(2..40);
        let m = random_matrix(&mut rng, n, nf);
        let w: Vec<f64> = (0..nf).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let b = rng.gen_range(-1.0..1.0);
        let lambda = [0.0, 1e-4, 0.1, 3.0][trial % 4];
        let (gw, gb) = gradient(&m, &w, b, lambda);
        let h = 1e-6;
        let mut numeric = Vec::with_capacity(nf + 1);
        for j in 0..nf {
            let (mut up, mut down) = (w.clone(), w.clone());
            up[j] += h;
            down[j] -= h;
            numeric.push((objective(&m, &up, b, lambda) - objective(&m, &down, b, lambda)) / (2.0 * h));
        }
        numeric.push((objective(&m, &w, b + h, lambda) - objective(&m, &w, b - h, lambda)) / (2.0 * h));
        let analytic: Vec<f64> = gw.iter().copied().chain([gb]).collect();
        let diff: f64 = analytic
            .iter()
            .zip(&numeric)
            .map(|(a, n)| (a - n).powi(2))
            .sum::<f64>()
            .sqrt();
        let scale: f64 = analytic.iter().map(|a| a * a).sum::<f64>().sqrt().max(1e-8);
        assert!(diff / scale < 1e-5, "trial {trial}: relative error {}", diff / scale);
    }
}

#[test]
fn separable_sets_are_learned_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10 {
        let (n, nf) = (rng.gen_range(6..60), rng.gen_range(2..10) * 2);
        let m = separable(&mut rng, n, nf);
        let truth = m.labels();
        let logistic = Model::Logistic(train_logistic(&m, &LogisticParams::default()).unwrap());
        assert_eq!(logistic.predict_all(&m), truth);
        let forest = Model::train(
            &m,
            &ClassifierConfig::RandomForest(ForestParams {
                n_trees: 25,
                ..ForestParams::default()
            }),
        )
        .unwrap();
        assert_eq!(forest.predict_all(&m), truth);
    }
}

#[test]
fn forest_identical_across_thread_counts() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let m = random_matrix(&mut rng, 120, 15);
    let params = ForestParams {
        n_trees: 40,
        mtry: None,
        seed: 9,
    };
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| {
                let f = train_forest(&m, &params).unwrap();
                let preds: Vec<(Class, u64)> = m
                    .rows
                    .iter()
                    .map(|r| {
                        let (c, p) = predict_forest(&f, &r.values);
                        (c, p.to_bits())
                    })
                    .collect();
                (f, preds)
            })
    };
    let (f1, p1) = run(1);
    for t in [2, 3, 8] {
        let (ft, pt) = run(t);
        assert_eq!(ft, f1);
        assert_eq!(pt, p1);
    }
}

#[test]
fn multirun_identical_across_thread_counts() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let m = random_matrix(&mut rng, 80, 10);
    let train = m.select_rows(&(0..60).collect::<Vec<_>>());
    let test = m.select_rows(&(60..80).collect::<Vec<_>>());
    let config = PipelineConfig {
        classifier: ClassifierConfig::RandomForest(ForestParams {
            n_trees: 10,
            ..ForestParams::default()
        }),
        selection: Selection::Chi2 { k: 5 },
        select_on_all: false,
    };
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| multirun_forest(&config, &train, &test, 12, 42).unwrap())
    };
    let one = run(1);
    assert_eq!(run(4), one);
    // Runs are not copies of each other.
    assert!(one.values.iter().any(|&v| v != one.values[0]) || one.runs.len() < 2);
}

#[test]
fn gini_fixture() {
    assert_eq!(gini::<f64>([3, 1]), 0.375);
    assert_eq!(gini::<f64>([2, 2]), 0.5);
    assert_eq!(gini::<f64>([4, 0]), 0.0);
}
