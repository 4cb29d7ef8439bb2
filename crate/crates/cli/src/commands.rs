use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{bail, Context, Result};
use serde::Serialize;

use bugidf::classify::{ClassifierConfig, ForestParams, LogisticParams, Model};
use bugidf::corpus::{
    build_corpus, cache_path, fetch_all, merge_corpora, parse_labels, read_cached_texts, FetchError, Fetcher,
};
use bugidf::eval::{
    chrono_split, emit_report, evaluate_split, mann_whitney, multirun_forest, run_cv, write_distribution_csv,
    EvalMetrics, InputProvenance, PipelineConfig, Report, Selection,
};
use bugidf::features::{
    apply_selection, read_features, select_cfs, select_chi2, vectorize, write_features, DEFAULT_CHI2_K,
};
use bugidf::ngram::{build_dictionary_with, read_dictionary, write_dictionary, DictionaryOptions};
use bugidf::topics::{membership_vectors, train_lda, LdaParams};
use bugidf::{Corpus, DocId, FeatureMatrix};

use crate::args::*;

/// A flag combination that parsed but makes no sense; exits with status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(UsageError(msg.into()).into())
}

fn load_corpus(args: &CorpusArgs) -> Result<Corpus> {
    let mut parts = Vec::with_capacity(args.labels.len());
    for path in &args.labels {
        let labels = parse_labels(path).with_context(|| format!("reading labels {}", path.display()))?;
        let texts = read_cached_texts(&labels, &args.cache_dir)?;
        parts.push(build_corpus(&labels, &texts).with_context(|| format!("building corpus from {}", path.display()))?);
    }
    let corpus = if parts.len() == 1 {
        parts.pop().expect("one part")
    } else {
        merge_corpora(&parts)?
    };
    if corpus.is_empty() {
        bail!("corpus is empty: the label files list no reports");
    }
    Ok(corpus)
}

fn load_timestamps(paths: &[PathBuf]) -> Result<HashMap<DocId, bugidf::corpus::Timestamp>> {
    let mut out = HashMap::new();
    for path in paths {
        let labels = parse_labels(path).with_context(|| format!("reading labels {}", path.display()))?;
        out.extend(
            labels
                .into_iter()
                .map(|l| (DocId::new(l.project, l.report_id), l.created_at)),
        );
    }
    Ok(out)
}

fn load_features(path: &Path) -> Result<FeatureMatrix> {
    read_features(path).with_context(|| format!("reading features {}", path.display()))
}

fn classifier_config(a: &ClassifierArgs) -> ClassifierConfig<f64> {
    match a.classifier {
        ClassifierArg::Logistic => ClassifierConfig::Logistic(LogisticParams {
            lambda: a.lambda,
            max_iter: a.max_iter,
            tol: a.tol,
        }),
        ClassifierArg::RandomForest => ClassifierConfig::RandomForest(ForestParams {
            n_trees: a.trees,
            mtry: a.mtry,
            seed: a.seed,
        }),
    }
}

fn selection(method: SelectionArg, k: Option<usize>) -> Result<Selection> {
    Ok(match (method, k) {
        (SelectionArg::Chi2, k) => Selection::Chi2 {
            k: k.unwrap_or(DEFAULT_CHI2_K),
        },
        (_, Some(_)) => return usage("--k only applies to --select chi2"),
        (SelectionArg::None, None) => Selection::None,
        (SelectionArg::Cfs, None) => Selection::Cfs,
    })
}

/// Config echo for reports: the resolved flags plus the global options.
fn echo<T: Serialize>(
    command: &str,
    args: &T,
    threads: Option<usize>,
    config: Option<&Path>,
) -> Result<serde_json::Value> {
    Ok(serde_json::json!({
        "command": command,
        "args": serde_json::to_value(args)?,
        "threads": threads,
        "config_file": config.map(|p| p.display().to_string()),
    }))
}

fn print_metrics(name: &str, m: &EvalMetrics<f64>) {
    println!("{name}");
    println!("  class     precision  recall  f1      support");
    for (label, c) in [("BUG", &m.per_class.bug), ("NONBUG", &m.per_class.nonbug)] {
        println!(
            "  {label:<8}  {:>9.4}  {:>6.4}  {:>6.4}  {:>7}",
            c.precision, c.recall, c.f1, c.support
        );
    }
    println!("  weighted f1 {:.4}  bug f1 {:.4}", m.weighted_f1, m.bug_f1);
}

pub fn fetch(a: &FetchArgs) -> Result<()> {
    let mut jobs = Vec::new();
    for path in &a.corpus.labels {
        let labels = parse_labels(path).with_context(|| format!("reading labels {}", path.display()))?;
        for l in labels {
            let dir = cache_path(&a.corpus.cache_dir, &l.project, &l.report_id)
                .parent()
                .expect("cache path has a parent")
                .to_path_buf();
            jobs.push((l.report_id, dir));
        }
    }
    let fetcher = Fetcher::new(&a.base_url)
        .with_retries(a.retries)
        .with_backoff(Duration::from_millis(a.backoff_ms));
    let results = fetch_all(&fetcher, &jobs, a.concurrency);

    let (mut fetched, mut cached) = (0, 0);
    let mut missing = Vec::new();
    let mut failed = Vec::new();
    for ((id, _), r) in jobs.iter().zip(results) {
        match r {
            Ok(o) if o.cached => cached += 1,
            Ok(_) => fetched += 1,
            Err(FetchError::NotFound(_)) => missing.push(id.clone()),
            Err(e) => failed.push(e),
        }
    }
    println!(
        "fetched {fetched}, cached {cached}, failed {}",
        missing.len() + failed.len()
    );
    for id in &missing {
        println!("missing {id}");
    }
    for e in &failed {
        eprintln!("error: {e}");
    }
    if !failed.is_empty() {
        bail!("{} report(s) could not be fetched", failed.len());
    }
    if !missing.is_empty() && !a.allow_missing {
        bail!(
            "{} report(s) not found; pass --allow-missing to continue without them",
            missing.len()
        );
    }
    Ok(())
}

pub fn extract(a: &ExtractArgs) -> Result<()> {
    if a.nmax == 0 {
        return usage("--nmax must be at least 1");
    }
    let corpus = load_corpus(&a.corpus)?;
    let opts = DictionaryOptions {
        nmax: a.nmax,
        prune: !a.no_prune,
        min_weight: a.min_weight,
    };
    let (dict, stats) = build_dictionary_with::<f64>(&corpus, &opts);
    println!("documents {}", corpus.len());
    println!("enumerated {}", stats.enumerated);
    println!("after df>=2 {}", stats.after_df_filter);
    println!("after pruning {}", stats.after_prune);
    println!("dictionary {}", stats.final_size);
    write_dictionary(&dict, &a.out).with_context(|| format!("writing {}", a.out.display()))?;
    Ok(())
}

pub fn features(a: &FeaturesArgs) -> Result<()> {
    let corpus = load_corpus(&a.corpus)?;
    let dict = read_dictionary::<f64>(&a.dict).with_context(|| format!("reading dictionary {}", a.dict.display()))?;
    let m = vectorize(&corpus, &dict);
    let nnz: usize = m.rows.iter().map(|r| r.values.len()).sum();
    println!("rows {} features {} nonzeros {nnz}", m.len(), m.num_features);
    write_features(&m, &a.out)?;
    Ok(())
}

pub fn topics(a: &TopicsArgs) -> Result<()> {
    let corpus = load_corpus(&a.corpus)?;
    eprintln!("seed {}", a.seed);
    let params = LdaParams {
        alpha: a.alpha.unwrap_or(50.0 / a.topics.max(1) as f64),
        beta: a.beta,
        iters: a.iters,
        seed: a.seed,
        ..LdaParams::new(a.topics)
    };
    let model = train_lda(&corpus, &params)?;
    if let Some(&(sweep, lj)) = model.log_joint.last() {
        println!("topics {} sweeps {sweep} log joint {lj:.3}", model.k);
    }
    write_features(&membership_vectors(&model), &a.out)?;
    Ok(())
}

pub fn select(a: &SelectArgs) -> Result<()> {
    let m = load_features(&a.features)?;
    let s = match (a.method, a.k) {
        (MethodArg::Chi2, k) => select_chi2(&m, k.unwrap_or(DEFAULT_CHI2_K))?,
        (MethodArg::Cfs, None) => select_cfs(&m)?,
        (MethodArg::Cfs, Some(_)) => return usage("--k only applies to --method chi2"),
    };
    print!("kept {} of {}", s.kept.len(), m.num_features);
    if let Some(merit) = s.merit {
        print!(" merit {merit:.6}");
    }
    println!();
    write_features(&apply_selection(&m, &s)?, &a.out)?;
    Ok(())
}

pub fn train(a: &TrainArgs) -> Result<()> {
    let m = load_features(&a.features)?;
    let config = classifier_config(&a.classifier);
    if a.classifier.classifier == ClassifierArg::RandomForest {
        eprintln!("seed {}", a.classifier.seed);
    }
    let model = Model::train(&m, &config)?;
    match &model {
        Model::Logistic(l) => println!("logistic iterations {} loss {:.6}", l.iterations, l.loss),
        Model::RandomForest(f) => println!("random forest trees {} mtry {}", f.trees.len(), f.mtry),
    }
    let truth = m.labels();
    let acc = model.predict_all(&m).iter().zip(&truth).filter(|(p, t)| p == t).count();
    println!("training accuracy {:.4}", acc as f64 / m.len().max(1) as f64);
    model
        .save(&a.out)
        .with_context(|| format!("writing {}", a.out.display()))?;
    Ok(())
}

pub fn eval(a: &EvalArgs, threads: Option<usize>, config_file: Option<&Path>) -> Result<()> {
    let method = a.selection.select.unwrap_or(match a.split {
        SplitArg::Cv => SelectionArg::Cfs,
        SplitArg::Chrono => SelectionArg::Chi2,
    });
    let sel = selection(method, a.selection.k)?;
    if a.selection.select_on_all && sel == Selection::None {
        return usage("--select-on-all needs --select chi2 or cfs");
    }
    match a.split {
        SplitArg::Cv if a.train_fraction.is_some() => return usage("--train-fraction only applies to --split chrono"),
        SplitArg::Chrono if a.folds.is_some() => return usage("--folds only applies to --split cv"),
        SplitArg::Chrono if a.labels.is_empty() => return usage("--split chrono needs --labels for creation times"),
        _ => {}
    }
    let m = load_features(&a.features)?;
    let config = PipelineConfig {
        classifier: classifier_config(&a.classifier),
        selection: sel,
        select_on_all: a.selection.select_on_all,
    };
    eprintln!("seed {}", a.classifier.seed);
    let (name, metrics) = match a.split {
        SplitArg::Cv => {
            let k = a.folds.unwrap_or(10);
            let cv = run_cv(&config, &m, k, a.classifier.seed)?;
            (format!("cv{k}"), cv.mean)
        }
        SplitArg::Chrono => {
            let ts = load_timestamps(&a.labels)?;
            let (train, test) = chrono_split(&m, &ts, a.train_fraction.unwrap_or(0.9))?;
            println!("train {} test {}", train.len(), test.len());
            ("chrono".to_string(), evaluate_split(&config, &m, &train, &test)?)
        }
    };
    print_metrics(&name, &metrics);
    if let Some(path) = &a.report {
        let mut report = Report::new(echo("eval", a, threads, config_file)?);
        report.inputs.push(InputProvenance::of_file(&a.features)?);
        report.metrics.insert(name, metrics);
        emit_report(&report, path)?;
    }
    Ok(())
}

pub fn compare(a: &CompareArgs, threads: Option<usize>, config_file: Option<&Path>) -> Result<()> {
    if a.runs == 0 {
        return usage("--runs must be at least 1");
    }
    let sel = selection(a.select, a.k)?;
    let ngram = load_features(&a.ngram_features)?;
    let topic = load_features(&a.topic_features)?;
    let ts = load_timestamps(&a.labels)?;
    eprintln!("seed {}", a.seed);

    let forest = ClassifierConfig::RandomForest(ForestParams {
        n_trees: a.trees,
        mtry: a.mtry,
        seed: a.seed,
    });
    let mut distributions = Vec::new();
    for (name, m, selection) in [("ngram", &ngram, sel), ("topic", &topic, Selection::None)] {
        let (train, test) = chrono_split(m, &ts, a.train_fraction)?;
        let config = PipelineConfig {
            classifier: forest,
            selection,
            select_on_all: false,
        };
        let d = multirun_forest(&config, &m.select_rows(&train), &m.select_rows(&test), a.runs, a.seed)
            .with_context(|| format!("{name} runs"))?;
        let s = d.summary;
        println!(
            "{name:<6} runs {}  min {:.4}  q1 {:.4}  median {:.4}  q3 {:.4}  max {:.4}  mean {:.4}",
            d.values.len(),
            s.min,
            s.q1,
            s.median,
            s.q3,
            s.max,
            s.mean
        );
        distributions.push((name, d));
    }
    let u = mann_whitney(&distributions[0].1.values, &distributions[1].1.values);
    println!("mann-whitney U {} z {:.4} p {:.3e}", u.u_statistic, u.z, u.p_two_sided);

    fs::create_dir_all(&a.out_dir).with_context(|| format!("creating {}", a.out_dir.display()))?;
    let mut report = Report::new(echo("compare", a, threads, config_file)?);
    report.inputs.push(InputProvenance::of_file(&a.ngram_features)?);
    report.inputs.push(InputProvenance::of_file(&a.topic_features)?);
    for (name, d) in &distributions {
        report.add_distribution(name, d);
        write_distribution_csv(d, &a.out_dir.join(format!("{name}_runs.csv")))?;
    }
    report.u_tests.insert("ngram_vs_topic".into(), u);
    emit_report(&report, &a.out_dir.join("report.json"))?;
    Ok(())
}
