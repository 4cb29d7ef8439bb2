//! Evaluation harness: cross-validation, chronological split, F-measure,
//! repeated forest runs and the Mann-Whitney U test.

mod metrics;
mod report;
mod split;
mod stats;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classify::{ClassifierConfig, ClassifyError, Model};
use crate::corpus::{Class, DocId};
use crate::features::{apply_selection, select_cfs, select_chi2, FeatureError, SelectionResult, SparseFeatureMatrix};
use crate::num::Real;

pub use metrics::{evaluate, mean_metrics, ClassMetrics, EvalMetrics, PerClass};
pub use report::{emit_report, git_blob_sha1, write_distribution_csv, InputProvenance, Report, REPORT_FORMAT_VERSION};
pub use split::{chrono_split, kfold_split};
pub use stats::{mann_whitney, Summary, UTestResult};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("{pred} predictions for {truth} labels")]
    LengthMismatch { pred: usize, truth: usize },
    #[error("nothing to evaluate")]
    Empty,
    #[error("no timestamp for {0}")]
    MissingTimestamp(DocId),
    #[error("train fraction must lie strictly between 0 and 1, got {0}")]
    BadFraction(f64),
    #[error("cannot split {n} rows into {k} folds")]
    BadFolds { n: usize, k: usize },
    #[error("at least one run is required")]
    NoRuns,
    #[error("fold {fold}: {source}")]
    Fold {
        fold: usize,
        #[source]
        source: Box<EvalError>,
    },
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("report: {0}")]
    Json(#[from] serde_json::Error),
    #[error("distribution csv: {0}")]
    Csv(#[from] csv::Error),
}

/// Feature selection step of a pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "lowercase")]
pub enum Selection {
    None,
    Chi2 { k: usize },
    Cfs,
}

impl Selection {
    pub fn fit<F: Real>(&self, m: &SparseFeatureMatrix<F>) -> Result<Option<SelectionResult<F>>, FeatureError> {
        match *self {
            Selection::None => Ok(None),
            Selection::Chi2 { k } => select_chi2(m, k).map(Some),
            Selection::Cfs => select_cfs(m).map(Some),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig<F> {
    pub classifier: ClassifierConfig<F>,
    pub selection: Selection,
    /// Fit selection once on every row instead of on each training split.
    #[serde(default)]
    pub select_on_all: bool,
}

/// Selection (if any) and classifier fitted on one training set.
#[derive(Debug, Clone)]
pub struct FittedPipeline<F> {
    pub selection: Option<SelectionResult<F>>,
    pub model: Model<F>,
}

impl<F: Real> FittedPipeline<F> {
    pub fn fit(config: &PipelineConfig<F>, train: &SparseFeatureMatrix<F>) -> Result<Self, EvalError> {
        let selection = config.selection.fit(train)?;
        let model = match &selection {
            Some(s) => Model::train(&apply_selection(train, s)?, &config.classifier)?,
            None => Model::train(train, &config.classifier)?,
        };
        Ok(FittedPipeline { selection, model })
    }

    pub fn predict(&self, m: &SparseFeatureMatrix<F>) -> Result<Vec<Class>, EvalError> {
        Ok(match &self.selection {
            Some(s) => self.model.predict_all(&apply_selection(m, s)?),
            None => self.model.predict_all(m),
        })
    }
}

/// Applies a selection fitted on all rows when the config asks for it, and
/// returns the config that should be used from then on.
fn preselect<F: Real>(
    config: &PipelineConfig<F>,
    m: &SparseFeatureMatrix<F>,
) -> Result<(PipelineConfig<F>, Option<SparseFeatureMatrix<F>>), EvalError> {
    if !config.select_on_all {
        return Ok((*config, None));
    }
    let reduced = match config.selection.fit(m)? {
        Some(s) => Some(apply_selection(m, &s)?),
        None => None,
    };
    let rest = PipelineConfig {
        selection: Selection::None,
        select_on_all: false,
        ..*config
    };
    Ok((rest, reduced))
}

/// Trains on `train_idx`, evaluates on `test_idx`.
pub fn evaluate_split<F: Real>(
    config: &PipelineConfig<F>,
    m: &SparseFeatureMatrix<F>,
    train_idx: &[usize],
    test_idx: &[usize],
) -> Result<EvalMetrics<F>, EvalError> {
    let (config, reduced) = preselect(config, m)?;
    let m = reduced.as_ref().unwrap_or(m);
    let fitted = FittedPipeline::fit(&config, &m.select_rows(train_idx))?;
    let test = m.select_rows(test_idx);
    evaluate(&fitted.predict(&test)?, &test.labels())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvResult<F> {
    /// Unweighted mean of the fold metrics (confusion and supports summed).
    pub mean: EvalMetrics<F>,
    pub folds: Vec<EvalMetrics<F>>,
}

/// k-fold cross-validation. Each fold fits selection and classifier on the
/// other folds; folds run in parallel and are reported in fold order.
pub fn run_cv<F: Real>(
    config: &PipelineConfig<F>,
    m: &SparseFeatureMatrix<F>,
    k: usize,
    seed: u64,
) -> Result<CvResult<F>, EvalError> {
    let folds = kfold_split(m.len(), k, seed)?;
    let (config, reduced) = preselect(config, m)?;
    let m = reduced.as_ref().unwrap_or(m);
    let results: Vec<Result<EvalMetrics<F>, EvalError>> = (0..k)
        .into_par_iter()
        .map(|i| {
            let train: Vec<usize> = folds
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .flat_map(|(_, f)| f.iter().copied())
                .collect();
            evaluate_split(&config, m, &train, &folds[i]).map_err(|e| EvalError::Fold {
                fold: i,
                source: Box::new(e),
            })
        })
        .collect();
    let folds = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(CvResult {
        mean: mean_metrics(&folds),
        folds,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunRecord<F> {
    pub run: usize,
    pub seed: u64,
    pub weighted_f1: F,
    pub bug_f1: F,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunDistribution<F> {
    pub runs: Vec<RunRecord<F>>,
    /// Weighted F1 per run, in run order.
    pub values: Vec<F>,
    pub summary: Summary<F>,
    pub bug_f1_summary: Summary<F>,
}

impl<F: Real> RunDistribution<F> {
    pub fn from_runs(runs: Vec<RunRecord<F>>) -> Self {
        let values: Vec<F> = runs.iter().map(|r| r.weighted_f1).collect();
        let bug: Vec<F> = runs.iter().map(|r| r.bug_f1).collect();
        RunDistribution {
            summary: Summary::of(&values),
            bug_f1_summary: Summary::of(&bug),
            values,
            runs,
        }
    }
}

/// Seed of run `i`.
pub fn run_seed(master_seed: u64, run: usize) -> u64 {
    master_seed ^ run as u64
}

/// Repeats training on a fixed train/test split `runs` times with the
/// classifier reseeded per run (`master_seed ^ i`). Selection is fitted once
/// on the training split, since it does not depend on the seed.
pub fn multirun_forest<F: Real>(
    config: &PipelineConfig<F>,
    train: &SparseFeatureMatrix<F>,
    test: &SparseFeatureMatrix<F>,
    runs: usize,
    master_seed: u64,
) -> Result<RunDistribution<F>, EvalError> {
    if runs == 0 {
        return Err(EvalError::NoRuns);
    }
    let (train, test) = match config.selection.fit(train)? {
        Some(s) => (apply_selection(train, &s)?, apply_selection(test, &s)?),
        None => (train.clone(), test.clone()),
    };
    let truth = test.labels();
    let records = (0..runs)
        .into_par_iter()
        .map(|run| {
            let seed = run_seed(master_seed, run);
            let model = Model::train(&train, &config.classifier.with_seed(seed))?;
            let metrics = evaluate(&model.predict_all(&test), &truth)?;
            Ok(RunRecord {
                run,
                seed,
                weighted_f1: metrics.weighted_f1,
                bug_f1: metrics.bug_f1,
            })
        })
        .collect::<Result<Vec<_>, EvalError>>()?;
    Ok(RunDistribution::from_runs(records))
}
