//! Bug vs. non-bug classification of issue-tracker reports using N-gram IDF
//! key terms.
//!
//! The pipeline runs `corpus` (ingest and tokenize) → `ngram` (enhanced
//! suffix array enumeration and weighting) → `features` (raw-frequency
//! vectors, chi-squared / CFS selection) → `classify` (logistic regression,
//! random forest) → `eval` (cross-validation, chronological split, F-measure,
//! Mann-Whitney U). `topics` provides the LDA baseline that feeds the same
//! classification path.
//!
//! Numeric code is generic over [`Real`] (`f32` or `f64`); the aliases below
//! fix the scalar to `f64`, which is what the CLI uses.

pub mod classify;
pub mod corpus;
pub mod eval;
pub mod features;
pub mod ngram;
pub mod num;
pub mod topics;

pub use corpus::{Class, Corpus, DocId, Document, LabelRecord};
pub use num::Real;

pub type NGramEntry = ngram::NGramEntry<f64>;
pub type Dictionary = ngram::Dictionary<f64>;
pub type FeatureMatrix = features::SparseFeatureMatrix<f64>;
pub type FeatureMatrix32 = features::SparseFeatureMatrix<f32>;
pub type SelectionResult = features::SelectionResult<f64>;
pub type LogisticModel = classify::LogisticModel<f64>;
pub type Forest = classify::Forest<f64>;
pub type DecisionTree = classify::DecisionTree<f64>;
pub type Model = classify::Model<f64>;
pub type LdaModel = topics::LdaModel<f64>;
pub type EvalMetrics = eval::EvalMetrics<f64>;
pub type RunDistribution = eval::RunDistribution<f64>;
