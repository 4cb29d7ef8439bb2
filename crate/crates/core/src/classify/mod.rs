//! Binary classifiers over sparse feature rows.

mod forest;
mod logistic;

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::Class;
use crate::features::SparseFeatureMatrix;
use crate::num::Real;

pub use forest::{default_mtry, gini, predict_forest, train_forest, DecisionTree, Forest, ForestParams, Node};
pub use logistic::{gradient, objective, predict_logistic, sigmoid, train_logistic, LogisticModel, LogisticParams};

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ClassifyError {
    #[error("training data contains only class {0}")]
    SingleClass(Class),
    #[error("training data is empty")]
    Empty,
    #[error("model file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("model file: {0}")]
    Io(#[from] std::io::Error),
    #[error("unsupported model format version {0}")]
    Version(u32),
}

pub(crate) fn require_both_classes<F: Real>(m: &SparseFeatureMatrix<F>) -> Result<(), ClassifyError> {
    match m.class_counts() {
        [0, 0] => Err(ClassifyError::Empty),
        [0, _] => Err(ClassifyError::SingleClass(Class::Bug)),
        [_, 0] => Err(ClassifyError::SingleClass(Class::NonBug)),
        _ => Ok(()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "classifier", rename_all = "snake_case")]
pub enum ClassifierConfig<F> {
    Logistic(LogisticParams<F>),
    RandomForest(ForestParams),
}

impl<F: Real> ClassifierConfig<F> {
    /// Same configuration with the forest seed replaced (no-op for logistic).
    pub fn with_seed(self, seed: u64) -> Self {
        match self {
            ClassifierConfig::RandomForest(p) => ClassifierConfig::RandomForest(ForestParams { seed, ..p }),
            other => other,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model_type", rename_all = "snake_case")]
pub enum Model<F> {
    Logistic(LogisticModel<F>),
    RandomForest(Forest<F>),
}

#[derive(Serialize, Deserialize)]
struct ModelFile<F> {
    format_version: u32,
    #[serde(flatten)]
    model: Model<F>,
}

impl<F: Real> Model<F> {
    pub fn train(m: &SparseFeatureMatrix<F>, config: &ClassifierConfig<F>) -> Result<Self, ClassifyError> {
        Ok(match config {
            ClassifierConfig::Logistic(p) => Model::Logistic(train_logistic(m, p)?),
            ClassifierConfig::RandomForest(p) => Model::RandomForest(train_forest(m, p)?),
        })
    }

    /// Predicted class and BUG score (probability or vote fraction).
    pub fn predict(&self, row: &[(u32, F)]) -> (Class, F) {
        match self {
            Model::Logistic(m) => predict_logistic(m, row),
            Model::RandomForest(f) => predict_forest(f, row),
        }
    }

    pub fn predict_all(&self, m: &SparseFeatureMatrix<F>) -> Vec<Class> {
        m.rows.iter().map(|r| self.predict(&r.values).0).collect()
    }

    pub fn to_json(&self) -> Result<String, ClassifyError> {
        Ok(serde_json::to_string_pretty(&ModelFile {
            format_version: MODEL_FORMAT_VERSION,
            model: self.clone(),
        })?)
    }

    pub fn from_json(s: &str) -> Result<Self, ClassifyError> {
        #[derive(Deserialize)]
        struct Version {
            format_version: u32,
        }
        let v: Version = serde_json::from_str(s)?;
        if v.format_version != MODEL_FORMAT_VERSION {
            return Err(ClassifyError::Version(v.format_version));
        }
        let file: ModelFile<F> = serde_json::from_str(s)?;
        Ok(file.model)
    }

    pub fn save(&self, path: &Path) -> Result<(), ClassifyError> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, ClassifyError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}
