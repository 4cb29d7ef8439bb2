use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::corpus::Class;
use crate::num::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics<F> {
    pub precision: F,
    pub recall: F,
    pub f1: F,
    pub support: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerClass<F> {
    #[serde(rename = "BUG")]
    pub bug: ClassMetrics<F>,
    #[serde(rename = "NONBUG")]
    pub nonbug: ClassMetrics<F>,
}

impl<F> PerClass<F> {
    pub fn get(&self, c: Class) -> &ClassMetrics<F> {
        match c {
            Class::Bug => &self.bug,
            Class::NonBug => &self.nonbug,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalMetrics<F> {
    pub per_class: PerClass<F>,
    /// Support-weighted mean of the per-class F1 scores.
    pub weighted_f1: F,
    pub bug_f1: F,
    /// `confusion[truth][predicted]`, indexed by [`Class::index`].
    pub confusion: [[usize; 2]; 2],
}

fn ratio<F: Real>(num: usize, den: usize) -> F {
    if den == 0 {
        F::zero()
    } else {
        F::from_count(num) / F::from_count(den)
    }
}

fn f1<F: Real>(p: F, r: F) -> F {
    if p + r == F::zero() {
        F::zero()
    } else {
        F::lit(2.0) * p * r / (p + r)
    }
}

/// Precision, recall and F1 per class from the confusion counts.
pub fn evaluate<F: Real>(pred: &[Class], truth: &[Class]) -> Result<EvalMetrics<F>, EvalError> {
    if pred.len() != truth.len() {
        return Err(EvalError::LengthMismatch {
            pred: pred.len(),
            truth: truth.len(),
        });
    }
    if pred.is_empty() {
        return Err(EvalError::Empty);
    }
    let mut confusion = [[0usize; 2]; 2];
    for (&p, &t) in pred.iter().zip(truth) {
        confusion[t.index()][p.index()] += 1;
    }
    let class = |c: Class| {
        let i = c.index();
        let tp = confusion[i][i];
        let predicted = confusion[0][i] + confusion[1][i];
        let support = confusion[i][0] + confusion[i][1];
        let precision = ratio(tp, predicted);
        let recall = ratio(tp, support);
        ClassMetrics {
            precision,
            recall,
            f1: f1(precision, recall),
            support,
        }
    };
    let per_class = PerClass {
        bug: class(Class::Bug),
        nonbug: class(Class::NonBug),
    };
    let n = F::from_count(pred.len());
    let weighted_f1 = Class::BOTH
        .iter()
        .map(|&c| {
            let m = per_class.get(c);
            F::from_count(m.support) / n * m.f1
        })
        .sum();
    Ok(EvalMetrics {
        per_class,
        weighted_f1,
        bug_f1: per_class.bug.f1,
        confusion,
    })
}

/// Unweighted mean of every rate across `folds`; supports and confusion
/// counts are summed.
pub fn mean_metrics<F: Real>(folds: &[EvalMetrics<F>]) -> EvalMetrics<F> {
    assert!(!folds.is_empty(), "mean of no folds");
    let n = F::from_count(folds.len());
    let mean = |get: &dyn Fn(&EvalMetrics<F>) -> F| folds.iter().map(get).sum::<F>() / n;
    let class = |c: Class| ClassMetrics {
        precision: mean(&|m| m.per_class.get(c).precision),
        recall: mean(&|m| m.per_class.get(c).recall),
        f1: mean(&|m| m.per_class.get(c).f1),
        support: folds.iter().map(|m| m.per_class.get(c).support).sum(),
    };
    let mut confusion = [[0; 2]; 2];
    for m in folds {
        for (row, fold_row) in confusion.iter_mut().zip(&m.confusion) {
            for (cell, n) in row.iter_mut().zip(fold_row) {
                *cell += n;
            }
        }
    }
    EvalMetrics {
        per_class: PerClass {
            bug: class(Class::Bug),
            nonbug: class(Class::NonBug),
        },
        weighted_f1: mean(&|m| m.weighted_f1),
        bug_f1: mean(&|m| m.bug_f1),
        confusion,
    }
}
