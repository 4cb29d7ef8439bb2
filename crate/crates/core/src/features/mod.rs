//! Raw-frequency document vectors over dictionary terms, and feature
//! selection (chi-squared, CFS).

mod cfs;
mod chi2;
mod io;

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Class, Corpus, DocId, Symbol};
use crate::ngram::Dictionary;
use crate::num::Real;

pub use cfs::{select_cfs, subset_merit, symmetrical_uncertainty, CFS_MAX_STALE};
pub use chi2::{chi2_scores, select_chi2, DEFAULT_CHI2_K};
pub use io::{companion_paths, read_features, write_features};

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("class {0} has no feature mass")]
    DegenerateClass(Class),
    #[error("need at least {need} features, have {have}")]
    TooFewFeatures { need: usize, have: usize },
    #[error("ordinal {ordinal} out of range for {num_features} features")]
    OrdinalOutOfRange { ordinal: usize, num_features: usize },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse { path: String, line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRow<F> {
    pub doc_id: DocId,
    pub label: Class,
    /// `(ordinal, value)` sorted by ordinal, values nonzero.
    pub values: Vec<(u32, F)>,
}

impl<F: Real> FeatureRow<F> {
    /// Value at `ordinal`, zero when absent.
    pub fn get(&self, ordinal: u32) -> F {
        self.values
            .binary_search_by_key(&ordinal, |&(o, _)| o)
            .map_or(F::zero(), |i| self.values[i].1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseFeatureMatrix<F> {
    pub rows: Vec<FeatureRow<F>>,
    pub num_features: usize,
    pub feature_names: Vec<String>,
}

impl<F: Real> SparseFeatureMatrix<F> {
    /// Checks row invariants (sorted, in-range, nonzero) and normalizes rows
    /// by dropping explicit zeros.
    pub fn new(mut rows: Vec<FeatureRow<F>>, feature_names: Vec<String>) -> Result<Self, FeatureError> {
        let num_features = feature_names.len();
        for r in &mut rows {
            r.values.retain(|&(_, v)| v != F::zero());
            let mut prev: Option<u32> = None;
            for &(o, _) in &r.values {
                if o as usize >= num_features || prev.is_some_and(|p| p >= o) {
                    return Err(FeatureError::OrdinalOutOfRange {
                        ordinal: o as usize,
                        num_features,
                    });
                }
                prev = Some(o);
            }
        }
        Ok(SparseFeatureMatrix {
            rows,
            num_features,
            feature_names,
        })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn labels(&self) -> Vec<Class> {
        self.rows.iter().map(|r| r.label).collect()
    }

    pub fn class_counts(&self) -> [usize; 2] {
        let mut c = [0; 2];
        for r in &self.rows {
            c[r.label.index()] += 1;
        }
        c
    }

    /// Rows at `indices`, in that order.
    pub fn select_rows(&self, indices: &[usize]) -> Self {
        SparseFeatureMatrix {
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
            num_features: self.num_features,
            feature_names: self.feature_names.clone(),
        }
    }

    /// Per-feature `(sum of values, rows with a nonzero value)`.
    pub fn column_totals(&self) -> Vec<(F, usize)> {
        let mut out = vec![(F::zero(), 0usize); self.num_features];
        for r in &self.rows {
            for &(o, v) in &r.values {
                let slot = &mut out[o as usize];
                slot.0 = slot.0 + v;
                slot.1 += 1;
            }
        }
        out
    }
}

/// Counts (possibly overlapping) occurrences of every dictionary term in
/// every document. Ordinals follow dictionary rank.
pub fn vectorize<F: Real>(corpus: &Corpus, dict: &Dictionary<F>) -> SparseFeatureMatrix<F> {
    // Every prefix of every term, mapped to the ordinal of the term it
    // completes (if any), so scans stop as soon as no term can match.
    let mut prefixes: HashMap<Vec<Symbol>, Option<u32>> = HashMap::new();
    'terms: for (ord, e) in dict.entries().iter().enumerate() {
        let mut syms = Vec::with_capacity(e.tokens.len());
        for t in &e.tokens {
            match corpus.symbol(t) {
                Some(s) => syms.push(s),
                None => continue 'terms,
            }
        }
        for len in 1..syms.len() {
            prefixes.entry(syms[..len].to_vec()).or_insert(None);
        }
        prefixes.insert(syms, Some(ord as u32));
    }
    let max_n = dict.max_n();

    let rows = (0..corpus.len())
        .map(|d| {
            let doc = &corpus.documents()[d];
            let syms = corpus.doc_symbols(d);
            let mut counts: BTreeMap<u32, u64> = BTreeMap::new();
            for start in 0..syms.len() {
                for end in start + 1..=(start + max_n).min(syms.len()) {
                    match prefixes.get(&syms[start..end]) {
                        None => break,
                        Some(Some(ord)) => *counts.entry(*ord).or_insert(0) += 1,
                        Some(None) => {}
                    }
                }
            }
            FeatureRow {
                doc_id: doc.doc_id.clone(),
                label: doc.label,
                values: counts
                    .into_iter()
                    .map(|(o, c)| (o, F::from_u64(c).expect("count representable")))
                    .collect(),
            }
        })
        .collect();

    SparseFeatureMatrix {
        rows,
        num_features: dict.len(),
        feature_names: dict.entries().iter().map(|e| e.phrase()).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SelectionMethod {
    Chi2,
    Cfs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult<F> {
    pub method: SelectionMethod,
    /// Ascending ordinals of retained features.
    pub kept: Vec<u32>,
    /// Per-feature score: chi-squared statistic, or for CFS the feature-class
    /// symmetrical uncertainty.
    pub scores: Vec<F>,
    /// CFS merit of the returned subset.
    pub merit: Option<F>,
}

/// Keeps the selected columns, renumbered densely in `kept` order.
pub fn apply_selection<F: Real>(
    m: &SparseFeatureMatrix<F>,
    s: &SelectionResult<F>,
) -> Result<SparseFeatureMatrix<F>, FeatureError> {
    let mut remap = vec![u32::MAX; m.num_features];
    for (new, &old) in s.kept.iter().enumerate() {
        let slot = remap.get_mut(old as usize).ok_or(FeatureError::OrdinalOutOfRange {
            ordinal: old as usize,
            num_features: m.num_features,
        })?;
        *slot = new as u32;
    }
    let rows = m
        .rows
        .iter()
        .map(|r| {
            let mut values: Vec<(u32, F)> = r
                .values
                .iter()
                .filter(|(o, _)| remap[*o as usize] != u32::MAX)
                .map(|&(o, v)| (remap[o as usize], v))
                .collect();
            values.sort_by_key(|&(o, _)| o);
            FeatureRow {
                doc_id: r.doc_id.clone(),
                label: r.label,
                values,
            }
        })
        .collect();
    Ok(SparseFeatureMatrix {
        rows,
        num_features: s.kept.len(),
        feature_names: s.kept.iter().map(|&o| m.feature_names[o as usize].clone()).collect(),
    })
}

#[cfg(test)]
pub(crate) mod test_util {
    use super::*;

    pub fn matrix(rows: &[(Class, &[(u32, f64)])], num_features: usize) -> SparseFeatureMatrix<f64> {
        SparseFeatureMatrix::new(
            rows.iter()
                .enumerate()
                .map(|(i, (label, vals))| FeatureRow {
                    doc_id: DocId::new("T", format!("T-{i}")),
                    label: *label,
                    values: vals.to_vec(),
                })
                .collect(),
            (0..num_features).map(|i| format!("f{i}")).collect(),
        )
        .unwrap()
    }
}
