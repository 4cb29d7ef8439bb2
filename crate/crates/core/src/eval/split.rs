use std::collections::HashMap;

use chrono::{DateTime, Utc};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::EvalError;
use crate::corpus::DocId;
use crate::features::SparseFeatureMatrix;

/// Random partition of `0..n` into `k` folds. The first `n % k` folds hold
/// one extra index; each fold is sorted ascending.
pub fn kfold_split(n: usize, k: usize, seed: u64) -> Result<Vec<Vec<usize>>, EvalError> {
    if k < 2 || n < k {
        return Err(EvalError::BadFolds { n, k });
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let (base, extra) = (n / k, n % k);
    let mut folds = Vec::with_capacity(k);
    let mut start = 0;
    for f in 0..k {
        let len = base + usize::from(f < extra);
        let mut fold = idx[start..start + len].to_vec();
        fold.sort_unstable();
        folds.push(fold);
        start += len;
    }
    Ok(folds)
}

/// Oldest `floor(fraction * N)` rows for training, the rest for testing.
/// Rows are ordered by creation time, ties by doc id; both index lists come
/// back in that order.
pub fn chrono_split<F>(
    m: &SparseFeatureMatrix<F>,
    timestamps: &HashMap<DocId, DateTime<Utc>>,
    fraction: f64,
) -> Result<(Vec<usize>, Vec<usize>), EvalError> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(EvalError::BadFraction(fraction));
    }
    let mut keyed = m
        .rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            timestamps
                .get(&r.doc_id)
                .map(|t| (*t, &r.doc_id, i))
                .ok_or_else(|| EvalError::MissingTimestamp(r.doc_id.clone()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    keyed.sort_unstable_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
    // The epsilon keeps products like 0.7 * 10 from flooring to 6.
    let n_train = ((fraction * keyed.len() as f64) + 1e-9).floor() as usize;
    let order: Vec<usize> = keyed.into_iter().map(|(_, _, i)| i).collect();
    let (train, test) = order.split_at(n_train);
    Ok((train.to_vec(), test.to_vec()))
}
