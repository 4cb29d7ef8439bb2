//! Correlation-based feature selection over binarized (present/absent)
//! features, with correlations measured by symmetrical uncertainty.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap, HashSet};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{FeatureError, SelectionMethod, SelectionResult, SparseFeatureMatrix};
use crate::corpus::Class;
use crate::num::Real;

/// Consecutive non-improving expansions before the search gives up.
pub const CFS_MAX_STALE: usize = 5;

fn entropy<F: Real>(counts: &[usize], n: usize) -> F {
    let n = F::from_count(n);
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = F::from_count(c) / n;
            -p * p.log2()
        })
        .sum()
}

/// `2 * I(X;Y) / (H(X) + H(Y))` in bits for two binary variables given as a
/// joint table `joint[x][y]`. Zero when both variables are constant.
pub fn symmetrical_uncertainty<F: Real>(joint: [[usize; 2]; 2]) -> F {
    let n = joint[0][0] + joint[0][1] + joint[1][0] + joint[1][1];
    if n == 0 {
        return F::zero();
    }
    let hx = entropy::<F>(&[joint[0][0] + joint[0][1], joint[1][0] + joint[1][1]], n);
    let hy = entropy::<F>(&[joint[0][0] + joint[1][0], joint[0][1] + joint[1][1]], n);
    let hxy = entropy::<F>(&[joint[0][0], joint[0][1], joint[1][0], joint[1][1]], n);
    let denom = hx + hy;
    if denom <= F::zero() {
        return F::zero();
    }
    (F::lit(2.0) * (hx + hy - hxy) / denom).max(F::zero())
}

/// `k * mean(r_cf) / sqrt(k + k(k-1) * mean(r_ff))`, written with sums:
/// `sum_cf / sqrt(k + 2 * sum_ff)` where `sum_ff` runs over unordered pairs.
#[inline]
fn merit_of<F: Real>(k: usize, sum_cf: F, sum_ff: F) -> F {
    if k == 0 {
        return F::zero();
    }
    sum_cf / (F::from_count(k) + F::lit(2.0) * sum_ff).sqrt()
}

struct Presence {
    n: usize,
    labels: Vec<Class>,
    /// rows where each feature is present
    columns: Vec<Vec<u32>>,
}

impl Presence {
    fn new<F: Real>(m: &SparseFeatureMatrix<F>) -> Self {
        let mut columns = vec![Vec::new(); m.num_features];
        for (i, r) in m.rows.iter().enumerate() {
            for &(o, v) in &r.values {
                if v > F::zero() {
                    columns[o as usize].push(i as u32);
                }
            }
        }
        Presence {
            n: m.rows.len(),
            labels: m.labels(),
            columns,
        }
    }

    fn class_su<F: Real>(&self, f: usize) -> F {
        let bugs_total = self.labels.iter().filter(|&&c| c == Class::Bug).count();
        let present = &self.columns[f];
        let present_bug = present
            .iter()
            .filter(|&&r| self.labels[r as usize] == Class::Bug)
            .count();
        let present_non = present.len() - present_bug;
        let absent_bug = bugs_total - present_bug;
        let absent_non = self.n - present.len() - absent_bug;
        symmetrical_uncertainty([[absent_non, absent_bug], [present_non, present_bug]])
    }

    /// SU between feature `s` and every feature.
    fn su_row<F: Real>(&self, s: usize, m: &SparseFeatureMatrix<F>) -> Vec<F> {
        let mut co = vec![0usize; self.columns.len()];
        for &r in &self.columns[s] {
            for &(o, v) in &m.rows[r as usize].values {
                if v > F::zero() {
                    co[o as usize] += 1;
                }
            }
        }
        let a = self.columns[s].len();
        co.par_iter()
            .enumerate()
            .map(|(f, &both)| {
                let b = self.columns[f].len();
                let only_a = a - both;
                let only_b = b - both;
                let neither = self.n - both - only_a - only_b;
                symmetrical_uncertainty([[neither, only_b], [only_a, both]])
            })
            .collect()
    }
}

/// Merit of an arbitrary subset, computed from scratch.
pub fn subset_merit<F: Real>(m: &SparseFeatureMatrix<F>, subset: &[u32]) -> F {
    let p = Presence::new(m);
    let sum_cf: F = subset.iter().map(|&f| p.class_su::<F>(f as usize)).sum();
    let mut sum_ff = F::zero();
    for (i, &a) in subset.iter().enumerate() {
        let row = p.su_row::<F>(a as usize, m);
        for &b in &subset[i + 1..] {
            sum_ff = sum_ff + row[b as usize];
        }
    }
    merit_of(subset.len(), sum_cf, sum_ff)
}

struct Open<F> {
    merit: F,
    seq: u64,
    parent: usize,
    feature: u32,
    sum_cf: F,
    sum_ff: F,
}

impl<F: Real> PartialEq for Open<F> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<F: Real> Eq for Open<F> {}
impl<F: Real> PartialOrd for Open<F> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<F: Real> Ord for Open<F> {
    // max-heap: higher merit first, then earlier insertion
    fn cmp(&self, other: &Self) -> Ordering {
        self.merit
            .partial_cmp(&other.merit)
            .unwrap_or(Ordering::Equal)
            .then(other.seq.cmp(&self.seq))
    }
}

struct Expanded<F> {
    subset: Vec<u32>,
    sum_cf: F,
    sum_ff: F,
}

/// Best-first search over add-one-feature expansions from the empty set.
/// Stops after [`CFS_MAX_STALE`] consecutive expansions that fail to improve
/// the best merit, and returns the best subset seen.
pub fn select_cfs<F: Real>(m: &SparseFeatureMatrix<F>) -> Result<SelectionResult<F>, FeatureError> {
    let counts = m.class_counts();
    for c in Class::BOTH {
        if counts[c.index()] == 0 {
            return Err(FeatureError::DegenerateClass(c));
        }
    }
    if m.num_features < 2 {
        return Err(FeatureError::TooFewFeatures {
            need: 2,
            have: m.num_features,
        });
    }

    let p = Presence::new(m);
    let nf = m.num_features;
    let class_su: Vec<F> = (0..nf).into_par_iter().map(|f| p.class_su(f)).collect();
    let mut pair_su: HashMap<u32, Vec<F>> = HashMap::new();

    // Subsets are identified by the sum of per-feature random 128-bit keys.
    let mut rng = ChaCha8Rng::seed_from_u64(0x05ee_dcf5);
    let keys: Vec<u128> = (0..nf)
        .map(|_| ((rng.next_u64() as u128) << 64) | rng.next_u64() as u128)
        .collect();
    let subset_key = |s: &[u32]| s.iter().fold(0u128, |acc, &f| acc.wrapping_add(keys[f as usize]));
    let mut visited: HashSet<u128> = HashSet::from([0]);

    let mut arena: Vec<Expanded<F>> = vec![Expanded {
        subset: Vec::new(),
        sum_cf: F::zero(),
        sum_ff: F::zero(),
    }];
    let mut open: BinaryHeap<Open<F>> = BinaryHeap::new();
    let mut seq = 0u64;
    let mut best_merit = F::zero();
    let mut best_subset: Vec<u32> = Vec::new();
    let mut stale = 0;
    let mut current = Some(0usize);

    while let Some(node) = current {
        for &s in &arena[node].subset {
            pair_su.entry(s).or_insert_with(|| p.su_row(s as usize, m));
        }
        let subset = &arena[node].subset;
        let parent_key = subset_key(subset);
        let rows: Vec<&Vec<F>> = subset.iter().map(|s| &pair_su[s]).collect();
        let (sum_cf0, sum_ff0) = (arena[node].sum_cf, arena[node].sum_ff);
        let k = subset.len() + 1;

        let children: Vec<Open<F>> = (0..nf as u32)
            .into_par_iter()
            .filter(|f| subset.binary_search(f).is_err())
            .filter(|&f| !visited.contains(&parent_key.wrapping_add(keys[f as usize])))
            .map(|f| {
                let sum_cf = sum_cf0 + class_su[f as usize];
                let sum_ff = sum_ff0 + rows.iter().map(|r| r[f as usize]).sum::<F>();
                Open {
                    merit: merit_of(k, sum_cf, sum_ff),
                    seq: 0,
                    parent: node,
                    feature: f,
                    sum_cf,
                    sum_ff,
                }
            })
            .collect();

        let mut improved = false;
        for mut child in children {
            visited.insert(parent_key.wrapping_add(keys[child.feature as usize]));
            if child.merit > best_merit + F::lit(1e-12) {
                best_merit = child.merit;
                best_subset = with_feature(&arena[node].subset, child.feature);
                improved = true;
            }
            child.seq = seq;
            seq += 1;
            open.push(child);
        }
        stale = if improved { 0 } else { stale + 1 };
        if stale >= CFS_MAX_STALE {
            break;
        }

        current = open.pop().map(|o| {
            arena.push(Expanded {
                subset: with_feature(&arena[o.parent].subset, o.feature),
                sum_cf: o.sum_cf,
                sum_ff: o.sum_ff,
            });
            arena.len() - 1
        });
    }

    Ok(SelectionResult {
        method: SelectionMethod::Cfs,
        kept: best_subset,
        scores: class_su,
        merit: Some(best_merit),
    })
}

fn with_feature(subset: &[u32], f: u32) -> Vec<u32> {
    let mut s = subset.to_vec();
    let at = s.binary_search(&f).unwrap_or_else(|i| i);
    s.insert(at, f);
    s
}
