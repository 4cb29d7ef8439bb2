//! Bagged CART-style classification trees split on Gini impurity.

use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ClassifyError;
use crate::corpus::Class;
use crate::features::SparseFeatureMatrix;
use crate::num::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_trees: usize,
    /// Features tried per node; `floor(sqrt(num_features))` when unset.
    pub mtry: Option<usize>,
    pub seed: u64,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_trees: 100,
            mtry: None,
            seed: 42,
        }
    }
}

pub fn default_mtry(num_features: usize) -> usize {
    ((num_features as f64).sqrt().floor() as usize).max(1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Node<F> {
    /// `value <= threshold` goes left.
    Split {
        feature: u32,
        threshold: F,
        left: u32,
        right: u32,
    },
    /// Class counts `[nonbug, bug]` of the bootstrap samples reaching the leaf.
    Leaf { counts: [u32; 2] },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree<F> {
    pub nodes: Vec<Node<F>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Forest<F> {
    pub hyperparameters: ForestParams,
    /// Resolved features-per-node.
    pub mtry: usize,
    pub num_features: usize,
    pub trees: Vec<DecisionTree<F>>,
}

/// `1 - Σ_c p_c²`.
pub fn gini<F: Real>(counts: [usize; 2]) -> F {
    let n = counts[0] + counts[1];
    if n == 0 {
        return F::zero();
    }
    let n = F::from_count(n);
    F::one()
        - counts
            .iter()
            .map(|&c| {
                let p = F::from_count(c) / n;
                p * p
            })
            .sum::<F>()
}

/// `Σ_c n_c²`; weighted child impurity is `1 - (sq_L/n_L + sq_R/n_R)/N`, so
/// splits compare exactly through these integers.
#[inline]
fn sum_sq(c: [u64; 2]) -> u64 {
    c[0] * c[0] + c[1] * c[1]
}

/// Purity score `sq_L/n_L + sq_R/n_R` as the exact fraction `(num, den)`.
#[inline]
fn split_score(l: [u64; 2], r: [u64; 2]) -> (u128, u128) {
    let (nl, nr) = ((l[0] + l[1]) as u128, (r[0] + r[1]) as u128);
    (sum_sq(l) as u128 * nr + sum_sq(r) as u128 * nl, nl * nr)
}

#[inline]
fn frac_gt(a: (u128, u128), b: (u128, u128)) -> bool {
    a.0 * b.1 > b.0 * a.1
}

struct Candidate<F> {
    feature: u32,
    threshold: F,
    score: (u128, u128),
}

struct TreeBuilder<'a, F> {
    m: &'a SparseFeatureMatrix<F>,
    /// canonical position → row index of `m`
    canon: &'a [usize],
    mtry: usize,
    rng: ChaCha8Rng,
}

impl<F: Real> TreeBuilder<'_, F> {
    fn label(&self, s: usize) -> usize {
        self.m.rows[self.canon[s]].label.index()
    }

    fn best_split_on(&self, f: u32, samples: &[usize], totals: [u64; 2]) -> Option<Candidate<F>> {
        let mut vals: Vec<(F, usize)> = samples
            .iter()
            .map(|&s| (self.m.rows[self.canon[s]].get(f), self.label(s)))
            .collect();
        vals.sort_by(|a, b| {
            a.0.partial_cmp(&b.0)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.1.cmp(&b.1))
        });
        let mut left = [0u64; 2];
        let mut best: Option<Candidate<F>> = None;
        for i in 0..vals.len() - 1 {
            left[vals[i].1] += 1;
            if vals[i].0 == vals[i + 1].0 {
                continue;
            }
            let right = [totals[0] - left[0], totals[1] - left[1]];
            let score = split_score(left, right);
            if best.as_ref().is_none_or(|b| frac_gt(score, b.score)) {
                best = Some(Candidate {
                    feature: f,
                    threshold: (vals[i].0 + vals[i + 1].0) / F::lit(2.0),
                    score,
                });
            }
        }
        best
    }

    /// Tries `mtry` random features; if none of them reduces impurity, keeps
    /// drawing the remaining features in random order until one does.
    fn find_split(&mut self, samples: &[usize], totals: [u64; 2]) -> Option<Candidate<F>> {
        let nf = self.m.num_features;
        let n = (totals[0] + totals[1]) as u128;
        let parent = (sum_sq(totals) as u128, n);
        let mut best: Option<Candidate<F>> = None;
        let first = sample(&mut self.rng, nf, self.mtry.min(nf)).into_vec();
        for &f in &first {
            if let Some(c) = self.best_split_on(f as u32, samples, totals) {
                if best.as_ref().is_none_or(|b| frac_gt(c.score, b.score)) {
                    best = Some(c);
                }
            }
        }
        let improves = |b: &Option<Candidate<F>>| b.as_ref().is_some_and(|c| frac_gt(c.score, parent));
        if !improves(&best) && first.len() < nf {
            let mut rest: Vec<usize> = {
                let mut tried = vec![false; nf];
                first.iter().for_each(|&f| tried[f] = true);
                (0..nf).filter(|&f| !tried[f]).collect()
            };
            rest.shuffle(&mut self.rng);
            for f in rest {
                if let Some(c) = self.best_split_on(f as u32, samples, totals) {
                    if frac_gt(c.score, parent) {
                        best = Some(c);
                        break;
                    }
                }
            }
        }
        best.filter(|c| frac_gt(c.score, parent))
    }

    fn build(mut self, bootstrap: Vec<usize>) -> DecisionTree<F> {
        let mut nodes: Vec<Node<F>> = vec![Node::Leaf { counts: [0, 0] }];
        let mut stack = vec![(0usize, bootstrap)];
        while let Some((id, samples)) = stack.pop() {
            let mut totals = [0u64; 2];
            for &s in &samples {
                totals[self.label(s)] += 1;
            }
            let leaf = Node::Leaf {
                counts: [totals[0] as u32, totals[1] as u32],
            };
            if samples.len() < 2 || totals[0] == 0 || totals[1] == 0 {
                nodes[id] = leaf;
                continue;
            }
            let Some(split) = self.find_split(&samples, totals) else {
                nodes[id] = leaf;
                continue;
            };
            let (l, r): (Vec<usize>, Vec<usize>) = samples
                .iter()
                .partition(|&&s| self.m.rows[self.canon[s]].get(split.feature) <= split.threshold);
            let left = nodes.len();
            nodes.push(Node::Leaf { counts: [0, 0] });
            nodes.push(Node::Leaf { counts: [0, 0] });
            nodes[id] = Node::Split {
                feature: split.feature,
                threshold: split.threshold,
                left: left as u32,
                right: left as u32 + 1,
            };
            // right pushed first so the left subtree is built first
            stack.push((left + 1, r));
            stack.push((left, l));
        }
        DecisionTree { nodes }
    }
}

impl<F: Real> DecisionTree<F> {
    fn leaf_for(&self, row: &[(u32, F)]) -> [u32; 2] {
        let mut i = 0usize;
        loop {
            match &self.nodes[i] {
                Node::Leaf { counts } => return *counts,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    let v = row
                        .binary_search_by_key(feature, |&(o, _)| o)
                        .map_or(F::zero(), |j| row[j].1);
                    i = if v <= *threshold { *left } else { *right } as usize;
                }
            }
        }
    }

    /// Majority class of the reached leaf; ties go to NONBUG.
    pub fn predict(&self, row: &[(u32, F)]) -> Class {
        let c = self.leaf_for(row);
        if c[1] > c[0] {
            Class::Bug
        } else {
            Class::NonBug
        }
    }

    pub fn depth(&self) -> usize {
        fn go<F>(nodes: &[Node<F>], i: usize) -> usize {
            match &nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + go(nodes, *left as usize).max(go(nodes, *right as usize)),
            }
        }
        go(&self.nodes, 0)
    }
}

/// Trains `n_trees` trees. Tree `t` draws from stream `t` of a ChaCha RNG
/// keyed by `seed`, so forests with different seeds share no trees.
/// Bootstrap indices refer to rows ordered by doc id, so the
/// result does not depend on input row order or thread count.
pub fn train_forest<F: Real>(m: &SparseFeatureMatrix<F>, params: &ForestParams) -> Result<Forest<F>, ClassifyError> {
    super::require_both_classes(m)?;
    let n = m.len();
    let mut canon: Vec<usize> = (0..n).collect();
    canon.sort_by(|&a, &b| m.rows[a].doc_id.cmp(&m.rows[b].doc_id));
    let mtry = params.mtry.unwrap_or_else(|| default_mtry(m.num_features)).max(1);

    let trees = (0..params.n_trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
            rng.set_stream(t as u64);
            let bootstrap: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
            TreeBuilder {
                m,
                canon: &canon,
                mtry,
                rng,
            }
            .build(bootstrap)
        })
        .collect();

    Ok(Forest {
        hyperparameters: *params,
        mtry,
        num_features: m.num_features,
        trees,
    })
}

/// Fraction of trees voting BUG; BUG iff the fraction is at least 0.5.
pub fn predict_forest<F: Real>(forest: &Forest<F>, row: &[(u32, F)]) -> (Class, F) {
    let bug_votes = forest.trees.iter().filter(|t| t.predict(row) == Class::Bug).count();
    let frac = F::from_count(bug_votes) / F::from_count(forest.trees.len().max(1));
    let class = if frac >= F::lit(0.5) { Class::Bug } else { Class::NonBug };
    (class, frac)
}
