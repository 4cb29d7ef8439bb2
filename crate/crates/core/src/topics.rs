//! LDA topic-model baseline: collapsed Gibbs sampling over unigram tokens and
//! per-document topic membership vectors.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;
use thiserror::Error;

use crate::corpus::{Class, Corpus, DocId};
use crate::features::{FeatureRow, SparseFeatureMatrix};
use crate::num::Real;

pub const DEFAULT_TOPICS: usize = 50;
pub const DEFAULT_BETA: f64 = 0.01;
pub const DEFAULT_LDA_ITERS: usize = 1000;

#[derive(Debug, Error)]
pub enum TopicError {
    #[error("cannot fit a topic model on an empty corpus")]
    EmptyCorpus,
    #[error("need at least 2 topics, got {0}")]
    TooFewTopics(usize),
    #[error("Dirichlet hyperparameters must be positive")]
    BadPrior,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LdaParams<F> {
    pub k: usize,
    pub alpha: F,
    pub beta: F,
    pub iters: usize,
    pub seed: u64,
    /// Sweeps between log-joint evaluations; 0 records only the final value.
    pub log_every: usize,
}

impl<F: Real> LdaParams<F> {
    /// `alpha = 50 / k`, `beta = 0.01`, 1000 sweeps.
    pub fn new(k: usize) -> Self {
        LdaParams {
            k,
            alpha: F::lit(50.0 / k.max(1) as f64),
            beta: F::lit(DEFAULT_BETA),
            iters: DEFAULT_LDA_ITERS,
            seed: 42,
            log_every: 50,
        }
    }
}

impl<F: Real> Default for LdaParams<F> {
    fn default() -> Self {
        Self::new(DEFAULT_TOPICS)
    }
}

/// Sampler state after training. Count matrices are row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LdaModel<F> {
    pub k: usize,
    pub alpha: F,
    pub beta: F,
    /// Word types; word id `w` is `vocab[w]`.
    pub vocab: Vec<String>,
    /// `K x V` topic-word counts.
    pub topic_word: Vec<u32>,
    pub topic_totals: Vec<u32>,
    /// `D x K` document-topic counts.
    pub doc_topic: Vec<u32>,
    pub assignments: Vec<Vec<u32>>,
    pub doc_ids: Vec<DocId>,
    pub labels: Vec<Class>,
    /// `(sweep, log p(w, z))` diagnostics.
    pub log_joint: Vec<(usize, f64)>,
}

impl<F: Real> LdaModel<F> {
    pub fn num_docs(&self) -> usize {
        self.doc_ids.len()
    }

    pub fn doc_len(&self, d: usize) -> usize {
        self.assignments[d].len()
    }

    pub fn n_dk(&self, d: usize) -> &[u32] {
        &self.doc_topic[d * self.k..(d + 1) * self.k]
    }

    pub fn n_kw(&self, k: usize) -> &[u32] {
        let v = self.vocab.len();
        &self.topic_word[k * v..(k + 1) * v]
    }

    /// Word index for `token`, if it occurs in the training corpus.
    pub fn word_index(&self, token: &str) -> Option<usize> {
        self.vocab.binary_search_by(|t| t.as_str().cmp(token)).ok()
    }
}

/// `log p(w, z)` under the collapsed model.
pub fn log_joint<F: Real>(model: &LdaModel<F>) -> f64 {
    let k = model.k as f64;
    let v = model.vocab.len() as f64;
    let (alpha, beta) = (model.alpha.as_f64(), model.beta.as_f64());
    let lg_beta = ln_gamma(beta);
    let lg_alpha = ln_gamma(alpha);

    let mut words = k * (ln_gamma(v * beta) - v * lg_beta);
    for t in 0..model.k {
        for &c in model.n_kw(t).iter().filter(|&&c| c > 0) {
            words += ln_gamma(c as f64 + beta) - lg_beta;
        }
        words -= ln_gamma(model.topic_totals[t] as f64 + v * beta) - v * lg_beta;
    }

    let d = model.num_docs() as f64;
    let mut topics = d * (ln_gamma(k * alpha) - k * lg_alpha);
    for doc in 0..model.num_docs() {
        for &c in model.n_dk(doc).iter().filter(|&&c| c > 0) {
            topics += ln_gamma(c as f64 + alpha) - lg_alpha;
        }
        topics -= ln_gamma(model.doc_len(doc) as f64 + k * alpha) - k * lg_alpha;
    }
    words + topics
}

/// Fits LDA by collapsed Gibbs sampling. Each sweep visits every token in
/// corpus order and redraws its topic with probability proportional to
/// `(n_dk + alpha)(n_kw + beta) / (n_k + V beta)`, its own assignment removed.
pub fn train_lda<F: Real>(corpus: &Corpus, params: &LdaParams<F>) -> Result<LdaModel<F>, TopicError> {
    if corpus.is_empty() {
        return Err(TopicError::EmptyCorpus);
    }
    if params.k < 2 {
        return Err(TopicError::TooFewTopics(params.k));
    }
    if !(params.alpha > F::zero() && params.beta > F::zero()) {
        return Err(TopicError::BadPrior);
    }

    let kk = params.k;
    let v = corpus.vocab().len();
    let base = corpus.len() as u32;
    let words: Vec<Vec<u32>> = (0..corpus.len())
        .map(|d| corpus.doc_symbols(d).iter().map(|&s| s - base).collect())
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut model = LdaModel {
        k: kk,
        alpha: params.alpha,
        beta: params.beta,
        vocab: corpus.vocab().to_vec(),
        topic_word: vec![0; kk * v],
        topic_totals: vec![0; kk],
        doc_topic: vec![0; corpus.len() * kk],
        assignments: Vec::with_capacity(corpus.len()),
        doc_ids: corpus.documents().iter().map(|d| d.doc_id.clone()).collect(),
        labels: corpus.documents().iter().map(|d| d.label).collect(),
        log_joint: Vec::new(),
    };
    for (d, ws) in words.iter().enumerate() {
        let z: Vec<u32> = ws.iter().map(|_| rng.gen_range(0..kk as u32)).collect();
        for (&w, &t) in ws.iter().zip(&z) {
            let t = t as usize;
            model.topic_word[t * v + w as usize] += 1;
            model.topic_totals[t] += 1;
            model.doc_topic[d * kk + t] += 1;
        }
        model.assignments.push(z);
    }

    let alpha = params.alpha;
    let beta = params.beta;
    let v_beta = beta * F::from_count(v);
    let mut p = vec![F::zero(); kk];
    for sweep in 1..=params.iters {
        for (d, ws) in words.iter().enumerate() {
            let dt = &mut model.doc_topic[d * kk..(d + 1) * kk];
            for (i, &w) in ws.iter().enumerate() {
                let w = w as usize;
                let old = model.assignments[d][i] as usize;
                dt[old] -= 1;
                model.topic_word[old * v + w] -= 1;
                model.topic_totals[old] -= 1;

                let mut total = F::zero();
                for t in 0..kk {
                    let nkw = F::from_u32(model.topic_word[t * v + w]).unwrap_or_else(F::zero);
                    let nk = F::from_u32(model.topic_totals[t]).unwrap_or_else(F::zero);
                    let ndk = F::from_u32(dt[t]).unwrap_or_else(F::zero);
                    total = total + (ndk + alpha) * (nkw + beta) / (nk + v_beta);
                    p[t] = total;
                }
                let u = F::lit(rng.gen::<f64>()) * total;
                let new = p.iter().position(|&c| u < c).unwrap_or(kk - 1);

                dt[new] += 1;
                model.topic_word[new * v + w] += 1;
                model.topic_totals[new] += 1;
                model.assignments[d][i] = new as u32;
            }
        }
        let due = params.log_every > 0 && sweep % params.log_every == 0;
        if due || sweep == params.iters {
            model.log_joint.push((sweep, log_joint(&model)));
        }
    }
    if params.iters == 0 {
        model.log_joint.push((0, log_joint(&model)));
    }
    Ok(model)
}

/// Smoothed topic proportions `(n_dk + alpha) / (len_d + K alpha)` per
/// document, as a feature matrix with columns `topic_0 .. topic_{K-1}`.
pub fn membership_vectors<F: Real>(model: &LdaModel<F>) -> SparseFeatureMatrix<F> {
    let kk = model.k;
    let k_alpha = model.alpha * F::from_count(kk);
    let rows = (0..model.num_docs())
        .map(|d| {
            let denom = F::from_count(model.doc_len(d)) + k_alpha;
            let values = model
                .n_dk(d)
                .iter()
                .enumerate()
                .map(|(t, &c)| (t as u32, (F::from_u32(c).unwrap_or_else(F::zero) + model.alpha) / denom))
                .collect();
            FeatureRow {
                doc_id: model.doc_ids[d].clone(),
                label: model.labels[d],
                values,
            }
        })
        .collect();
    SparseFeatureMatrix {
        rows,
        num_features: kk,
        feature_names: (0..kk).map(|t| format!("topic_{t}")).collect(),
    }
}
