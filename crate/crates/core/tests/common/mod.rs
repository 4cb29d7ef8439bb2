//! Generators and brute-force oracles shared by the integration tests and the
//! acceptance suite.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashSet};

use bugidf::corpus::{Class, Corpus, DocId, Document};
use bugidf::features::{subset_merit, FeatureRow, SparseFeatureMatrix};
use chrono::{Duration, TimeZone, Utc};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn document(id: usize, tokens: Vec<String>, label: Class, day: i64) -> Document {
    Document {
        doc_id: DocId::new("SYN", format!("SYN-{id:04}")),
        tokens,
        label,
        created_at: Utc.with_ymd_and_hms(2008, 1, 1, 0, 0, 0).unwrap() + Duration::days(day),
    }
}

/// Up to `max_tokens` tokens over a vocabulary of at most `max_vocab` words,
/// spread over 1..=12 documents. Low-entropy choices make repeats common.
pub fn random_corpus<R: Rng>(rng: &mut R, max_tokens: usize, max_vocab: usize) -> Corpus {
    let vocab = rng.gen_range(1..=max_vocab);
    let ndocs = rng.gen_range(1..=12);
    let total = rng.gen_range(0..=max_tokens);
    let mut docs: Vec<Vec<String>> = vec![Vec::new(); ndocs];
    for _ in 0..total {
        let d = rng.gen_range(0..ndocs);
        // Skewed word choice: square of a uniform draw.
        let u: f64 = rng.gen();
        let w = ((u * u) * vocab as f64) as usize;
        docs[d].push(format!("w{w}"));
    }
    let docs = docs
        .into_iter()
        .enumerate()
        .map(|(i, t)| {
            let label = if rng.gen_bool(0.5) { Class::Bug } else { Class::NonBug };
            document(i, t, label, i as i64)
        })
        .collect();
    Corpus::from_documents(docs).unwrap()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleStats {
    pub gtf: u64,
    pub df: u32,
    pub sdf: u32,
}

/// Every N-gram (n <= nmax) occurring at least twice, by direct window
/// counting over each document.
pub fn brute_force_ngrams(corpus: &Corpus, nmax: usize) -> BTreeMap<Vec<String>, OracleStats> {
    let mut gtf: BTreeMap<Vec<String>, u64> = BTreeMap::new();
    let mut docs: BTreeMap<Vec<String>, BTreeSet<usize>> = BTreeMap::new();
    for (d, doc) in corpus.documents().iter().enumerate() {
        for n in 1..=nmax {
            for w in doc.tokens.windows(n) {
                *gtf.entry(w.to_vec()).or_default() += 1;
                docs.entry(w.to_vec()).or_default().insert(d);
            }
        }
    }
    let sets: Vec<HashSet<&String>> = corpus.documents().iter().map(|d| d.tokens.iter().collect()).collect();
    gtf.into_iter()
        .filter(|(_, g)| *g >= 2)
        .map(|(k, g)| {
            let df = docs[&k].len() as u32;
            let sdf = sets.iter().filter(|s| k.iter().all(|t| s.contains(t))).count() as u32;
            (k, OracleStats { gtf: g, df, sdf })
        })
        .collect()
}

/// Suffix array by sorting whole suffixes.
pub fn naive_suffix_array(s: &[u32]) -> Vec<u32> {
    let mut sa: Vec<u32> = (0..s.len() as u32).collect();
    sa.sort_by(|&a, &b| s[a as usize..].cmp(&s[b as usize..]));
    sa
}

pub fn naive_lcp(s: &[u32], sa: &[u32]) -> Vec<u32> {
    let mut lcp = vec![0; sa.len()];
    for i in 1..sa.len() {
        let (a, b) = (&s[sa[i - 1] as usize..], &s[sa[i] as usize..]);
        lcp[i] = a.iter().zip(b).take_while(|(x, y)| x == y).count() as u32;
    }
    lcp
}

/// Best merit over all non-empty subsets, and every subset achieving it
/// (within 1e-12).
pub fn exhaustive_cfs(m: &SparseFeatureMatrix<f64>) -> (f64, Vec<Vec<u32>>) {
    let nf = m.num_features as u32;
    let mut best = f64::NEG_INFINITY;
    let mut argmax = Vec::new();
    for mask in 1u32..(1 << nf) {
        let subset: Vec<u32> = (0..nf).filter(|f| mask & (1 << f) != 0).collect();
        let merit = subset_merit(m, &subset);
        if merit > best + 1e-12 {
            best = merit;
            argmax = vec![subset];
        } else if (merit - best).abs() <= 1e-12 {
            argmax.push(subset);
        }
    }
    (best, argmax)
}

/// Binary feature matrix with `nf` features whose agreement with the class
/// varies per feature, plus some copies so that redundancy matters.
pub fn random_binary_matrix<R: Rng>(rng: &mut R, nf: usize) -> SparseFeatureMatrix<f64> {
    let n = rng.gen_range(20..80);
    let strength: Vec<f64> = (0..nf).map(|_| rng.gen_range(0.0..0.45)).collect();
    let copy_of: Vec<Option<usize>> = (0..nf)
        .map(|f| {
            if f > 0 && rng.gen_bool(0.25) {
                Some(rng.gen_range(0..f))
            } else {
                None
            }
        })
        .collect();
    let mut rows: Vec<FeatureRow<f64>> = (0..n)
        .map(|i| {
            let bug = rng.gen_bool(0.4);
            let mut present = vec![false; nf];
            for f in 0..nf {
                present[f] = match copy_of[f] {
                    Some(src) if rng.gen_bool(0.9) => present[src],
                    _ => rng.gen_bool(if bug { 0.5 + strength[f] } else { 0.5 - strength[f] }),
                };
            }
            FeatureRow {
                doc_id: DocId::new("M", format!("{i}")),
                label: if bug { Class::Bug } else { Class::NonBug },
                values: (0..nf as u32)
                    .filter(|&f| present[f as usize])
                    .map(|f| (f, 1.0))
                    .collect(),
            }
        })
        .collect();
    // Both classes must be present.
    rows[0].label = Class::Bug;
    rows[1].label = Class::NonBug;
    SparseFeatureMatrix::new(rows, (0..nf).map(|f| format!("f{f}")).collect()).unwrap()
}

const FILLER: &[&str] = &[
    "the",
    "a",
    "is",
    "in",
    "when",
    "with",
    "of",
    "and",
    "we",
    "it",
    "this",
    "that",
    "on",
    "for",
    "be",
    "should",
    "server",
    "client",
    "request",
    "response",
    "connection",
    "method",
    "class",
    "file",
    "index",
    "query",
    "node",
    "session",
    "config",
    "header",
    "cookie",
    "proxy",
    "stream",
    "buffer",
    "thread",
    "lock",
    "cache",
    "field",
    "value",
    "patch",
    "attached",
    "release",
    "version",
    "trunk",
    "branch",
    "code",
    "api",
    "user",
    "call",
    "return",
    "default",
    "option",
    "support",
    "add",
    "new",
    "use",
    "change",
    "update",
    "remove",
    "make",
    "check",
    "set",
    "get",
    "run",
    "build",
    "javadoc",
    "document",
    "writer",
    "reader",
    "segment",
    "term",
    "token",
    "analyzer",
    "repository",
    "workspace",
    "item",
    "property",
    "version",
    "log",
    "message",
    "error",
    "fail",
    "case",
    "time",
    "memory",
];

/// Words of the class phrases, also sprinkled individually into both classes
/// so that word order, not word presence, carries the label.
const SIGNAL_WORDS: &[&str] = &[
    "null",
    "pointer",
    "exception",
    "how",
    "to",
    "reproduce",
    "performance",
    "test",
    "improvement",
];
const BUG_PHRASES: &[&[&str]] = &[&["null", "pointer", "exception"], &["how", "to", "reproduce"]];
const NONBUG_PHRASES: &[&[&str]] = &[&["performance", "test"], &["improvement"]];

/// Labelled reports where BUG text embeds "null pointer exception" or "how to
/// reproduce" and NONBUG text embeds "performance test" or "improvement".
/// Roughly 3% of reports carry no phrase at all.
pub fn synthetic_bug_corpus<R: Rng>(rng: &mut R, n: usize) -> Corpus {
    let docs = (0..n)
        .map(|i| {
            let bug = rng.gen_bool(0.45);
            let len = rng.gen_range(25..60);
            let mut tokens: Vec<String> = (0..len)
                .map(|_| {
                    let u: f64 = rng.gen();
                    FILLER[((u * u) * FILLER.len() as f64) as usize].to_string()
                })
                .collect();
            for _ in 0..rng.gen_range(0..3) {
                let pos = rng.gen_range(0..=tokens.len());
                tokens.insert(pos, SIGNAL_WORDS.choose(rng).unwrap().to_string());
            }
            if rng.gen_bool(0.97) {
                let phrases = if bug { BUG_PHRASES } else { NONBUG_PHRASES };
                for _ in 0..rng.gen_range(1..=2) {
                    let p = phrases.choose(rng).unwrap();
                    let pos = rng.gen_range(0..=tokens.len());
                    for (j, w) in p.iter().enumerate() {
                        tokens.insert(pos + j, w.to_string());
                    }
                }
            }
            let label = if bug { Class::Bug } else { Class::NonBug };
            document(i, tokens, label, rng.gen_range(0..730))
        })
        .collect();
    Corpus::from_documents(docs).unwrap()
}

/// Exact two-sided Mann-Whitney p-value: enumerates every assignment of the
/// pooled midranks to the first sample.
pub fn exact_mann_whitney_p(a: &[f64], b: &[f64]) -> f64 {
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let n = pooled.len();
    let mut sorted = pooled.clone();
    sorted.sort_by(f64::total_cmp);
    let rank = |x: f64| {
        let lo = sorted.iter().filter(|&&y| y < x).count();
        let eq = sorted.iter().filter(|&&y| y == x).count();
        lo as f64 + (eq as f64 + 1.0) / 2.0
    };
    let ranks: Vec<f64> = pooled.iter().map(|&x| rank(x)).collect();
    let na = a.len() as f64;
    let u_of = |sum: f64| sum - na * (na + 1.0) / 2.0;
    let mu = na * b.len() as f64 / 2.0;
    let observed = (u_of(ranks[..a.len()].iter().sum()) - mu).abs();

    let (mut hits, mut total) = (0u64, 0u64);
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != a.len() {
            continue;
        }
        let sum: f64 = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| ranks[i]).sum();
        total += 1;
        if (u_of(sum) - mu).abs() >= observed - 1e-9 {
            hits += 1;
        }
    }
    hits as f64 / total as f64
}
