use rayon::prelude::*;

use super::SuffixIndex;
use crate::corpus::{Corpus, Symbol};

/// A repeated N-gram with its occurrence statistics.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NGramCount {
    pub symbols: Vec<Symbol>,
    /// Occurrences across the corpus (overlaps included).
    pub gtf: u64,
    /// Documents containing the phrase.
    pub df: u32,
}

/// Every distinct N-gram of length `1..=nmax` occurring at least twice.
///
/// Walks the lcp-interval tree bottom-up. An interval `[lb, rb]` with lcp
/// value `l` whose parent interval has lcp value `p` stands for the N-grams of
/// lengths `p+1..=l`; all of them share the interval's occurrence set, so
/// `gtf = rb - lb + 1` and `df` is one distinct-document count over it.
/// Intervals that contribute no length `<= nmax` are never scanned.
/// Sentinels are unique, so no lcp ever reaches across a document boundary.
pub fn enumerate_ngrams(index: &SuffixIndex, corpus: &Corpus, nmax: usize) -> Vec<NGramCount> {
    assert!(nmax >= 1, "nmax must be at least 1");
    let n = index.len();
    let stream = corpus.token_stream();
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }

    // doc_seen[d] == stamp marks document d as counted for the current interval
    let mut doc_seen = vec![u32::MAX; corpus.len().max(1)];
    let mut stamp = 0u32;
    let mut emit = |l: usize, lb: usize, rb: usize, parent: usize| {
        let top = l.min(nmax);
        if top <= parent {
            return;
        }
        let mut df = 0u32;
        for &p in &index.sa[lb..=rb] {
            let d = index.doc_of[p as usize] as usize;
            if doc_seen[d] != stamp {
                doc_seen[d] = stamp;
                df += 1;
            }
        }
        stamp = stamp.wrapping_add(1);
        let start = index.sa[lb] as usize;
        for len in parent + 1..=top {
            out.push(NGramCount {
                symbols: stream[start..start + len].to_vec(),
                gtf: (rb - lb + 1) as u64,
                df,
            });
        }
    };

    // (lcp value, left bound)
    let mut stack: Vec<(usize, usize)> = vec![(0, 0)];
    for i in 1..=n {
        let cur = if i < n { index.lcp[i] as usize } else { 0 };
        let mut lb = i - 1;
        while cur < stack.last().unwrap().0 {
            let (l, left) = stack.pop().unwrap();
            let parent = cur.max(stack.last().map_or(0, |t| t.0));
            emit(l, left, i - 1, parent);
            lb = left;
        }
        if cur > stack.last().unwrap().0 {
            stack.push((cur, lb));
        }
    }
    out
}

/// Per-symbol sorted lists of documents containing that token.
pub(crate) fn postings(corpus: &Corpus) -> Vec<Vec<u32>> {
    let base = corpus.len();
    let mut lists = vec![Vec::new(); corpus.vocab().len()];
    for d in 0..corpus.len() {
        for &sym in corpus.doc_symbols(d) {
            let list: &mut Vec<u32> = &mut lists[sym as usize - base];
            if list.last() != Some(&(d as u32)) {
                list.push(d as u32);
            }
        }
    }
    lists
}

/// Set document frequency of each N-gram: documents containing every
/// distinct token of it, anywhere and in any order. Posting lists are
/// intersected smallest-first.
pub fn compute_sdf(counts: &[NGramCount], corpus: &Corpus) -> Vec<u32> {
    let lists = postings(corpus);
    let base = corpus.len();
    counts
        .par_iter()
        .map(|c| {
            let mut syms = c.symbols.clone();
            syms.sort_unstable();
            syms.dedup();
            let mut ls: Vec<&[u32]> = syms.iter().map(|&s| lists[s as usize - base].as_slice()).collect();
            ls.sort_by_key(|l| l.len());
            let (first, rest) = ls.split_first().expect("n-gram has a token");
            first
                .iter()
                .filter(|d| rest.iter().all(|l| l.binary_search(d).is_ok()))
                .count() as u32
        })
        .collect()
}
