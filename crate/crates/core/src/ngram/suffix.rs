//! Token-level enhanced suffix array: suffix array, LCP array and the
//! position → document map.

use crate::corpus::{Corpus, Symbol};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuffixIndex {
    pub sa: Vec<u32>,
    /// `lcp[i]` is the common prefix length (in tokens) of suffixes `sa[i-1]`
    /// and `sa[i]`; `lcp[0] = 0`.
    pub lcp: Vec<u32>,
    pub doc_of: Vec<u32>,
}

impl SuffixIndex {
    pub fn build(corpus: &Corpus) -> SuffixIndex {
        let stream = corpus.token_stream();
        let mut doc_of = vec![0u32; stream.len()];
        for (d, &start) in corpus.doc_offsets().iter().enumerate() {
            let end = start + corpus.documents()[d].tokens.len() + 1;
            doc_of[start..end].fill(d as u32);
        }
        Self::from_stream(stream, doc_of)
    }

    /// Index over an arbitrary symbol stream. Ties between equal suffix
    /// prefixes running off the end resolve shorter-first.
    pub fn from_stream(stream: &[Symbol], doc_of: Vec<u32>) -> SuffixIndex {
        assert_eq!(stream.len(), doc_of.len());
        let sa = suffix_array(stream);
        let lcp = lcp_kasai(stream, &sa);
        SuffixIndex { sa, lcp, doc_of }
    }

    pub fn len(&self) -> usize {
        self.sa.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sa.is_empty()
    }
}

/// Prefix doubling with counting sorts; O(n log n).
pub fn suffix_array(s: &[Symbol]) -> Vec<u32> {
    let n = s.len();
    if n == 0 {
        return Vec::new();
    }
    let alphabet = s.iter().copied().max().unwrap_or(0) as usize + 1;
    let mut counts = vec![0usize; alphabet.max(n)];

    let identity: Vec<u32> = (0..n as u32).collect();
    let mut sa = vec![0u32; n];
    counting_sort(&mut sa, &identity, s, &mut counts[..alphabet]);

    // Dense ranks by first symbol.
    let mut rank = vec![0u32; n];
    let mut classes = 1usize;
    for i in 1..n {
        if s[sa[i] as usize] != s[sa[i - 1] as usize] {
            classes += 1;
        }
        rank[sa[i] as usize] = (classes - 1) as u32;
    }

    let mut order = vec![0u32; n];
    let mut next_rank = vec![0u32; n];
    let mut k = 1usize;
    while classes < n {
        // Order by second key (rank[i + k], missing first), then stable sort by
        // first key.
        let mut p = 0;
        for i in n.saturating_sub(k)..n {
            order[p] = i as u32;
            p += 1;
        }
        for &j in sa.iter() {
            if j as usize >= k {
                order[p] = j - k as u32;
                p += 1;
            }
        }
        counting_sort(&mut sa, &order, &rank, &mut counts[..classes]);

        let key = |i: usize| (rank[i], if i + k < n { rank[i + k] as i64 } else { -1 });
        next_rank[sa[0] as usize] = 0;
        classes = 1;
        for i in 1..n {
            if key(sa[i] as usize) != key(sa[i - 1] as usize) {
                classes += 1;
            }
            next_rank[sa[i] as usize] = (classes - 1) as u32;
        }
        std::mem::swap(&mut rank, &mut next_rank);
        k *= 2;
    }
    sa
}

/// Stable counting sort of `input` positions by `key[pos]` into `out`.
fn counting_sort(out: &mut [u32], input: &[u32], key: &[u32], counts: &mut [usize]) {
    counts.fill(0);
    for &p in input {
        counts[key[p as usize] as usize] += 1;
    }
    let mut sum = 0;
    for c in counts.iter_mut() {
        let t = *c;
        *c = sum;
        sum += t;
    }
    for &p in input {
        let slot = &mut counts[key[p as usize] as usize];
        out[*slot] = p;
        *slot += 1;
    }
}

/// Kasai et al. linear-time LCP.
pub fn lcp_kasai(s: &[Symbol], sa: &[u32]) -> Vec<u32> {
    let n = s.len();
    let mut rank = vec![0usize; n];
    for (i, &p) in sa.iter().enumerate() {
        rank[p as usize] = i;
    }
    let mut lcp = vec![0u32; n];
    let mut h = 0usize;
    for i in 0..n {
        if rank[i] == 0 {
            h = 0;
            continue;
        }
        let j = sa[rank[i] - 1] as usize;
        while i + h < n && j + h < n && s[i + h] == s[j + h] {
            h += 1;
        }
        lcp[rank[i]] = h as u32;
        h = h.saturating_sub(1);
    }
    lcp
}
