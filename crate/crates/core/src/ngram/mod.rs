//! N-gram key-term extraction: enumeration over an enhanced suffix array,
//! N-gram IDF weighting, and the ranked dictionary.

mod enumerate;
mod io;
mod suffix;

use std::cmp::Ordering;
use std::collections::HashMap;

use crate::corpus::{Corpus, Symbol};
use crate::num::Real;

pub use enumerate::{compute_sdf, enumerate_ngrams, NGramCount};
pub use io::{read_dictionary, read_dictionary_from, write_dictionary, write_dictionary_to, DictionaryIoError};
pub use suffix::{lcp_kasai, suffix_array, SuffixIndex};

pub const DEFAULT_NMAX: usize = 10;

/// N-gram IDF weight, `log2(num_docs * df / sdf^2)`.
///
/// For a unigram `sdf == df` and this is plain IDF, `log2(num_docs / df)`.
/// A phrase scores high when it occurs as a phrase (df) nearly as often as
/// its words co-occur at all (sdf).
pub fn weight<F: Real>(df: u32, sdf: u32, num_docs: usize) -> F {
    debug_assert!(df >= 1 && sdf >= df && num_docs >= sdf as usize);
    let sdf = F::from_count(sdf as usize);
    (F::from_count(num_docs) * F::from_count(df as usize) / (sdf * sdf)).log2()
}

#[derive(Debug, Clone, PartialEq)]
pub struct NGramEntry<F> {
    pub tokens: Vec<String>,
    pub gtf: u64,
    pub df: u32,
    pub sdf: u32,
    pub weight: F,
}

impl<F: Real> NGramEntry<F> {
    pub fn n(&self) -> usize {
        self.tokens.len()
    }

    pub fn phrase(&self) -> String {
        self.tokens.join(" ")
    }
}

/// Ranked key-term list: descending weight, then descending gtf, then tokens.
#[derive(Debug, Clone)]
pub struct Dictionary<F> {
    entries: Vec<NGramEntry<F>>,
    term_index: HashMap<Vec<String>, usize>,
}

impl<F: Real> PartialEq for Dictionary<F> {
    fn eq(&self, other: &Self) -> bool {
        self.entries == other.entries
    }
}

pub(crate) fn rank_order<F: Real>(a: &NGramEntry<F>, b: &NGramEntry<F>) -> Ordering {
    b.weight
        .partial_cmp(&a.weight)
        .unwrap_or(Ordering::Equal)
        .then(b.gtf.cmp(&a.gtf))
        .then_with(|| a.tokens.cmp(&b.tokens))
}

#[derive(Debug, thiserror::Error)]
#[error("duplicate n-gram `{0}`")]
pub struct DuplicateNGram(pub String);

impl<F: Real> Dictionary<F> {
    /// Sorts `entries` into rank order.
    pub fn from_entries(mut entries: Vec<NGramEntry<F>>) -> Result<Self, DuplicateNGram> {
        entries.sort_by(rank_order);
        Self::from_ranked(entries)
    }

    /// Keeps the given order, which is taken to be the ranking.
    pub fn from_ranked(entries: Vec<NGramEntry<F>>) -> Result<Self, DuplicateNGram> {
        let mut term_index = HashMap::with_capacity(entries.len());
        for (i, e) in entries.iter().enumerate() {
            if term_index.insert(e.tokens.clone(), i).is_some() {
                return Err(DuplicateNGram(e.phrase()));
            }
        }
        Ok(Dictionary { entries, term_index })
    }

    pub fn entries(&self) -> &[NGramEntry<F>] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Ordinal of a term.
    pub fn ordinal<S: AsRef<str>>(&self, tokens: &[S]) -> Option<usize> {
        let key: Vec<String> = tokens.iter().map(|t| t.as_ref().to_owned()).collect();
        self.term_index.get(&key).copied()
    }

    pub fn get<S: AsRef<str>>(&self, tokens: &[S]) -> Option<&NGramEntry<F>> {
        self.ordinal(tokens).map(|i| &self.entries[i])
    }

    pub fn max_n(&self) -> usize {
        self.entries.iter().map(NGramEntry::n).max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DictionaryOptions<F> {
    pub nmax: usize,
    /// Drop N-grams that never occur outside one of their super-N-grams.
    pub prune: bool,
    /// Drop entries weighted below this.
    pub min_weight: Option<F>,
}

impl<F: Real> Default for DictionaryOptions<F> {
    fn default() -> Self {
        DictionaryOptions {
            nmax: DEFAULT_NMAX,
            prune: true,
            min_weight: None,
        }
    }
}

/// Sizes at each filtering stage of a dictionary build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BuildStats {
    pub enumerated: usize,
    pub after_df_filter: usize,
    pub after_prune: usize,
    pub final_size: usize,
}

pub fn build_dictionary<F: Real>(corpus: &Corpus, nmax: usize, prune: bool) -> Dictionary<F> {
    build_dictionary_with(
        corpus,
        &DictionaryOptions {
            nmax,
            prune,
            min_weight: None,
        },
    )
    .0
}

/// Enumerate, compute sdf, weight, drop df < 2, optionally prune dominated
/// N-grams, then rank.
pub fn build_dictionary_with<F: Real>(corpus: &Corpus, opts: &DictionaryOptions<F>) -> (Dictionary<F>, BuildStats) {
    let mut stats = BuildStats::default();
    if corpus.is_empty() {
        return (Dictionary::from_ranked(Vec::new()).unwrap(), stats);
    }
    let index = SuffixIndex::build(corpus);
    let counts = enumerate_ngrams(&index, corpus, opts.nmax);
    stats.enumerated = counts.len();

    let dominated = if opts.prune {
        dominated_ngrams(&counts)
    } else {
        vec![false; counts.len()]
    };
    stats.after_df_filter = counts.iter().filter(|c| c.df >= 2).count();

    let kept: Vec<NGramCount> = counts
        .into_iter()
        .zip(dominated)
        .filter(|(c, dom)| c.df >= 2 && !dom)
        .map(|(c, _)| c)
        .collect();
    stats.after_prune = kept.len();

    let sdf = compute_sdf(&kept, corpus);
    let num_docs = corpus.len();
    let entries: Vec<NGramEntry<F>> = kept
        .into_iter()
        .zip(sdf)
        .map(|(c, sdf)| NGramEntry {
            tokens: c
                .symbols
                .iter()
                .map(|&s| corpus.token(s).expect("no sentinel inside an n-gram").to_owned())
                .collect(),
            gtf: c.gtf,
            df: c.df,
            sdf,
            weight: weight(c.df, sdf, num_docs),
        })
        .filter(|e| opts.min_weight.is_none_or(|w| e.weight >= w))
        .collect();
    stats.final_size = entries.len();
    let dict = Dictionary::from_entries(entries).expect("enumeration yields distinct n-grams");
    (dict, stats)
}

/// Marks each N-gram that has a strict super-N-gram with identical gtf and
/// df. It is enough to look at one-token extensions: for `g ⊂ h ⊂ g'` both
/// statistics are monotone, so equality with `g'` forces equality with the
/// one-token extension `h`, which is itself enumerated.
fn dominated_ngrams(counts: &[NGramCount]) -> Vec<bool> {
    let index: HashMap<&[Symbol], usize> = counts
        .iter()
        .enumerate()
        .map(|(i, c)| (c.symbols.as_slice(), i))
        .collect();
    let mut dominated = vec![false; counts.len()];
    for c in counts.iter().filter(|c| c.symbols.len() >= 2) {
        let n = c.symbols.len();
        for sub in [&c.symbols[..n - 1], &c.symbols[1..]] {
            if let Some(&j) = index.get(sub) {
                if counts[j].gtf == c.gtf && counts[j].df == c.df {
                    dominated[j] = true;
                }
            }
        }
    }
    dominated
}
