//! Report ingestion: label files, tokenization, and the concatenated token
//! stream the suffix index is built over.

mod fetch;
mod labels;
mod tokenize;

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use fetch::{fetch_all, fetch_report, FetchError, FetchOutcome, Fetcher};
pub use labels::{parse_labels, parse_labels_from, Class, IssueType, LabelRecord, LABEL_COLUMNS};
pub use tokenize::{tokenize, MAX_TOKEN_LEN};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("label file lacks required column `{0}`")]
    MissingColumn(String),
    #[error("line {line}: empty `{field}`")]
    EmptyField { line: u64, field: &'static str },
    #[error("line {line}: `{value}` is not an ISO-8601 timestamp")]
    BadTimestamp { line: u64, value: String },
    #[error("line {line}: unknown corrected type `{value}`")]
    UnknownLabel { line: u64, value: String },
    #[error("duplicate report id {project}/{report_id}")]
    DuplicateId { project: String, report_id: String },
    #[error("no text for report {0}")]
    MissingText(String),
    #[error("document {doc}: invalid token {token:?}")]
    InvalidToken { doc: DocId, token: String },
}

/// `(project, report_id)`; unique across a corpus.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DocId {
    pub project: String,
    pub report_id: String,
}

impl DocId {
    pub fn new(project: impl Into<String>, report_id: impl Into<String>) -> Self {
        DocId {
            project: project.into(),
            report_id: report_id.into(),
        }
    }
}

impl fmt::Display for DocId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.project, self.report_id)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub doc_id: DocId,
    pub tokens: Vec<String>,
    pub label: Class,
    pub created_at: DateTime<Utc>,
}

/// Symbol in the token stream. Values below `num_docs` are sentinels (one per
/// document, in document order); the rest index the sorted vocabulary, so
/// symbol order agrees with token string order and every sentinel sorts
/// before every real token.
pub type Symbol = u32;

pub type Timestamp = DateTime<Utc>;

/// Immutable collection of documents plus the sentinel-separated token stream.
#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    documents: Vec<Document>,
    vocab: Vec<String>,
    token_stream: Vec<Symbol>,
    doc_offsets: Vec<usize>,
}

impl Corpus {
    /// Builds the token stream over `documents`, keeping their order.
    pub fn from_documents(documents: Vec<Document>) -> Result<Corpus, CorpusError> {
        let mut ids = HashSet::with_capacity(documents.len());
        for d in &documents {
            if !ids.insert(&d.doc_id) {
                return Err(CorpusError::DuplicateId {
                    project: d.doc_id.project.clone(),
                    report_id: d.doc_id.report_id.clone(),
                });
            }
            if let Some(bad) = d.tokens.iter().find(|t| !tokenize::is_valid_token(t)) {
                return Err(CorpusError::InvalidToken {
                    doc: d.doc_id.clone(),
                    token: bad.clone(),
                });
            }
        }

        let mut vocab: Vec<String> = documents
            .iter()
            .flat_map(|d| d.tokens.iter().cloned())
            .collect::<HashSet<_>>()
            .into_iter()
            .collect();
        vocab.sort_unstable();
        let base = documents.len();
        let index: HashMap<&str, Symbol> = vocab
            .iter()
            .enumerate()
            .map(|(i, t)| (t.as_str(), (base + i) as Symbol))
            .collect();

        let total = documents.iter().map(|d| d.tokens.len() + 1).sum();
        let mut token_stream = Vec::with_capacity(total);
        let mut doc_offsets = Vec::with_capacity(documents.len());
        for (i, d) in documents.iter().enumerate() {
            doc_offsets.push(token_stream.len());
            token_stream.extend(d.tokens.iter().map(|t| index[t.as_str()]));
            token_stream.push(i as Symbol);
        }

        Ok(Corpus {
            documents,
            vocab,
            token_stream,
            doc_offsets,
        })
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    /// Distinct tokens in ascending order.
    pub fn vocab(&self) -> &[String] {
        &self.vocab
    }

    pub fn token_stream(&self) -> &[Symbol] {
        &self.token_stream
    }

    pub fn doc_offsets(&self) -> &[usize] {
        &self.doc_offsets
    }

    #[inline]
    pub fn is_sentinel(&self, sym: Symbol) -> bool {
        (sym as usize) < self.documents.len()
    }

    /// The token a symbol stands for, `None` for sentinels.
    pub fn token(&self, sym: Symbol) -> Option<&str> {
        let i = (sym as usize).checked_sub(self.documents.len())?;
        self.vocab.get(i).map(String::as_str)
    }

    pub fn symbol(&self, token: &str) -> Option<Symbol> {
        self.vocab
            .binary_search_by(|t| t.as_str().cmp(token))
            .ok()
            .map(|i| (i + self.documents.len()) as Symbol)
    }

    /// Symbols of document `i`, excluding its trailing sentinel.
    pub fn doc_symbols(&self, i: usize) -> &[Symbol] {
        let start = self.doc_offsets[i];
        &self.token_stream[start..start + self.documents[i].tokens.len()]
    }

    pub fn timestamps(&self) -> HashMap<DocId, DateTime<Utc>> {
        self.documents
            .iter()
            .map(|d| (d.doc_id.clone(), d.created_at))
            .collect()
    }

    pub fn class_counts(&self) -> [usize; 2] {
        let mut c = [0; 2];
        for d in &self.documents {
            c[d.label.index()] += 1;
        }
        c
    }
}

/// Tokenizes the text of every labelled report, in label order.
/// `texts` is keyed by report id.
pub fn build_corpus(labels: &[LabelRecord], texts: &HashMap<String, String>) -> Result<Corpus, CorpusError> {
    let docs = labels
        .iter()
        .map(|l| {
            let raw = texts
                .get(&l.report_id)
                .ok_or_else(|| CorpusError::MissingText(l.report_id.clone()))?;
            Ok(Document {
                doc_id: DocId::new(&l.project, &l.report_id),
                tokens: tokenize(raw),
                label: l.corrected_type.class(),
                created_at: l.created_at,
            })
        })
        .collect::<Result<Vec<_>, CorpusError>>()?;
    Corpus::from_documents(docs)
}

/// Concatenates corpora in order (the cross-project dataset).
pub fn merge_corpora(corpora: &[Corpus]) -> Result<Corpus, CorpusError> {
    let docs = corpora.iter().flat_map(|c| c.documents.iter().cloned()).collect();
    Corpus::from_documents(docs)
}

/// Path of a report's cached text: `<cache_root>/<project>/<report_id>.txt`.
pub fn cache_path(cache_root: &Path, project: &str, report_id: &str) -> PathBuf {
    cache_root.join(project).join(format!("{report_id}.txt"))
}

/// Loads every cached text that exists for `labels`. Missing files are
/// simply absent from the map; [`build_corpus`] reports them.
pub fn read_cached_texts(labels: &[LabelRecord], cache_root: &Path) -> Result<HashMap<String, String>, CorpusError> {
    let mut out = HashMap::with_capacity(labels.len());
    for l in labels {
        let path = cache_path(cache_root, &l.project, &l.report_id);
        match std::fs::read_to_string(&path) {
            Ok(text) => {
                out.insert(l.report_id.clone(), text);
            }
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {}
            Err(source) => return Err(CorpusError::Io { path, source }),
        }
    }
    Ok(out)
}
