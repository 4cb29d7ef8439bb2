use std::collections::HashSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use super::CorpusError;

/// Corrected issue type from the labelled dataset. Only [`IssueType::Bug`]
/// maps to the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum IssueType {
    Bug,
    Rfe,
    Impr,
    Doc,
    Refac,
    Backport,
    Cleanup,
    Spec,
    Task,
    Test,
    Other,
}

impl IssueType {
    pub const ALL: [IssueType; 11] = [
        IssueType::Bug,
        IssueType::Rfe,
        IssueType::Impr,
        IssueType::Doc,
        IssueType::Refac,
        IssueType::Backport,
        IssueType::Cleanup,
        IssueType::Spec,
        IssueType::Task,
        IssueType::Test,
        IssueType::Other,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            IssueType::Bug => "BUG",
            IssueType::Rfe => "RFE",
            IssueType::Impr => "IMPR",
            IssueType::Doc => "DOC",
            IssueType::Refac => "REFAC",
            IssueType::Backport => "BACKPORT",
            IssueType::Cleanup => "CLEANUP",
            IssueType::Spec => "SPEC",
            IssueType::Task => "TASK",
            IssueType::Test => "TEST",
            IssueType::Other => "OTHER",
        }
    }

    pub fn class(self) -> Class {
        if self == IssueType::Bug {
            Class::Bug
        } else {
            Class::NonBug
        }
    }
}

impl fmt::Display for IssueType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for IssueType {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        IssueType::ALL.into_iter().find(|t| t.as_str() == s).ok_or(())
    }
}

/// Binary class label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Class {
    NonBug,
    Bug,
}

impl Class {
    pub const BOTH: [Class; 2] = [Class::NonBug, Class::Bug];

    /// 0 for NONBUG, 1 for BUG.
    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    #[inline]
    pub fn from_index(i: usize) -> Class {
        if i == 1 {
            Class::Bug
        } else {
            Class::NonBug
        }
    }
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Class::Bug => "BUG",
            Class::NonBug => "NONBUG",
        })
    }
}

/// One row of the label CSV.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelRecord {
    pub project: String,
    pub report_id: String,
    /// Type as filed in the tracker; kept verbatim since trackers use open
    /// vocabularies here ("Bug", "New Feature", ...).
    pub original_type: String,
    pub corrected_type: IssueType,
    pub created_at: DateTime<Utc>,
}

pub const LABEL_COLUMNS: [&str; 5] = ["project", "report_id", "original_type", "corrected_type", "created_at"];

/// Reads a label CSV with header
/// `project,report_id,original_type,corrected_type,created_at`.
pub fn parse_labels(path: impl AsRef<Path>) -> Result<Vec<LabelRecord>, CorpusError> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_labels_from(file)
}

pub fn parse_labels_from<R: std::io::Read>(reader: R) -> Result<Vec<LabelRecord>, CorpusError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let mut idx = [0usize; 5];
    for (slot, name) in idx.iter_mut().zip(LABEL_COLUMNS) {
        *slot = headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CorpusError::MissingColumn(name.to_owned()))?;
    }

    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let field = |i: usize| rec.get(idx[i]).unwrap_or("");

        let project = field(0).to_owned();
        let report_id = field(1).to_owned();
        if report_id.is_empty() {
            return Err(CorpusError::EmptyField {
                line,
                field: "report_id",
            });
        }
        let corrected_raw = field(3);
        let corrected_type = corrected_raw
            .parse::<IssueType>()
            .map_err(|_| CorpusError::UnknownLabel {
                line,
                value: corrected_raw.to_owned(),
            })?;
        let ts = field(4);
        let created_at = DateTime::parse_from_rfc3339(ts)
            .map_err(|_| CorpusError::BadTimestamp {
                line,
                value: ts.to_owned(),
            })?
            .with_timezone(&Utc);

        if !seen.insert((project.clone(), report_id.clone())) {
            return Err(CorpusError::DuplicateId { project, report_id });
        }
        out.push(LabelRecord {
            project,
            report_id,
            original_type: field(2).to_owned(),
            corrected_type,
            created_at,
        });
    }
    Ok(out)
}
