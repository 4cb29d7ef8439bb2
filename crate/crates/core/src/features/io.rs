//! Feature files: one row per document, `label ordinal:value ...` with label
//! 1 for BUG and 0 otherwise and 1-based ascending ordinals. Companion files
//! `<stem>.docids` (`project<TAB>report_id` per row) and `<stem>.names`
//! (one feature name per ordinal) sit next to it.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::{FeatureError, FeatureRow, SparseFeatureMatrix};
use crate::corpus::{Class, DocId};
use crate::num::Real;

/// `(docids, names)` paths for a feature file.
pub fn companion_paths(path: &Path) -> (PathBuf, PathBuf) {
    (path.with_extension("docids"), path.with_extension("names"))
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> FeatureError + '_ {
    move |source| FeatureError::Io {
        path: path.display().to_string(),
        source,
    }
}

pub fn write_features<F: Real>(m: &SparseFeatureMatrix<F>, path: &Path) -> Result<(), FeatureError> {
    let (ids_path, names_path) = companion_paths(path);
    let mut body = String::new();
    let mut ids = String::new();
    for r in &m.rows {
        body.push(if r.label == Class::Bug { '1' } else { '0' });
        for &(o, v) in &r.values {
            let _ = write!(body, " {}:{}", o + 1, v);
        }
        body.push('\n');
        let _ = writeln!(ids, "{}\t{}", r.doc_id.project, r.doc_id.report_id);
    }
    let mut names = String::new();
    for n in &m.feature_names {
        names.push_str(n);
        names.push('\n');
    }
    fs::write(path, body).map_err(io_err(path))?;
    fs::write(&ids_path, ids).map_err(io_err(&ids_path))?;
    fs::write(&names_path, names).map_err(io_err(&names_path))?;
    Ok(())
}

pub fn read_features<F: Real>(path: &Path) -> Result<SparseFeatureMatrix<F>, FeatureError> {
    let (ids_path, names_path) = companion_paths(path);
    let body = fs::read_to_string(path).map_err(io_err(path))?;
    let ids = fs::read_to_string(&ids_path).map_err(io_err(&ids_path))?;
    let names = fs::read_to_string(&names_path).map_err(io_err(&names_path))?;

    let feature_names: Vec<String> = names.lines().map(str::to_owned).collect();
    let num_features = feature_names.len();
    let shown = path.display().to_string();
    let parse_err = |file: &str, line: usize, message: String| FeatureError::Parse {
        path: file.to_owned(),
        line,
        message,
    };

    let doc_ids: Vec<DocId> = ids
        .lines()
        .enumerate()
        .map(|(i, l)| {
            l.split_once('\t').map(|(p, r)| DocId::new(p, r)).ok_or_else(|| {
                parse_err(
                    &ids_path.display().to_string(),
                    i + 1,
                    "expected project<TAB>report_id".into(),
                )
            })
        })
        .collect::<Result<_, _>>()?;

    let mut rows = Vec::new();
    for (i, line) in body.lines().enumerate() {
        let lineno = i + 1;
        let mut parts = line.split_ascii_whitespace();
        let label = match parts.next() {
            Some("1") => Class::Bug,
            Some("0") => Class::NonBug,
            other => return Err(parse_err(&shown, lineno, format!("bad label {other:?}"))),
        };
        let mut values = Vec::new();
        let mut prev = 0usize;
        for tok in parts {
            let (o, v) = tok
                .split_once(':')
                .ok_or_else(|| parse_err(&shown, lineno, format!("bad pair `{tok}`")))?;
            let o: usize = o
                .parse()
                .map_err(|_| parse_err(&shown, lineno, format!("bad ordinal `{o}`")))?;
            if o <= prev || o > num_features {
                return Err(parse_err(&shown, lineno, format!("ordinal {o} out of order or range")));
            }
            prev = o;
            let v: F = v
                .parse()
                .map_err(|_| parse_err(&shown, lineno, format!("bad value `{v}`")))?;
            values.push(((o - 1) as u32, v));
        }
        let doc_id = doc_ids
            .get(i)
            .cloned()
            .ok_or_else(|| parse_err(&ids_path.display().to_string(), lineno, "missing doc id".into()))?;
        rows.push(FeatureRow { doc_id, label, values });
    }
    if doc_ids.len() != rows.len() {
        return Err(parse_err(
            &ids_path.display().to_string(),
            rows.len() + 1,
            format!("{} doc ids for {} rows", doc_ids.len(), rows.len()),
        ));
    }
    SparseFeatureMatrix::new(rows, feature_names)
}
