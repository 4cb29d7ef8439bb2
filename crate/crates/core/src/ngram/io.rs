//! Dictionary TSV: header `rank ngram n gtf df sdf weight` (tab-separated),
//! one entry per line in rank order, weight with six decimals.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use thiserror::Error;

use super::{Dictionary, NGramEntry};
use crate::num::Real;

pub const HEADER: &str = "rank\tngram\tn\tgtf\tdf\tsdf\tweight";

#[derive(Debug, Error)]
pub enum DictionaryIoError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub fn write_dictionary<F: Real>(dict: &Dictionary<F>, path: impl AsRef<Path>) -> Result<(), DictionaryIoError> {
    let mut w = BufWriter::new(File::create(path)?);
    write_dictionary_to(dict, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn write_dictionary_to<F: Real, W: Write>(dict: &Dictionary<F>, w: &mut W) -> std::io::Result<()> {
    writeln!(w, "{HEADER}")?;
    for (i, e) in dict.entries().iter().enumerate() {
        writeln!(
            w,
            "{}\t{}\t{}\t{}\t{}\t{}\t{:.6}",
            i + 1,
            e.phrase(),
            e.n(),
            e.gtf,
            e.df,
            e.sdf,
            e.weight
        )?;
    }
    Ok(())
}

pub fn read_dictionary<F: Real>(path: impl AsRef<Path>) -> Result<Dictionary<F>, DictionaryIoError> {
    read_dictionary_from(File::open(path)?)
}

/// Entries keep file order; ranks must run 1, 2, 3, ...
pub fn read_dictionary_from<F: Real, R: Read>(r: R) -> Result<Dictionary<F>, DictionaryIoError> {
    let mut lines = BufReader::new(r).lines();
    let err = |line: usize, message: String| DictionaryIoError::Parse { line, message };
    let header = lines.next().transpose()?.unwrap_or_default();
    if header.trim_end_matches('\r') != HEADER {
        return Err(err(1, format!("expected header `{HEADER}`")));
    }
    let mut entries = Vec::new();
    for (i, line) in lines.enumerate() {
        let lineno = i + 2;
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 7 {
            return Err(err(lineno, format!("expected 7 fields, found {}", fields.len())));
        }
        fn num<T: std::str::FromStr>(s: &str, name: &str, line: usize) -> Result<T, DictionaryIoError> {
            s.parse().map_err(|_| DictionaryIoError::Parse {
                line,
                message: format!("bad {name} `{s}`"),
            })
        }
        let rank: usize = num(fields[0], "rank", lineno)?;
        if rank != entries.len() + 1 {
            return Err(err(lineno, format!("rank {rank} out of sequence")));
        }
        let tokens: Vec<String> = fields[1].split(' ').map(str::to_owned).collect();
        if tokens
            .iter()
            .any(|t| !crate::corpus::tokenize(t).eq(std::slice::from_ref(t)))
        {
            return Err(err(lineno, format!("bad ngram `{}`", fields[1])));
        }
        let n: usize = num(fields[2], "n", lineno)?;
        if n != tokens.len() {
            return Err(err(lineno, format!("n = {n} but ngram has {} tokens", tokens.len())));
        }
        let e = NGramEntry {
            tokens,
            gtf: num(fields[3], "gtf", lineno)?,
            df: num(fields[4], "df", lineno)?,
            sdf: num(fields[5], "sdf", lineno)?,
            weight: num(fields[6], "weight", lineno)?,
        };
        if e.df < 1 || e.gtf < e.df as u64 || e.sdf < e.df {
            return Err(err(lineno, "statistics violate sdf >= df >= 1, gtf >= df".into()));
        }
        entries.push(e);
    }
    Dictionary::from_ranked(entries).map_err(|dup| DictionaryIoError::Parse {
        line: 0,
        message: dup.to_string(),
    })
}
