//! Issue-tracker text retrieval with an on-disk cache.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FetchError {
    #[error("report {0} not found (404)")]
    NotFound(String),
    #[error("report {report_id}: {message}")]
    Http { report_id: String, message: String },
    #[error("report {report_id}: malformed response: {message}")]
    Malformed { report_id: String, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FetchOutcome {
    pub text: String,
    /// True when served from the cache without touching the network.
    pub cached: bool,
}

#[derive(Deserialize)]
struct IssueResponse {
    fields: IssueFields,
}

#[derive(Deserialize)]
struct IssueFields {
    summary: Option<String>,
    description: Option<String>,
}

/// Blocking client for `GET {base_url}/rest/api/2/issue/{id}`.
#[derive(Debug, Clone)]
pub struct Fetcher {
    agent: ureq::Agent,
    base_url: String,
    retries: u32,
    backoff: Duration,
}

impl Fetcher {
    pub fn new(base_url: impl Into<String>) -> Self {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(Duration::from_secs(60)))
            .build()
            .into();
        Fetcher {
            agent,
            base_url: base_url.into().trim_end_matches('/').to_owned(),
            retries: 3,
            backoff: Duration::from_secs(1),
        }
    }

    /// Initial retry delay; doubles after every failed attempt.
    pub fn with_backoff(mut self, backoff: Duration) -> Self {
        self.backoff = backoff;
        self
    }

    pub fn with_retries(mut self, retries: u32) -> Self {
        self.retries = retries;
        self
    }

    pub fn issue_url(&self, report_id: &str) -> String {
        format!(
            "{}/rest/api/2/issue/{}?fields=summary,description",
            self.base_url, report_id
        )
    }

    /// Returns the report text, from `cache_dir/{report_id}.txt` if present,
    /// otherwise from the tracker (and then caches it).
    pub fn fetch(&self, report_id: &str, cache_dir: &Path) -> Result<FetchOutcome, FetchError> {
        let path = cache_dir.join(format!("{report_id}.txt"));
        match std::fs::read_to_string(&path) {
            Ok(text) => return Ok(FetchOutcome { text, cached: true }),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {}
            Err(source) => return Err(FetchError::Io { path, source }),
        }
        let body = self.get_with_retry(report_id)?;
        let text = report_text(report_id, &body)?;
        write_atomic(cache_dir, &path, &text)?;
        Ok(FetchOutcome { text, cached: false })
    }

    fn get_with_retry(&self, report_id: &str) -> Result<String, FetchError> {
        let url = self.issue_url(report_id);
        let mut delay = self.backoff;
        let mut attempt = 0;
        loop {
            let message = match self.agent.get(&url).call() {
                Ok(mut resp) => {
                    let status = resp.status().as_u16();
                    if status == 404 {
                        return Err(FetchError::NotFound(report_id.to_owned()));
                    }
                    if (200..300).contains(&status) {
                        return resp.body_mut().read_to_string().map_err(|e| FetchError::Http {
                            report_id: report_id.to_owned(),
                            message: e.to_string(),
                        });
                    }
                    format!("HTTP status {status}")
                }
                Err(e) => e.to_string(),
            };
            if attempt >= self.retries {
                return Err(FetchError::Http {
                    report_id: report_id.to_owned(),
                    message: format!("{message} after {} attempts", attempt + 1),
                });
            }
            std::thread::sleep(delay);
            delay *= 2;
            attempt += 1;
        }
    }
}

/// Summary followed by the description on a new line; a null or empty
/// description contributes nothing.
fn report_text(report_id: &str, body: &str) -> Result<String, FetchError> {
    let issue: IssueResponse = serde_json::from_str(body).map_err(|e| FetchError::Malformed {
        report_id: report_id.to_owned(),
        message: e.to_string(),
    })?;
    let summary = issue.fields.summary.unwrap_or_default();
    let description = issue.fields.description.unwrap_or_default();
    Ok(match (summary.is_empty(), description.is_empty()) {
        (_, true) => summary,
        (true, false) => description,
        (false, false) => format!("{summary}\n{description}"),
    })
}

fn write_atomic(dir: &Path, path: &Path, text: &str) -> Result<(), FetchError> {
    let io = |source| FetchError::Io {
        path: path.to_path_buf(),
        source,
    };
    std::fs::create_dir_all(dir).map_err(io)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(text.as_bytes()).map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

/// Fetches with the default client settings.
pub fn fetch_report(base_url: &str, report_id: &str, cache_dir: &Path) -> Result<String, FetchError> {
    Fetcher::new(base_url).fetch(report_id, cache_dir).map(|o| o.text)
}

/// Fetches `(report_id, cache_dir)` jobs with at most `concurrency` requests in
/// flight. Results come back in job order.
pub fn fetch_all(
    fetcher: &Fetcher,
    jobs: &[(String, PathBuf)],
    concurrency: usize,
) -> Vec<Result<FetchOutcome, FetchError>> {
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<Result<FetchOutcome, FetchError>>>> = jobs.iter().map(|_| Mutex::new(None)).collect();
    std::thread::scope(|s| {
        for _ in 0..concurrency.clamp(1, jobs.len().max(1)) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some((id, dir)) = jobs.get(i) else { break };
                let r = fetcher.fetch(id, dir);
                *slots[i].lock().unwrap() = Some(r);
            });
        }
    });
    slots
        .into_iter()
        .map(|m| m.into_inner().unwrap().expect("every job visited"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn concatenates_fields() {
        let both = r#"{"fields":{"summary":"NPE in cache","description":"Steps: run"}}"#;
        assert_eq!(report_text("X", both).unwrap(), "NPE in cache\nSteps: run");
        let null_desc = r#"{"fields":{"summary":"NPE in cache","description":null}}"#;
        assert_eq!(report_text("X", null_desc).unwrap(), "NPE in cache");
        let empty_desc = r#"{"fields":{"summary":"NPE in cache","description":""}}"#;
        assert_eq!(report_text("X", empty_desc).unwrap(), "NPE in cache");
        let missing = r#"{"fields":{"summary":"only"}}"#;
        assert_eq!(report_text("X", missing).unwrap(), "only");
    }

    #[test]
    fn malformed_body() {
        assert!(matches!(report_text("X", "<html>"), Err(FetchError::Malformed { .. })));
    }

    #[test]
    fn cache_hit_skips_network() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("P-1.txt"), "cached body").unwrap();
        // Port 9 (discard) on localhost: any network attempt would fail.
        let f = Fetcher::new("http://127.0.0.1:9").with_retries(0);
        let out = f.fetch("P-1", dir.path()).unwrap();
        assert_eq!(
            out,
            FetchOutcome {
                text: "cached body".into(),
                cached: true
            }
        );
    }

    #[test]
    fn url_shape() {
        let f = Fetcher::new("https://issues.example.org/jira/");
        assert_eq!(
            f.issue_url("HTTPCLIENT-587"),
            "https://issues.example.org/jira/rest/api/2/issue/HTTPCLIENT-587?fields=summary,description"
        );
    }
}
