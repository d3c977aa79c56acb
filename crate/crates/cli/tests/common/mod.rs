#![allow(dead_code)]

use std::collections::{HashMap, HashSet};
use std::io::{Read, Write};
use std::net::TcpListener;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

pub const BIN: &str = env!("CARGO_BIN_EXE_ycbench");

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/w26")
}

pub fn fixture(name: &str) -> String {
    fixtures().join(name).to_string_lossy().into_owned()
}

pub struct Run {
    pub output: Output,
    pub elapsed: Duration,
}

impl Run {
    pub fn code(&self) -> i32 {
        self.output.status.code().unwrap_or(-1)
    }

    pub fn stdout(&self) -> String {
        String::from_utf8_lossy(&self.output.stdout).into_owned()
    }

    pub fn stderr(&self) -> String {
        String::from_utf8_lossy(&self.output.stderr).into_owned()
    }
}

pub fn ycbench<S: AsRef<std::ffi::OsStr>>(args: &[S]) -> Run {
    ycbench_env(args, &[])
}

pub fn ycbench_env<S: AsRef<std::ffi::OsStr>>(args: &[S], env: &[(&str, &str)]) -> Run {
    let mut cmd = Command::new(BIN);
    cmd.args(args)
        .env("NO_PROXY", "127.0.0.1,localhost")
        .env("no_proxy", "127.0.0.1,localhost")
        .env_remove("YCBENCH_SEARCH_API_KEY");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let start = Instant::now();
    let output = cmd.output().expect("spawn ycbench");
    Run {
        output,
        elapsed: start.elapsed(),
    }
}

/// The W26 scoring and evaluation pipeline into `dir`; returns the
/// (baseline, evaluate) runs.
pub fn run_results_pipeline(dir: &Path) -> (Run, Run) {
    let p = |n: &str| dir.join(n).to_string_lossy().into_owned();
    let score = ycbench(&[
        "score",
        "--roster",
        &fixture("roster.csv"),
        "--blocklist",
        &fixture("blocklist.txt"),
        "--traction",
        &fixture("traction.jsonl"),
        "--mentions",
        &fixture("mentions_batch.jsonl"),
        "--config",
        &fixture("config.toml"),
        "--out",
        &p("scores"),
    ]);
    assert_eq!(score.code(), 0, "score failed: {}", score.stderr());
    let baseline = ycbench(&[
        "baseline",
        "--pre-mentions",
        &fixture("mentions_pre.jsonl"),
        "--roster",
        &fixture("roster.csv"),
        "--blocklist",
        &fixture("blocklist.txt"),
        "--k",
        "20",
        "--out",
        &p("submission.json"),
    ]);
    let evaluate = ycbench(&[
        "evaluate",
        "--submission",
        &p("submission.json"),
        "--scores",
        &p("scores/scores.jsonl"),
        "--high-traction",
        &fixture("high_traction.txt"),
        "--roster",
        &fixture("roster.csv"),
        "--blocklist",
        &fixture("blocklist.txt"),
        "--resolved-at",
        "2026-03-17",
        "--out",
        &p("report.json"),
        "--truth-out",
        &p("truth.json"),
    ]);
    (baseline, evaluate)
}

/// Minimal HTTP stand-in for the search provider. Answers each query with
/// the count for the quoted domain and counts every request it serves.
pub struct MockSearch {
    pub endpoint: String,
    pub requests: Arc<AtomicUsize>,
}

impl MockSearch {
    pub fn spawn(counts: HashMap<String, u64>, failing: HashSet<String>) -> Self {
        let listener = TcpListener::bind("127.0.0.1:0").expect("bind mock");
        let endpoint = format!("http://{}/search.json", listener.local_addr().unwrap());
        let requests = Arc::new(AtomicUsize::new(0));
        let served = Arc::clone(&requests);
        let counts = Arc::new(counts);
        let failing = Arc::new(failing);
        std::thread::spawn(move || {
            for stream in listener.incoming() {
                let Ok(mut stream) = stream else { continue };
                let (counts, failing, served) = (Arc::clone(&counts), Arc::clone(&failing), Arc::clone(&served));
                std::thread::spawn(move || {
                    let mut buf = Vec::new();
                    let mut chunk = [0u8; 4096];
                    while !buf.windows(4).any(|w| w == b"\r\n\r\n") {
                        match stream.read(&mut chunk) {
                            Ok(0) | Err(_) => return,
                            Ok(n) => buf.extend_from_slice(&chunk[..n]),
                        }
                    }
                    served.fetch_add(1, Ordering::SeqCst);
                    let head = String::from_utf8_lossy(&buf);
                    let domain = query_domain(&head).unwrap_or_default();
                    let (status, body) = if failing.contains(&domain) {
                        ("500 Internal Server Error", r#"{"error":"upstream failure"}"#.to_string())
                    } else {
                        let n = counts.get(&domain).copied().unwrap_or(0);
                        ("200 OK", format!(r#"{{"search_information":{{"total_results":{n}}}}}"#))
                    };
                    let response = format!(
                        "HTTP/1.1 {status}\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
                        body.len()
                    );
                    let _ = stream.write_all(response.as_bytes());
                });
            }
        });
        Self { endpoint, requests }
    }

    pub fn requests(&self) -> usize {
        self.requests.load(Ordering::SeqCst)
    }
}

/// Pulls the domain out of `q=%22domain%22` in the request line.
fn query_domain(head: &str) -> Option<String> {
    let target = head.lines().next()?.split(' ').nth(1)?;
    let query = target.split_once('?')?.1;
    let q = query.split('&').find_map(|kv| kv.strip_prefix("q="))?;
    Some(q.replace("%22", "").replace('"', ""))
}

/// `collect` against a mock endpoint with a fast rate limit.
pub fn collect_with_mock(mock: &MockSearch, roster: &str, out: &Path, cache: &Path, extra: &[&str]) -> Run {
    let mut args = vec![
        "collect".to_string(),
        "--roster".into(),
        roster.into(),
        "--blocklist".into(),
        fixture("blocklist.txt"),
        "--window".into(),
        "2026-01-01..2026-03-17".into(),
        "--out".into(),
        out.to_string_lossy().into_owned(),
        "--cache-dir".into(),
        cache.to_string_lossy().into_owned(),
        "--max-requests-per-second".into(),
        "500".into(),
        "--max-in-flight".into(),
        "8".into(),
        "--endpoint".into(),
        mock.endpoint.clone(),
    ];
    args.extend(extra.iter().map(|s| s.to_string()));
    ycbench_env(&args, &[("YCBENCH_SEARCH_API_KEY", "test-key")])
}

pub fn fixture_counts(name: &str) -> HashMap<String, u64> {
    ycbench_core::ingest::load_mentions(&fixtures().join(name))
        .expect("fixture mentions")
        .into_iter()
        .map(|m| (m.domain, m.count))
        .collect()
}
