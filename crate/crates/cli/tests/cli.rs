mod common;

use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::Path;

use common::*;
use serde_json::Value;

fn read_json(path: &Path) -> Value {
    serde_json::from_slice(&fs::read(path).unwrap()).unwrap()
}

fn blocklisted() -> HashSet<String> {
    fs::read_to_string(fixtures().join("blocklist.txt"))
        .unwrap()
        .lines()
        .map(|l| l.split('#').next().unwrap().trim().to_string())
        .filter(|l| !l.is_empty())
        .collect()
}

/// Recomputes the W26 leaderboard straight from the fixture files with the
/// default signal table, independent of the library's scoring code.
fn spreadsheet_top(n: usize) -> Vec<String> {
    let weight = |kind: &str| match kind {
        "ARR_REVENUE" => 1.00,
        "PILOT_REVENUE" => 0.50,
        "LOI_SIGNED_CONTRACTS" => 0.20,
        "ACTIVE_USERS" => 0.40,
        "ACTIVITY_VOLUME" => 0.25,
        "SIGNUPS" => 0.15,
        "ECOSYSTEM_PULL" => 0.10,
        other => panic!("unknown kind {other}"),
    };
    let divisor = |unit: &str| match unit {
        "usd" => 1000.0,
        "usd_k" => 1.0,
        "count" => 100.0,
        other => panic!("unknown unit {other}"),
    };
    // domain -> (best weighted value, growth of that observation)
    let mut traction: HashMap<String, (f64, Option<f64>)> = HashMap::new();
    for line in fs::read_to_string(fixtures().join("traction.jsonl")).unwrap().lines() {
        let o: Value = serde_json::from_str(line).unwrap();
        let v = weight(o["kind"].as_str().unwrap()) * o["raw_value"].as_f64().unwrap() / divisor(o["unit"].as_str().unwrap());
        let g = o["mom_growth"].as_f64();
        let e = traction.entry(o["domain"].as_str().unwrap().to_string()).or_insert((f64::MIN, None));
        if v > e.0 {
            *e = (v, g);
        }
    }
    let blocked = blocklisted();
    let mut rows: Vec<(f64, u64, String)> = Vec::new();
    for line in fs::read_to_string(fixtures().join("mentions_batch.jsonl")).unwrap().lines() {
        let m: Value = serde_json::from_str(line).unwrap();
        let domain = m["domain"].as_str().unwrap().to_string();
        if blocked.contains(&domain) {
            continue;
        }
        let count = m["count"].as_u64().unwrap();
        let attention = 0.05 * count as f64;
        let t = traction.get(&domain).map(|&(v, g)| match g {
            Some(g) if g > 0.0 => v * (1.0 + 10.0 * g),
            _ => v,
        });
        rows.push((t.map_or(attention, |t| t.max(attention)), count, domain));
    }
    rows.sort_by(|a, b| b.0.total_cmp(&a.0).then(b.1.cmp(&a.1)).then(a.2.cmp(&b.2)));
    rows.into_iter().take(n).map(|r| r.2).collect()
}

#[test]
fn leaderboard_top20_matches_independent_recompute() {
    let dir = tempfile::tempdir().unwrap();
    let (_, eval) = run_results_pipeline(dir.path());
    assert_eq!(eval.code(), 0, "{}", eval.stderr());
    let leaderboard = fs::read_to_string(dir.path().join("scores/leaderboard.csv")).unwrap();
    let mut lines = leaderboard.lines();
    assert_eq!(lines.next(), Some("rank,domain,score,driver,dominant_signal"));
    let top: Vec<String> = lines.take(20).map(|l| l.split(',').nth(1).unwrap().to_string()).collect();
    let expected = spreadsheet_top(20);
    assert_eq!(top, expected);
    let truth = read_json(&dir.path().join("truth.json"));
    let truth_top: Vec<String> = truth["top_k_domains"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap().to_string())
        .collect();
    assert_eq!(truth_top, expected);
}

#[test]
fn score_outputs_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    run_results_pipeline(dir.path());
    let manifest = read_json(&dir.path().join("scores/manifest.json"));
    assert_eq!(manifest["command"], "score");
    assert!(manifest["config_fingerprint"].as_str().unwrap().len() == 64);
    let outputs: Vec<&str> = manifest["output_paths"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    assert!(outputs.iter().any(|p| p.ends_with("scores.jsonl")));
    assert!(outputs.iter().any(|p| p.ends_with("leaderboard.csv")));
    let scores = fs::read_to_string(dir.path().join("scores/scores.jsonl")).unwrap();
    assert_eq!(scores.lines().count(), 184);
    assert!(!scores.contains("hello.so"));
}

#[test]
fn empty_traction_means_all_attention() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("traction.jsonl");
    fs::write(&empty, "").unwrap();
    let out = dir.path().join("scores");
    let run = ycbench(&[
        "score",
        "--roster",
        &fixture("roster.csv"),
        "--blocklist",
        &fixture("blocklist.txt"),
        "--traction",
        &empty.to_string_lossy(),
        "--mentions",
        &fixture("mentions_batch.jsonl"),
        "--out",
        &out.to_string_lossy(),
    ]);
    assert_eq!(run.code(), 0, "{}", run.stderr());
    let csv = fs::read_to_string(out.join("leaderboard.csv")).unwrap();
    assert!(csv.lines().skip(1).all(|l| l.split(',').nth(3) == Some("ATTENTION")));
}

#[test]
fn bad_config_lists_violations() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.toml");
    fs::write(&config, "weight.arr_revenue = 0.0\nattention_weight = -1\ntop_fraction = 2\n").unwrap();
    let run = ycbench(&[
        "score",
        "--roster",
        &fixture("roster.csv"),
        "--traction",
        &fixture("traction.jsonl"),
        "--mentions",
        &fixture("mentions_batch.jsonl"),
        "--config",
        &config.to_string_lossy(),
        "--out",
        &dir.path().join("o").to_string_lossy(),
    ]);
    assert_eq!(run.code(), 1);
    let err = run.stderr();
    for field in ["weight.arr_revenue", "attention_weight", "top_fraction"] {
        assert!(err.contains(field), "missing {field} in: {err}");
    }
    assert!(!dir.path().join("o").exists());
}

#[test]
fn unknown_config_key_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.toml");
    fs::write(&config, "attention_wieght = 0.1\n").unwrap();
    let run = ycbench(&[
        "score",
        "--roster",
        &fixture("roster.csv"),
        "--traction",
        &fixture("traction.jsonl"),
        "--mentions",
        &fixture("mentions_batch.jsonl"),
        "--config",
        &config.to_string_lossy(),
        "--out",
        &dir.path().join("o").to_string_lossy(),
    ]);
    assert_eq!(run.code(), 1);
    assert!(run.stderr().contains("attention_wieght"), "{}", run.stderr());
}

#[test]
fn traction_error_reports_file_and_line() {
    let dir = tempfile::tempdir().unwrap();
    let traction = dir.path().join("t.jsonl");
    fs::write(
        &traction,
        "{\"domain\":\"nimbusos.dev\",\"kind\":\"ARR_REVENUE\",\"raw_value\":1.0,\"unit\":\"usd\",\"as_of\":\"2026-03-01\",\"source\":\"x\"}\n\
         {\"domain\":\"nimbusos.dev\",\"kind\":\"ARR_REVENUE\",\"raw_value\":1.0,\"unit\":\"eur\",\"as_of\":\"2026-03-01\",\"source\":\"x\"}\n",
    )
    .unwrap();
    let run = ycbench(&[
        "score",
        "--roster",
        &fixture("roster.csv"),
        "--traction",
        &traction.to_string_lossy(),
        "--mentions",
        &fixture("mentions_batch.jsonl"),
        "--out",
        &dir.path().join("o").to_string_lossy(),
    ]);
    assert_eq!(run.code(), 1);
    assert!(run.stderr().contains("t.jsonl:2"), "{}", run.stderr());
}

#[test]
fn submission_equal_to_truth_scores_one() {
    let dir = tempfile::tempdir().unwrap();
    run_results_pipeline(dir.path());
    let truth = read_json(&dir.path().join("truth.json"));
    let submission = serde_json::json!({
        "predictor_name": "oracle",
        "batch": "W26",
        "created_at": "2026-03-17T00:00:00Z",
        "ranked_domains": truth["top_k_domains"],
    });
    let sub = dir.path().join("oracle.json");
    fs::write(&sub, submission.to_string()).unwrap();
    let out = dir.path().join("oracle_report.json");
    let run = ycbench(&[
        "evaluate",
        "--submission",
        &sub.to_string_lossy(),
        "--truth",
        &dir.path().join("truth.json").to_string_lossy(),
        "--out",
        &out.to_string_lossy(),
    ]);
    assert_eq!(run.code(), 0, "{}", run.stderr());
    assert_eq!(read_json(&out)["precision_at_k"], 1.0);
    assert!(run.stdout().contains("Precision@20"));
    assert!(dir.path().join("oracle_report.manifest.json").exists());
}

#[test]
fn truth_file_k_mismatch_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    run_results_pipeline(dir.path());
    let run = ycbench(&[
        "evaluate",
        "--submission",
        &dir.path().join("submission.json").to_string_lossy(),
        "--truth",
        &dir.path().join("truth.json").to_string_lossy(),
        "--k",
        "10",
    ]);
    assert_eq!(run.code(), 1);
}

#[test]
fn malformed_submission_reports_location() {
    let dir = tempfile::tempdir().unwrap();
    run_results_pipeline(dir.path());
    let sub = dir.path().join("broken.json");
    fs::write(&sub, "{\n  \"predictor_name\": \"x\",\n  \"batch\": \"W26\"\n  \"ranked_domains\": []\n}\n").unwrap();
    let run = ycbench(&[
        "evaluate",
        "--submission",
        &sub.to_string_lossy(),
        "--truth",
        &dir.path().join("truth.json").to_string_lossy(),
    ]);
    assert_eq!(run.code(), 1);
    assert!(run.stderr().contains("broken.json:4"), "{}", run.stderr());
}

#[test]
fn submission_with_excluded_domain_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    run_results_pipeline(dir.path());
    let mut sub = read_json(&dir.path().join("submission.json"));
    sub["ranked_domains"][0] = Value::from("hello.so");
    let path = dir.path().join("sub.json");
    fs::write(&path, sub.to_string()).unwrap();
    let run = ycbench(&[
        "evaluate",
        "--submission",
        &path.to_string_lossy(),
        "--scores",
        &dir.path().join("scores/scores.jsonl").to_string_lossy(),
        "--high-traction",
        &fixture("high_traction.txt"),
        "--roster",
        &fixture("roster.csv"),
        "--blocklist",
        &fixture("blocklist.txt"),
        "--resolved-at",
        "2026-03-17",
    ]);
    assert_eq!(run.code(), 1);
    assert!(run.stderr().contains("hello.so"), "{}", run.stderr());
}

#[test]
fn baseline_submission_shape() {
    let dir = tempfile::tempdir().unwrap();
    let (baseline, _) = run_results_pipeline(dir.path());
    assert_eq!(baseline.code(), 0);
    let sub = read_json(&dir.path().join("submission.json"));
    assert_eq!(sub["predictor_name"], "google-mentions-pre-deadline");
    assert_eq!(sub["batch"], "W26");
    assert_eq!(sub["created_at"], "2025-11-01T00:00:00Z");
    assert_eq!(sub["ranked_domains"].as_array().unwrap().len(), 20);
}

#[test]
fn baseline_k_defaults_to_top_fraction_of_roster() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.json");
    let run = ycbench(&[
        "baseline",
        "--pre-mentions",
        &fixture("mentions_pre.jsonl"),
        "--roster",
        &fixture("roster.csv"),
        "--blocklist",
        &fixture("blocklist.txt"),
        "--out",
        &out.to_string_lossy(),
    ]);
    assert_eq!(run.code(), 0, "{}", run.stderr());
    assert_eq!(read_json(&out)["ranked_domains"].as_array().unwrap().len(), 20);
}

fn write_mentions(path: &Path, counts: &[u64]) {
    let text: String = counts
        .iter()
        .enumerate()
        .map(|(i, c)| {
            format!(
                "{{\"domain\":\"s{i}.com\",\"window_start\":\"2026-01-01\",\"window_end\":\"2026-03-17\",\"count\":{c},\"query\":\"\\\"s{i}.com\\\"\",\"retrieved_at\":\"2026-03-18T12:00:00Z\"}}\n"
            )
        })
        .collect();
    fs::write(path, text).unwrap();
}

#[test]
fn analyze_uniform_is_zero_gini() {
    let dir = tempfile::tempdir().unwrap();
    let mentions = dir.path().join("m.jsonl");
    write_mentions(&mentions, &[40; 10]);
    let out = dir.path().join("a");
    let run = ycbench(&["analyze", "--mentions", &mentions.to_string_lossy(), "--out-dir", &out.to_string_lossy()]);
    assert_eq!(run.code(), 0, "{}", run.stderr());
    assert_eq!(read_json(&out.join("concentration.json"))["gini"], 0.0);
}

#[test]
fn analyze_all_zero_is_not_applicable() {
    let dir = tempfile::tempdir().unwrap();
    let mentions = dir.path().join("m.jsonl");
    write_mentions(&mentions, &[0; 5]);
    let out = dir.path().join("a");
    let run = ycbench(&["analyze", "--mentions", &mentions.to_string_lossy(), "--out-dir", &out.to_string_lossy()]);
    assert_eq!(run.code(), 0, "{}", run.stderr());
    assert!(run.stderr().contains("not applicable"), "{}", run.stderr());
    let report = read_json(&out.join("concentration.json"));
    assert!(report["gini"].is_null());
    let manifest = read_json(&out.join("manifest.json"));
    assert_eq!(manifest["warnings"].as_array().unwrap().len(), 1);
    assert_eq!(manifest["output_paths"].as_array().unwrap().len(), 4);
}

#[test]
fn collect_without_key_exits_1_before_any_request() {
    let mock = MockSearch::spawn(HashMap::new(), HashSet::new());
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m.jsonl");
    let run = ycbench(&[
        "collect",
        "--roster",
        &fixture("roster.csv"),
        "--window",
        "2026-01-01..2026-03-17",
        "--out",
        &out.to_string_lossy(),
        "--cache-dir",
        &dir.path().join("cache").to_string_lossy(),
        "--endpoint",
        &mock.endpoint,
    ]);
    assert_eq!(run.code(), 1);
    assert!(run.stderr().contains("YCBENCH_SEARCH_API_KEY"), "{}", run.stderr());
    assert_eq!(mock.requests(), 0);
    assert!(!out.exists());
}

#[test]
fn collect_reproduces_fixture_counts() {
    let counts = fixture_counts("mentions_batch.jsonl");
    let mock = MockSearch::spawn(counts.clone(), HashSet::new());
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m.jsonl");
    let run = collect_with_mock(&mock, &fixture("roster.csv"), &out, &dir.path().join("cache"), &[]);
    assert_eq!(run.code(), 0, "{}", run.stderr());
    let records = ycbench_core::ingest::load_mentions(&out).unwrap();
    assert_eq!(records.len(), 184);
    for r in &records {
        assert_eq!(counts[&r.domain], r.count);
        assert_eq!(r.query, format!("\"{}\"", r.domain));
        assert_eq!((r.window_start.to_string(), r.window_end.to_string()), ("2026-01-01".into(), "2026-03-17".into()));
    }
    assert!(dir.path().join("m.manifest.json").exists());
}

#[test]
fn partial_collection_failure_exits_2_and_keeps_the_rest() {
    let counts = fixture_counts("mentions_batch.jsonl");
    let failing: HashSet<String> = ["nimbusos.dev".to_string()].into();
    let mock = MockSearch::spawn(counts, failing);
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m.jsonl");
    let run = collect_with_mock(&mock, &fixture("roster.csv"), &out, &dir.path().join("cache"), &["--max-retries", "1"]);
    assert_eq!(run.code(), 2, "{}", run.stderr());
    let records = ycbench_core::ingest::load_mentions(&out).unwrap();
    assert_eq!(records.len(), 183);
    assert!(records.iter().all(|r| r.domain != "nimbusos.dev"));
    // 183 successes plus two attempts at the failing domain.
    assert_eq!(mock.requests(), 185);
    let manifest = read_json(&dir.path().join("m.manifest.json"));
    let warnings = manifest["warnings"].as_array().unwrap();
    assert_eq!(warnings.len(), 1);
    assert!(warnings[0].as_str().unwrap().contains("nimbusos.dev"));
}

#[test]
fn invalid_window_is_a_usage_error() {
    let run = ycbench(&[
        "collect",
        "--roster",
        &fixture("roster.csv"),
        "--window",
        "2026-03-17..2026-01-01",
        "--out",
        "x.jsonl",
    ]);
    assert_eq!(run.code(), 1);
}

#[test]
fn help_documents_every_flag_and_unknown_flags_fail() {
    let flags: &[(&str, &[&str])] = &[
        (
            "collect",
            &["--roster", "--window", "--out", "--blocklist", "--cache-dir", "--max-requests-per-second", "--max-retries", "--max-in-flight", "--api-key-env", "--endpoint"],
        ),
        ("score", &["--roster", "--traction", "--mentions", "--config", "--blocklist", "--out"]),
        (
            "evaluate",
            &["--submission", "--truth", "--scores", "--high-traction", "--roster", "--blocklist", "--resolved-at", "--top-fraction", "--k", "--out", "--truth-out"],
        ),
        ("baseline", &["--pre-mentions", "--roster", "--blocklist", "--k", "--top-fraction", "--out"]),
        ("analyze", &["--mentions", "--out-dir", "--roster", "--blocklist"]),
    ];
    for (cmd, expected) in flags {
        let help = ycbench(&[cmd, "--help"]);
        assert_eq!(help.code(), 0);
        let text = help.stdout();
        for flag in *expected {
            assert!(text.contains(flag), "`{cmd} --help` is missing {flag}");
        }
        let bogus = ycbench(&[cmd, "--no-such-flag"]);
        assert_eq!(bogus.code(), 1, "{cmd} accepted an unknown flag");
    }
}
