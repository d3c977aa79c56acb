use std::collections::{HashMap, HashSet};
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use ycbench_core::analytics::ConcentrationReport;
use ycbench_core::baseline::baseline_predict;
use ycbench_core::evaluation::{evaluate, resolve_truth};
use ycbench_core::ingest::{
    apply_exclusions, load_domain_list, load_mentions, load_roster, load_traction, Blocklist, CollectionWindow,
    CollectorSettings, MentionCollector, SearchRequest, SearchTransport, TransportError,
};
use ycbench_core::scoring::score_batch;
use ycbench_core::{Driver, Roster, ScoringConfig};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/w26")
}

fn roster() -> Roster {
    let f = fixtures();
    apply_exclusions(
        load_roster(&f.join("roster.csv")).unwrap(),
        &Blocklist::load(&f.join("blocklist.txt")).unwrap(),
    )
}

#[test]
fn fixture_roster_and_blocklist() {
    let r = roster();
    assert_eq!(r.len(), 196);
    assert_eq!(r.candidate_count(), 184);
    assert_eq!(r.batch(), Some("W26"));
    let hello = r.get("hello.so").unwrap();
    assert!(hello.excluded);
    assert_eq!(hello.exclusion_reason.as_deref(), Some("common expression"));
}

#[test]
fn fixture_scores_and_results_table() {
    let f = fixtures();
    let r = roster();
    let config = ScoringConfig::load_validated(&f.join("config.toml")).unwrap();
    assert_eq!(config, ScoringConfig::default());
    let obs = load_traction(&f.join("traction.jsonl"), &r, &config).unwrap();
    let traction_domains: HashSet<&str> = obs.iter().map(|o| o.domain.as_str()).collect();
    assert_eq!(traction_domains.len(), 11);

    let scored = score_batch(&r, &obs, &load_mentions(&f.join("mentions_batch.jsonl")).unwrap(), &config).unwrap();
    assert!(scored.warnings.is_empty(), "{:?}", scored.warnings);
    assert_eq!(scored.scores.len(), 184);
    let traction_driven = scored.scores.scores.iter().filter(|s| s.driver == Driver::Traction).count();
    assert_eq!(traction_driven, 11);

    let high = load_domain_list(&f.join("high_traction.txt")).unwrap();
    assert_eq!(high.len(), 11);
    let truth = resolve_truth(&scored.scores, &r, &high, 0.10, NaiveDate::from_ymd_opt(2026, 3, 17).unwrap()).unwrap();
    assert_eq!(truth.k(), 20);

    let run = baseline_predict(&load_mentions(&f.join("mentions_pre.jsonl")).unwrap(), &r, 20).unwrap();
    assert!(!run.degenerate);
    assert_eq!(run.window, CollectionWindow::w26_pre_application());
    let report = evaluate(&run.submission, &truth, Some(&r)).unwrap();
    assert_eq!(report.hits.len(), 14);
    assert_eq!(report.high_traction_hits.len(), 6);
    assert_eq!(report.lift_paper_style, 7.0);
    assert_eq!(report.horizon_days, 136);
}

struct Replay(HashMap<String, u64>);

impl SearchTransport for Replay {
    fn total_results(&self, request: &SearchRequest) -> Result<u64, TransportError> {
        let domain = request.query.trim_matches('"');
        self.0
            .get(domain)
            .copied()
            .ok_or_else(|| TransportError::Provider(format!("no canned count for {domain}")))
    }
}

#[test]
fn collection_over_replayed_counts_feeds_concentration() {
    let f = fixtures();
    let expected = load_mentions(&f.join("mentions_batch.jsonl")).unwrap();
    let counts: HashMap<String, u64> = expected.iter().map(|m| (m.domain.clone(), m.count)).collect();
    let cache = tempfile::tempdir().unwrap();
    let settings = CollectorSettings {
        max_requests_per_second: 1000.0,
        cache_dir: cache.path().to_path_buf(),
        ..CollectorSettings::default()
    };
    let outcome = MentionCollector::new(Replay(counts), settings)
        .unwrap()
        .collect(&roster(), &CollectionWindow::w26_batch())
        .unwrap();
    assert!(outcome.is_complete());
    assert_eq!(outcome.requests_issued, 184);
    let got: Vec<(String, u64)> = outcome.records.iter().map(|m| (m.domain.clone(), m.count)).collect();
    let want: Vec<(String, u64)> = expected.iter().map(|m| (m.domain.clone(), m.count)).collect();
    assert_eq!(got, want);

    let values: Vec<f64> = outcome.records.iter().map(|m| m.count as f64).collect();
    let report = ConcentrationReport::compute(&values, &[0.02, 0.10]);
    assert!((report.gini.unwrap() - 0.85).abs() <= 0.01);
    assert!((report.top_share(0.10).unwrap() - 0.817).abs() <= 0.005);
    assert!(report.top_share(0.02).unwrap() > 0.5);
}
