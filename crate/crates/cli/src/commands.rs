use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use ycbench_core::analytics::{histogram_csv, log_histogram, loglog_csv, lorenz_csv, ConcentrationReport, DEFAULT_TOP_FRACTIONS};
use ycbench_core::baseline::baseline_predict;
use ycbench_core::evaluation::{ceil_count, evaluate as evaluate_submission, resolve_truth, resolve_truth_k, ResolvedTruth};
use ycbench_core::ingest::{
    apply_exclusions, load_domain_list, load_mentions, load_roster, load_traction, Blocklist, CollectorSettings,
    MentionCollector, SerpApiTransport,
};
use ycbench_core::io::{read_json, write_atomic, write_json, write_jsonl};
use ycbench_core::manifest::RunManifest;
use ycbench_core::scoring::{load_scores, score_batch, BatchScores};
use ycbench_core::{Error, PredictionSubmission, Roster, ScoringConfig};

use crate::{AnalyzeArgs, BaselineArgs, CollectArgs, EvaluateArgs, ScoreArgs};

/// `mentions.jsonl` -> `mentions.manifest.json`.
fn manifest_path(out: &Path) -> PathBuf {
    out.with_extension("manifest.json")
}

fn load_roster_with(roster: &Path, blocklist: Option<&Path>, manifest: &mut RunManifest) -> Result<Roster> {
    manifest.input(roster);
    let mut loaded = load_roster(roster)?;
    if let Some(path) = blocklist {
        manifest.input(path);
        let before = loaded.candidate_count();
        loaded = apply_exclusions(loaded, &Blocklist::load(path)?);
        log::info!(
            "blocklist excluded {} of {} startups",
            before - loaded.candidate_count(),
            loaded.len()
        );
    }
    Ok(loaded)
}

pub fn collect(a: CollectArgs) -> Result<ExitCode> {
    let mut manifest = RunManifest::start("collect");
    let roster = load_roster_with(&a.roster, a.blocklist.as_deref(), &mut manifest)?;
    let settings = CollectorSettings {
        max_requests_per_second: a.max_requests_per_second,
        max_retries: a.max_retries,
        cache_dir: a.cache_dir,
        api_key_env_name: a.api_key_env,
        max_in_flight: a.max_in_flight,
    };
    settings.validate()?;
    // Fails here, before any request, when the key is missing.
    let transport = SerpApiTransport::from_settings(&settings)?.with_endpoint(a.endpoint);

    log::info!(
        "collecting {} domains for window {}",
        roster.candidate_count(),
        a.window
    );
    let outcome = MentionCollector::new(transport, settings)?.collect(&roster, &a.window)?;
    write_jsonl(&a.out, &outcome.records)?;
    manifest.output(&a.out);
    for f in &outcome.failures {
        log::error!("{}: failed after {} attempts: {}", f.domain, f.attempts, f.error);
        manifest.warn(format!("{}: failed after {} attempts: {}", f.domain, f.attempts, f.error));
    }
    manifest.finish(&manifest_path(&a.out))?;

    println!(
        "collected {} records ({} from cache, {} requests), {} failures",
        outcome.records.len(),
        outcome.cache_hits,
        outcome.requests_issued,
        outcome.failures.len()
    );
    Ok(if outcome.is_complete() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

fn load_config(path: Option<&Path>) -> Result<ScoringConfig> {
    let Some(path) = path else {
        return Ok(ScoringConfig::default());
    };
    match ScoringConfig::load_validated(path) {
        Ok(c) => Ok(c),
        Err(Error::InvalidConfig(violations)) => {
            let mut msg = format!("{}: invalid configuration", path.display());
            for v in violations {
                let _ = write!(msg, "\n  - {v}");
            }
            bail!(msg)
        }
        Err(e) => Err(e.into()),
    }
}

pub fn score(a: ScoreArgs) -> Result<ExitCode> {
    let mut manifest = RunManifest::start("score");
    let config = load_config(a.config.as_deref())?;
    if let Some(p) = &a.config {
        manifest.input(p);
    }
    manifest.config_fingerprint = Some(config.fingerprint());
    let roster = load_roster_with(&a.roster, a.blocklist.as_deref(), &mut manifest)?;
    let observations = load_traction(&a.traction, &roster, &config)?;
    let mentions = load_mentions(&a.mentions)?;
    manifest.input(&a.traction).input(&a.mentions);

    let scored = score_batch(&roster, &observations, &mentions, &config)?;
    for w in &scored.warnings {
        log::warn!("{w}");
        manifest.warn(w.to_string());
    }

    let scores_path = a.out.join("scores.jsonl");
    let leaderboard_path = a.out.join("leaderboard.csv");
    write_atomic(&scores_path, scored.scores.to_jsonl().as_bytes())?;
    write_atomic(&leaderboard_path, scored.scores.leaderboard_csv().as_bytes())?;
    manifest.output(&scores_path).output(&leaderboard_path);
    manifest.finish(&a.out.join("manifest.json"))?;

    print!("{}", leaderboard_table(&scored.scores, 20));
    Ok(ExitCode::SUCCESS)
}

fn leaderboard_table(scores: &BatchScores, limit: usize) -> String {
    let mut out = format!("{:>4}  {:<28} {:>10}  {:<9}  {}\n", "rank", "domain", "score", "driver", "signal");
    for (i, s) in scores.scores.iter().take(limit).enumerate() {
        let _ = writeln!(
            out,
            "{:>4}  {:<28} {:>10.2}  {:<9}  {}",
            i + 1,
            s.domain,
            s.pre_demo_day_score,
            s.driver,
            s.dominant_signal.map_or("-", |k| k.as_str())
        );
    }
    out
}

pub fn evaluate(a: EvaluateArgs) -> Result<ExitCode> {
    let mut manifest = RunManifest::start("evaluate");
    let submission: PredictionSubmission = read_json(&a.submission)?;
    manifest.input(&a.submission);
    let roster = match &a.roster {
        Some(r) => Some(load_roster_with(r, a.blocklist.as_deref(), &mut manifest)?),
        None => None,
    };

    let truth: ResolvedTruth = match (&a.truth, &a.scores) {
        (Some(path), _) => {
            manifest.input(path);
            let truth: ResolvedTruth = read_json(path)?;
            if let Some(k) = a.k.filter(|&k| k != truth.k()) {
                bail!("--k {k} does not match the truth file's K = {}", truth.k());
            }
            truth
        }
        (None, Some(scores_path)) => {
            let roster = roster.as_ref().context("--scores requires --roster")?;
            let ht_path = a.high_traction.as_deref().context("--scores requires --high-traction")?;
            let resolved_at = a.resolved_at.context("--scores requires --resolved-at")?;
            manifest.input(scores_path).input(ht_path);
            let scores = BatchScores::new(roster.batch().unwrap_or_default(), load_scores(scores_path)?, "");
            let high_traction = load_domain_list(ht_path)?;
            match a.k {
                Some(k) => resolve_truth_k(&scores, roster, &high_traction, k, resolved_at)?,
                None => resolve_truth(&scores, roster, &high_traction, a.top_fraction, resolved_at)?,
            }
        }
        (None, None) => bail!("one of --truth or --scores is required"),
    };

    let report = evaluate_submission(&submission, &truth, roster.as_ref())?;
    if let Some(path) = &a.truth_out {
        write_json(path, &truth)?;
        manifest.output(path);
    }
    if let Some(path) = &a.out {
        write_json(path, &report)?;
        manifest.output(path);
        manifest.finish(&manifest_path(path))?;
    }
    print!("{}", report.to_table());
    Ok(ExitCode::SUCCESS)
}

pub fn baseline(a: BaselineArgs) -> Result<ExitCode> {
    let mut manifest = RunManifest::start("baseline");
    let roster = load_roster_with(&a.roster, a.blocklist.as_deref(), &mut manifest)?;
    let mentions = load_mentions(&a.pre_mentions)?;
    manifest.input(&a.pre_mentions);
    if !(a.top_fraction > 0.0 && a.top_fraction <= 1.0) {
        bail!("--top-fraction must be in (0, 1], got {}", a.top_fraction);
    }
    let k = a.k.unwrap_or_else(|| ceil_count(a.top_fraction, roster.len()));

    let run = baseline_predict(&mentions, &roster, k)?;
    if run.degenerate {
        manifest.warn("every candidate has zero pre-window mentions; ranking is tie-break order");
    }
    for d in &run.missing_mentions {
        log::warn!("no pre-window mention record for {d}; ranked as 0");
        manifest.warn(format!("no pre-window mention record for {d}"));
    }
    write_json(&a.out, &run.submission)?;
    manifest.output(&a.out);
    manifest.finish(&manifest_path(&a.out))?;

    println!(
        "{} (window {}, K = {})",
        run.submission.predictor_name, run.window, run.k
    );
    for (i, d) in run.submission.ranked_domains.iter().enumerate() {
        println!("{:>4}  {d}", i + 1);
    }
    Ok(ExitCode::SUCCESS)
}

pub fn analyze(a: AnalyzeArgs) -> Result<ExitCode> {
    let mut manifest = RunManifest::start("analyze");
    let mut mentions = load_mentions(&a.mentions)?;
    manifest.input(&a.mentions);
    if let Some(r) = &a.roster {
        let roster = load_roster_with(r, a.blocklist.as_deref(), &mut manifest)?;
        let before = mentions.len();
        mentions.retain(|m| roster.get(&m.domain).is_some_and(|s| !s.excluded));
        if mentions.len() < before {
            log::info!("dropped {} records for unknown or excluded domains", before - mentions.len());
        }
    }
    let values: Vec<f64> = mentions.iter().map(|m| m.count as f64).collect();
    let report = ConcentrationReport::compute(&values, &DEFAULT_TOP_FRACTIONS);
    if !report.is_applicable() {
        let msg = "concentration statistics are not applicable: no positive mention counts";
        log::warn!("{msg}");
        manifest.warn(msg);
    }

    let files = [
        ("concentration.json", {
            let mut b = serde_json::to_vec_pretty(&report)?;
            b.push(b'\n');
            b
        }),
        ("lorenz.csv", lorenz_csv(&report.lorenz_points).into_bytes()),
        ("loglog.csv", loglog_csv(&values).into_bytes()),
        ("histogram.csv", histogram_csv(&log_histogram(&values)).into_bytes()),
    ];
    for (name, bytes) in &files {
        let path = a.out_dir.join(name);
        write_atomic(&path, bytes)?;
        manifest.output(&path);
    }
    manifest.finish(&a.out_dir.join("manifest.json"))?;

    print!("{}", concentration_table(&report));
    Ok(ExitCode::SUCCESS)
}

fn concentration_table(r: &ConcentrationReport) -> String {
    let opt = |v: Option<f64>| v.map_or_else(|| "n/a".to_string(), |v| format!("{v:.4}"));
    let mut out = String::new();
    let _ = writeln!(out, "{:<22} {}", "startups", r.n);
    let _ = writeln!(out, "{:<22} {}", "total mentions", r.total);
    let _ = writeln!(out, "{:<22} {}", "gini", opt(r.gini));
    for (f, s) in &r.top_shares {
        let _ = writeln!(out, "{:<22} {s:.4}", format!("top {f} share"));
    }
    let _ = writeln!(out, "{:<22} {}", "power-law slope", opt(r.powerlaw_slope));
    let _ = writeln!(out, "{:<22} {}", "power-law r2", opt(r.powerlaw_r2));
    out
}
