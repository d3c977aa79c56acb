//! SYNTHETIC FIXTURE GENERATOR.
//!
//! The per-startup mention counts of the W26 case study are not available
//! offline, so this program synthesizes a stand-in fixture set that matches
//! the published aggregates:
//!
//! - 196 startups, 12 removed by the homonym blocklist (184 scored)
//! - 11 startups with disclosed traction
//! - batch-window mentions with Gini ~0.85, top-10% share ~81.7%, top-2% share
//!   above 50%, and a top-decile median of ~500 mentions
//! - pre-application mentions whose top-20 recovers 14 of the top-20 scores
//!   and 6 of the 11 high-traction startups
//!
//! Company names and domains are invented. Output is deterministic.
//!
//! Usage: `cargo run -p ycbench-core --example synthesize_w26 -- fixtures/w26`

use std::path::{Path, PathBuf};

use chrono::{DateTime, NaiveDate, Utc};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ycbench_core::analytics::{gini, top_share};
use ycbench_core::baseline::baseline_predict;
use ycbench_core::evaluation::{evaluate, resolve_truth};
use ycbench_core::ingest::{apply_exclusions, query_for_domain, write_roster, Blocklist, CollectionWindow};
use ycbench_core::io::{write_atomic, write_jsonl};
use ycbench_core::scoring::score_batch;
use ycbench_core::{MentionRecord, Roster, ScoringConfig, SignalKind, SignalObservation, StartupRecord};

const BATCH: &str = "W26";

const PREFIXES: [&str; 28] = [
    "Arc", "Basil", "Cobalt", "Dune", "Ember", "Fjord", "Gale", "Halo", "Iris", "Juniper", "Kite",
    "Lumen", "Moss", "Nimbus", "Onyx", "Pylon", "Quill", "Rune", "Sable", "Tidal", "Umbra", "Vesper",
    "Wren", "Xylo", "Yarrow", "Zephyr", "Birch", "Cedar",
];

/// (name suffix, domain suffix, one-liner)
const SECTORS: [(&str, &str, &str); 7] = [
    ("Labs", "labs.com", "Developer tools for AI teams"),
    ("AI", ".ai", "AI agents for back-office work"),
    ("Health", "health.com", "Healthcare operations software"),
    ("Robotics", "robotics.com", "Robotics for warehouse logistics"),
    ("Pay", "pay.com", "Payments infrastructure"),
    ("OS", "os.dev", "Operating system for field teams"),
    ("Bio", "bio.io", "Computational biology platform"),
];

/// Names colliding with common expressions or established brands.
const HOMONYMS: [(&str, &str, &str); 12] = [
    ("Hello", "hello.so", "common expression"),
    ("Anyway", "anyway.ai", "common expression"),
    ("Okay", "okay.dev", "common expression"),
    ("Together", "together.app", "common expression"),
    ("Thank You", "thankyou.so", "common expression"),
    ("Lets Go", "letsgo.ai", "common expression"),
    ("Mercury", "mercury.dev", "homonym with an established brand"),
    ("Delta", "delta.so", "homonym with an established brand"),
    ("Orbit", "orbit.ai", "homonym with an established brand"),
    ("Nova", "nova.app", "homonym with an established brand"),
    ("Atlas", "atlas.so", "homonym with an established brand"),
    ("Echo", "echo.dev", "homonym with an established brand"),
];

/// Top-decile batch-window counts (19 of 184), median 500.
const HEAD: [u64; 19] = [
    12400, 7100, 4300, 2900, 1400, 1000, 800, 650, 560, 500, 455, 410, 370, 335, 305, 280, 258, 240, 225,
];
const TARGET_TOP_SHARE: f64 = 0.817;
const TAIL_LEN: usize = 165;
const TAIL_EXPONENT: f64 = 1.65;
const TAIL_OFFSET: f64 = 32.0;

/// Tail positions for the traction startups: the first six are caught by the
/// baseline, the last five are narrow B2B companies with little web presence.
const TRACTION_TAIL_SLOTS: [usize; 11] = [3, 9, 17, 28, 40, 55, 70, 88, 105, 130, 150];

/// Pre-application counts for the baseline's top 20.
const PRE_TOP: [u64; 20] = [
    2600, 1900, 1500, 1200, 950, 800, 700, 600, 520, 450, 390, 340, 300, 270, 240, 215, 195, 180, 165, 150,
];
const PRE_CAP: u64 = 120;

fn date(y: i32, m: u32, d: u32) -> NaiveDate {
    NaiveDate::from_ymd_opt(y, m, d).expect("valid date")
}

fn tail_counts() -> Vec<u64> {
    let head_sum: f64 = HEAD.iter().sum::<u64>() as f64;
    let tail_sum = head_sum * (1.0 / TARGET_TOP_SHARE - 1.0);
    let weights: Vec<f64> = (1..=TAIL_LEN)
        .map(|r| (r as f64 + TAIL_OFFSET).powf(-TAIL_EXPONENT))
        .collect();
    let scale = tail_sum / weights.iter().sum::<f64>();
    weights.iter().map(|w| (scale * w).floor() as u64).collect()
}

struct Obs(SignalKind, f64, &'static str, Option<f64>);

fn traction_profiles() -> [Vec<Obs>; 11] {
    use SignalKind::*;
    [
        vec![Obs(ArrRevenue, 2_400_000.0, "usd", None), Obs(ActiveUsers, 12_000.0, "count", None)],
        vec![Obs(ArrRevenue, 1_500.0, "usd_k", None)],
        vec![Obs(PilotRevenue, 400_000.0, "usd", Some(0.5)), Obs(Signups, 20_000.0, "count", None)],
        vec![Obs(ArrRevenue, 850_000.0, "usd", Some(-0.05))],
        vec![Obs(ActiveUsers, 150_000.0, "count", None)],
        vec![Obs(LoiSignedContracts, 2_000_000.0, "usd", None), Obs(PilotRevenue, 300_000.0, "usd", None)],
        vec![Obs(ActivityVolume, 80_000.0, "count", Some(0.2))],
        vec![Obs(ArrRevenue, 320_000.0, "usd", Some(0.1))],
        vec![Obs(Signups, 90_000.0, "count", None)],
        vec![Obs(PilotRevenue, 120_000.0, "usd", None), Obs(LoiSignedContracts, 250_000.0, "usd", None)],
        vec![Obs(EcosystemPull, 45_000.0, "count", None), Obs(ArrRevenue, 30_000.0, "usd", None)],
    ]
}

fn mention(domain: &str, window: &CollectionWindow, count: u64, retrieved_at: DateTime<Utc>) -> MentionRecord {
    MentionRecord {
        domain: domain.to_string(),
        window_start: window.start,
        window_end: window.end,
        count,
        query: query_for_domain(domain),
        retrieved_at,
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out: PathBuf = std::env::args().nth(1).unwrap_or_else(|| "fixtures/w26".into()).into();
    std::fs::create_dir_all(&out)?;
    let mut rng = ChaCha8Rng::seed_from_u64(26);

    let mut scored: Vec<StartupRecord> = Vec::new();
    for prefix in PREFIXES {
        for (suffix, domain_suffix, one_liner) in SECTORS {
            let domain = format!("{}{domain_suffix}", prefix.to_lowercase());
            let mut r = StartupRecord::new(format!("{prefix} {suffix}"), &domain, BATCH)?;
            r.one_liner = Some(one_liner.to_string());
            scored.push(r);
        }
    }
    scored.shuffle(&mut rng);
    scored.truncate(184);

    let traction_domains: Vec<String> = scored[..11].iter().map(|r| r.domain.clone()).collect();
    let head_domains: Vec<String> = scored[11..30].iter().map(|r| r.domain.clone()).collect();
    let tail_domains: Vec<String> = scored[30..].iter().map(|r| r.domain.clone()).collect();

    let mut roster_records = scored.clone();
    for (name, domain, _) in HOMONYMS {
        roster_records.push(StartupRecord::new(name, domain, BATCH)?);
    }
    roster_records.shuffle(&mut rng);
    write_roster(&out.join("roster.csv"), &roster_records)?;

    let mut blocklist = String::from(
        "# Domains whose mention counts are polluted by common expressions or\n\
         # established brands. One pattern per line; `*` is a wildcard.\n",
    );
    for (_, domain, reason) in HOMONYMS {
        blocklist.push_str(&format!("{domain:<16} # {reason}\n"));
    }
    write_atomic(&out.join("blocklist.txt"), blocklist.as_bytes())?;

    // Batch-window counts.
    let tail = tail_counts();
    let mut batch_count = std::collections::HashMap::new();
    for (d, c) in head_domains.iter().zip(HEAD) {
        batch_count.insert(d.clone(), c);
    }
    for (d, &slot) in traction_domains.iter().zip(&TRACTION_TAIL_SLOTS) {
        batch_count.insert(d.clone(), tail[slot]);
    }
    let free_slots = (0..TAIL_LEN).filter(|i| !TRACTION_TAIL_SLOTS.contains(i));
    for (d, slot) in tail_domains.iter().zip(free_slots) {
        batch_count.insert(d.clone(), tail[slot]);
    }
    assert_eq!(batch_count.len(), 184);

    let collected_at: DateTime<Utc> = "2026-03-18T12:00:00Z".parse()?;
    let batch_window = CollectionWindow::w26_batch();
    let pre_window = CollectionWindow::w26_pre_application();
    let mut batch_mentions = Vec::new();
    let mut pre_mentions = Vec::new();

    // Baseline top 20: six caught traction startups, head ranks 1-8 and 10-15.
    let mut chosen: Vec<String> = traction_domains[..6].to_vec();
    chosen.extend(head_domains[..8].iter().cloned());
    chosen.extend(head_domains[9..15].iter().cloned());
    chosen.shuffle(&mut rng);
    let fractions = [0.05, 0.15, 0.25];

    for (i, r) in roster_records.iter().filter(|r| batch_count.contains_key(&r.domain)).enumerate() {
        let count = batch_count[&r.domain];
        batch_mentions.push(mention(&r.domain, &batch_window, count, collected_at));
        let pre = match chosen.iter().position(|d| *d == r.domain) {
            Some(p) => PRE_TOP[p],
            None => ((count as f64 * fractions[i % 3]).floor() as u64).min(PRE_CAP),
        };
        pre_mentions.push(mention(&r.domain, &pre_window, pre, collected_at));
    }
    write_jsonl(&out.join("mentions_batch.jsonl"), &batch_mentions)?;
    write_jsonl(&out.join("mentions_pre.jsonl"), &pre_mentions)?;

    let mut observations = Vec::new();
    for (i, (domain, profile)) in traction_domains.iter().zip(traction_profiles()).enumerate() {
        let source = if i % 2 == 0 {
            "public VC batch memo (synthetic fixture)"
        } else {
            "founder LinkedIn post (synthetic fixture)"
        };
        for Obs(kind, raw_value, unit, mom_growth) in profile {
            observations.push(SignalObservation {
                domain: domain.clone(),
                kind,
                raw_value,
                unit: unit.to_string(),
                mom_growth,
                as_of: date(2026, 3, 10),
                source: source.to_string(),
            });
        }
    }
    write_jsonl(&out.join("traction.jsonl"), &observations)?;

    let mut high = String::from("# Startups with externally disclosed traction (synthetic fixture).\n");
    for d in &traction_domains {
        high.push_str(d);
        high.push('\n');
    }
    write_atomic(&out.join("high_traction.txt"), high.as_bytes())?;

    let config = ScoringConfig::default();
    let mut config_text = String::from("# Default scoring configuration.\n");
    config_text.push_str(&config.to_config_string());
    write_atomic(&out.join("config.toml"), config_text.as_bytes())?;

    verify(&out, &roster_records, &batch_mentions, &pre_mentions, &observations, &traction_domains)?;
    println!("wrote synthetic W26 fixtures to {}", out.display());
    Ok(())
}

fn verify(
    out: &Path,
    roster_records: &[StartupRecord],
    batch: &[MentionRecord],
    pre: &[MentionRecord],
    observations: &[SignalObservation],
    high_traction: &[String],
) -> Result<(), Box<dyn std::error::Error>> {
    let blocklist = Blocklist::load(&out.join("blocklist.txt"))?;
    let roster = apply_exclusions(Roster::new(roster_records.to_vec())?, &blocklist);
    assert_eq!(roster.len(), 196);
    assert_eq!(roster.candidate_count(), 184);

    let counts: Vec<f64> = batch.iter().map(|m| m.count as f64).collect();
    let g = gini(&counts).expect("positive counts");
    let s10 = top_share(&counts, 0.10).expect("positive counts");
    let s02 = top_share(&counts, 0.02).expect("positive counts");
    println!("gini = {g:.4}, top10% = {s10:.4}, top2% = {s02:.4}");
    assert!((g - 0.85).abs() <= 0.01);
    assert!((s10 - 0.817).abs() <= 0.005);
    assert!(s02 > 0.5);

    let config = ScoringConfig::default();
    let scored = score_batch(&roster, observations, batch, &config)?;
    let truth = resolve_truth(&scored.scores, &roster, high_traction, 0.10, date(2026, 3, 17))?;
    let run = baseline_predict(pre, &roster, truth.k())?;
    let report = evaluate(&run.submission, &truth, Some(&roster))?;
    print!("{}", report.to_table());
    assert_eq!(report.hits.len(), 14);
    assert_eq!(report.high_traction_hits.len(), 6);
    Ok(())
}
