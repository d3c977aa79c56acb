//! Synthetic batch generators shared by the criterion benches.

use chrono::NaiveDate;
use ycbench_core::{MentionRecord, Roster, SignalKind, SignalObservation, StartupRecord};

/// A roster of `n` startups with heavy-tailed mention counts and traction for
/// every `traction_every`-th startup.
pub fn synthetic_batch(n: usize, traction_every: usize) -> (Roster, Vec<SignalObservation>, Vec<MentionRecord>) {
    let start = NaiveDate::from_ymd_opt(2026, 1, 1).expect("date");
    let end = NaiveDate::from_ymd_opt(2026, 3, 17).expect("date");
    let retrieved_at = "2026-03-18T00:00:00Z".parse().expect("timestamp");
    let mut records = Vec::with_capacity(n);
    let mut observations = Vec::new();
    let mut mentions = Vec::with_capacity(n);
    for i in 0..n {
        let domain = format!("startup{i:05}.com");
        records.push(StartupRecord::new(format!("Startup {i}"), &domain, "W26").expect("valid"));
        mentions.push(MentionRecord {
            domain: domain.clone(),
            window_start: start,
            window_end: end,
            count: (20_000.0 / ((i + 1) as f64).powf(1.3)) as u64,
            query: format!("\"{domain}\""),
            retrieved_at,
        });
        if traction_every > 0 && i % traction_every == 0 {
            for (j, kind) in SignalKind::ALL.into_iter().enumerate().take(3) {
                observations.push(SignalObservation {
                    domain: domain.clone(),
                    kind,
                    raw_value: 1000.0 * ((i + j) % 97) as f64,
                    unit: "usd".into(),
                    mom_growth: (j == 0).then_some(0.1),
                    as_of: end,
                    source: "bench".into(),
                });
            }
        }
    }
    (Roster::new(records).expect("unique domains"), observations, mentions)
}
