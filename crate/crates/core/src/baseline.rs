//! Pre-application mention-count baseline.
//!
//! Ranks the non-excluded startups by how often their domain was mentioned
//! before the application deadline and submits the top K.

use std::collections::HashMap;

use chrono::{DateTime, NaiveTime, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::CollectionWindow;
use crate::model::{MentionRecord, PredictionSubmission, Roster};
use crate::scoring::rank_key_cmp;

pub const BASELINE_PREDICTOR_NAME: &str = "google-mentions-pre-deadline";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineRun {
    pub window: CollectionWindow,
    pub k: usize,
    pub submission: PredictionSubmission,
    /// True when every candidate had zero mentions, so the ranking is pure
    /// tie-break order.
    pub degenerate: bool,
    /// Candidates without a mention record, ranked as zero.
    pub missing_mentions: Vec<String>,
}

/// Builds the baseline submission.
///
/// Missing mention records count as zero. Ties break like truth resolution:
/// by count, then domain. The submission is stamped at midnight UTC on the
/// day after the window closes, the earliest moment the prediction could
/// have been made.
pub fn baseline_predict(pre_window_mentions: &[MentionRecord], roster: &Roster, k: usize) -> Result<BaselineRun> {
    let window = window_of(pre_window_mentions)?;
    let counts: HashMap<&str, u64> = pre_window_mentions
        .iter()
        .map(|m| (m.domain.as_str(), m.count))
        .collect();

    let mut missing = Vec::new();
    let mut ranked: Vec<(f64, u64, &str)> = roster
        .candidates()
        .map(|r| {
            let count = counts.get(r.domain.as_str()).copied().unwrap_or_else(|| {
                missing.push(r.domain.clone());
                0
            });
            (count as f64, count, r.domain.as_str())
        })
        .collect();
    if k == 0 {
        return Err(Error::Invalid("k must be at least 1".into()));
    }
    if k > ranked.len() {
        return Err(Error::NotEnoughCandidates {
            k,
            available: ranked.len(),
        });
    }
    ranked.sort_by(|a, b| rank_key_cmp(*a, *b));
    let degenerate = ranked.iter().all(|&(_, c, _)| c == 0);
    if degenerate {
        log::warn!("baseline is degenerate: every candidate has zero pre-window mentions");
    }

    let created_at = DateTime::<Utc>::from_naive_utc_and_offset(
        window.end.succ_opt().expect("date in range").and_time(NaiveTime::MIN),
        Utc,
    );
    let submission = PredictionSubmission {
        predictor_name: BASELINE_PREDICTOR_NAME.to_string(),
        batch: roster.batch().unwrap_or_default().to_string(),
        created_at,
        ranked_domains: ranked.iter().take(k).map(|&(_, _, d)| d.to_string()).collect(),
    };
    Ok(BaselineRun {
        window,
        k,
        submission,
        degenerate,
        missing_mentions: missing,
    })
}

/// The shared window of the records; the default pre-application window when
/// there are none.
fn window_of(records: &[MentionRecord]) -> Result<CollectionWindow> {
    let Some(first) = records.first() else {
        return Ok(CollectionWindow::w26_pre_application());
    };
    if let Some(other) = records
        .iter()
        .find(|m| (m.window_start, m.window_end) != (first.window_start, first.window_end))
    {
        return Err(Error::Invalid(format!(
            "mention records mix windows: {}..{} and {}..{}",
            first.window_start, first.window_end, other.window_start, other.window_end
        )));
    }
    let default = CollectionWindow::w26_pre_application();
    let label = if (first.window_start, first.window_end) == (default.start, default.end) {
        default.label
    } else {
        "custom".to_string()
    };
    CollectionWindow::new(label, first.window_start, first.window_end)
}
