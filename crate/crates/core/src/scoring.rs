//! Pre-Demo Day Score.
//!
//! ```text
//! traction  = max_k (w_k * x_k)               over disclosed signals
//! traction *= 1 + velocity_coefficient * g    g = MoM growth of the argmax signal
//! attention = w_m * mentions
//! score     = max(traction, attention)
//! ```

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::{normalize_value, ScoringConfig};
use crate::error::{Error, Result};
use crate::io::read_jsonl;
use crate::model::{Driver, MentionRecord, Roster, ScoreBreakdown, SignalKind, SignalObservation};

/// Result of aggregating one startup's disclosed traction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TractionScore {
    /// Final score, after the velocity multiplier.
    pub score: f64,
    /// `max_k w_k * x_k` before the multiplier.
    pub base: f64,
    pub dominant_signal: SignalKind,
    pub multiplier: f64,
}

/// Velocity multiplier for a month-over-month growth rate.
///
/// Growth only rewards by default: with `apply_velocity_only_when_positive`
/// set, `g <= 0` leaves the score alone. With the flag off the multiplier is
/// floored at zero.
pub fn velocity_multiplier(growth: Option<f64>, config: &ScoringConfig) -> f64 {
    match growth {
        None => 1.0,
        Some(0.0) => 1.0,
        Some(g) if g > 0.0 => 1.0 + config.velocity_coefficient * g,
        Some(_) if config.apply_velocity_only_when_positive => 1.0,
        Some(g) => (1.0 + config.velocity_coefficient * g).max(0.0),
    }
}

/// Max-of-weighted-metrics traction score for one startup's observations.
///
/// Returns `Ok(None)` for an empty slice: "no traction disclosed" is kept
/// distinct from a disclosed score of zero. Ties on the weighted value go to
/// the earliest observation.
pub fn traction_score(observations: &[SignalObservation], config: &ScoringConfig) -> Result<Option<TractionScore>> {
    let mut best: Option<(f64, &SignalObservation)> = None;
    for obs in observations {
        let weighted = config.weight(obs.kind) * normalize_value(obs, config)?;
        if best.is_none_or(|(b, _)| weighted > b) {
            best = Some((weighted, obs));
        }
    }
    Ok(best.map(|(base, obs)| {
        let multiplier = velocity_multiplier(obs.mom_growth, config);
        let score = if multiplier == 1.0 { base } else { base * multiplier };
        TractionScore {
            score,
            base,
            dominant_signal: obs.kind,
            multiplier,
        }
    }))
}

pub fn attention_score(mention_count: u64, config: &ScoringConfig) -> f64 {
    config.attention_weight * mention_count as f64
}

/// Combines traction and attention by max aggregation. Ties go to traction.
pub fn pre_demo_day_score(
    domain: &str,
    traction: Option<TractionScore>,
    mention_count: u64,
    attention: f64,
) -> ScoreBreakdown {
    let (score, driver) = match traction {
        Some(t) if t.score >= attention => (t.score, Driver::Traction),
        _ => (attention, Driver::Attention),
    };
    ScoreBreakdown {
        domain: domain.to_string(),
        traction_score: traction.map(|t| t.score),
        base_traction_score: traction.map(|t| t.base),
        dominant_signal: traction.map(|t| t.dominant_signal),
        velocity_multiplier_applied: traction.map_or(1.0, |t| t.multiplier),
        mention_count,
        attention_score: attention,
        pre_demo_day_score: score,
        driver,
    }
}

/// Ranking order shared by scoring, truth resolution and the baseline:
/// descending score, then descending raw mention count, then ascending
/// domain.
pub fn ranking_cmp(a: &ScoreBreakdown, b: &ScoreBreakdown) -> Ordering {
    rank_key_cmp(
        (a.pre_demo_day_score, a.mention_count, &a.domain),
        (b.pre_demo_day_score, b.mention_count, &b.domain),
    )
}

pub(crate) fn rank_key_cmp(a: (f64, u64, &str), b: (f64, u64, &str)) -> Ordering {
    b.0.total_cmp(&a.0)
        .then_with(|| b.1.cmp(&a.1))
        .then_with(|| a.2.cmp(b.2))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchScores {
    pub batch: String,
    /// One entry per non-excluded startup, in [`ranking_cmp`] order.
    pub scores: Vec<ScoreBreakdown>,
    pub config_fingerprint: String,
}

impl BatchScores {
    /// Wraps breakdowns, sorting them into ranking order.
    pub fn new(batch: impl Into<String>, mut scores: Vec<ScoreBreakdown>, config_fingerprint: impl Into<String>) -> Self {
        scores.sort_by(ranking_cmp);
        Self {
            batch: batch.into(),
            scores,
            config_fingerprint: config_fingerprint.into(),
        }
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn get(&self, domain: &str) -> Option<&ScoreBreakdown> {
        self.scores.iter().find(|s| s.domain == domain)
    }

    /// Scores JSONL, one breakdown per line in rank order.
    pub fn to_jsonl(&self) -> String {
        crate::io::to_jsonl_string(&self.scores)
    }

    /// Leaderboard CSV: `rank,domain,score,driver,dominant_signal`.
    pub fn leaderboard_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["rank", "domain", "score", "driver", "dominant_signal"])
            .expect("in-memory write");
        for (i, s) in self.scores.iter().enumerate() {
            w.write_record([
                (i + 1).to_string(),
                s.domain.clone(),
                s.pre_demo_day_score.to_string(),
                s.driver.to_string(),
                s.dominant_signal.map(|k| k.to_string()).unwrap_or_default(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
    }
}

/// Reads a scores JSONL file back into breakdowns (file order).
pub fn load_scores(path: &Path) -> Result<Vec<ScoreBreakdown>> {
    Ok(read_jsonl(path)?.into_iter().map(|(_, s)| s).collect())
}

/// Non-fatal findings from [`score_batch`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "domain", rename_all = "snake_case")]
pub enum ScoreWarning {
    /// Scored with a mention count of zero.
    MissingMentions(String),
    /// Mention record for a domain not in the roster; ignored.
    UnknownMentionDomain(String),
    /// Mention record for an excluded domain; ignored.
    ExcludedMentionDomain(String),
}

impl fmt::Display for ScoreWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScoreWarning::MissingMentions(d) => write!(f, "no mention record for {d}; scored with 0 mentions"),
            ScoreWarning::UnknownMentionDomain(d) => write!(f, "mention record for unknown domain {d} ignored"),
            ScoreWarning::ExcludedMentionDomain(d) => write!(f, "mention record for excluded domain {d} ignored"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoredBatch {
    pub scores: BatchScores,
    pub warnings: Vec<ScoreWarning>,
}

/// Scores every non-excluded startup of a roster.
///
/// Traction for an unknown or excluded domain is an error, as is more than
/// one mention record for the same domain. Missing mentions score as zero and
/// produce a warning.
pub fn score_batch(
    roster: &Roster,
    observations: &[SignalObservation],
    mentions: &[MentionRecord],
    config: &ScoringConfig,
) -> Result<ScoredBatch> {
    let mut by_domain: BTreeMap<&str, Vec<SignalObservation>> = BTreeMap::new();
    for obs in observations {
        roster.resolve_candidate(&obs.domain)?;
        by_domain.entry(obs.domain.as_str()).or_default().push(obs.clone());
    }

    let mut warnings = Vec::new();
    let mut counts: HashMap<&str, u64> = HashMap::new();
    for m in mentions {
        match roster.get(&m.domain) {
            None => warnings.push(ScoreWarning::UnknownMentionDomain(m.domain.clone())),
            Some(r) if r.excluded => warnings.push(ScoreWarning::ExcludedMentionDomain(m.domain.clone())),
            Some(_) => {
                if counts.insert(m.domain.as_str(), m.count).is_some() {
                    return Err(Error::Invalid(format!(
                        "more than one mention record for `{}`",
                        m.domain
                    )));
                }
            }
        }
    }

    let mut scores = Vec::with_capacity(roster.candidate_count());
    for record in roster.candidates() {
        let domain = record.domain.as_str();
        let count = match counts.get(domain) {
            Some(&c) => c,
            None => {
                warnings.push(ScoreWarning::MissingMentions(domain.to_string()));
                0
            }
        };
        let traction = match by_domain.get(domain) {
            Some(obs) => traction_score(obs, config)?,
            None => None,
        };
        scores.push(pre_demo_day_score(domain, traction, count, attention_score(count, config)));
    }

    let batch = roster.batch().unwrap_or_default().to_string();
    Ok(ScoredBatch {
        scores: BatchScores::new(batch, scores, config.fingerprint()),
        warnings,
    })
}
