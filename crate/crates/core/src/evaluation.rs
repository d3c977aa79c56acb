//! Ground-truth resolution and submission metrics.

use std::collections::HashSet;
use std::fmt::Write as _;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{PredictionSubmission, Roster};
use crate::scoring::BatchScores;

/// Precision of a random predictor as rounded in published tables.
pub const NOMINAL_RANDOM_PRECISION: f64 = 0.10;

/// `ceil(fraction * n)`, tolerant of products like `0.1 * 30` that land a
/// hair above an integer in binary floating point.
pub fn ceil_count(fraction: f64, n: usize) -> usize {
    let x = fraction * n as f64;
    let nearest = x.round();
    if (x - nearest).abs() <= 1e-9 * x.abs().max(1.0) {
        nearest as usize
    } else {
        x.ceil() as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResolvedTruth {
    pub batch: String,
    /// Top-K scored domains in rank order.
    pub top_k_domains: Vec<String>,
    /// Externally disclosed high-traction set (M domains).
    pub high_traction_domains: Vec<String>,
    pub resolved_at: NaiveDate,
    /// Full roster size N, excluded startups included.
    pub roster_size: usize,
}

impl ResolvedTruth {
    pub fn k(&self) -> usize {
        self.top_k_domains.len()
    }

    pub fn m(&self) -> usize {
        self.high_traction_domains.len()
    }
}

/// Resolves the top-K set with `K = ceil(top_fraction * |roster|)`.
///
/// K is taken against the full roster, excluded startups included, while the
/// candidates are the scored startups.
pub fn resolve_truth(
    scores: &BatchScores,
    roster: &Roster,
    high_traction: &[String],
    top_fraction: f64,
    resolved_at: NaiveDate,
) -> Result<ResolvedTruth> {
    if !(top_fraction > 0.0 && top_fraction <= 1.0) {
        return Err(Error::Invalid(format!("top_fraction must be in (0, 1], got {top_fraction}")));
    }
    let k = ceil_count(top_fraction, roster.len());
    resolve_truth_k(scores, roster, high_traction, k, resolved_at)
}

/// Resolves the top-K set for an explicit K.
pub fn resolve_truth_k(
    scores: &BatchScores,
    roster: &Roster,
    high_traction: &[String],
    k: usize,
    resolved_at: NaiveDate,
) -> Result<ResolvedTruth> {
    if scores.is_empty() {
        return Err(Error::Invalid("cannot resolve truth from an empty score set".into()));
    }
    if k == 0 {
        return Err(Error::Invalid("k must be at least 1".into()));
    }
    if k > scores.len() {
        return Err(Error::NotEnoughCandidates {
            k,
            available: scores.len(),
        });
    }
    let mut seen = HashSet::new();
    for d in high_traction {
        if roster.get(d).is_none() {
            return Err(Error::UnknownDomain(d.clone()));
        }
        if !seen.insert(d) {
            return Err(Error::Invalid(format!("duplicate high-traction domain `{d}`")));
        }
    }
    let mut ranked = scores.scores.clone();
    ranked.sort_by(crate::scoring::ranking_cmp);
    Ok(ResolvedTruth {
        batch: scores.batch.clone(),
        top_k_domains: ranked.into_iter().take(k).map(|s| s.domain).collect(),
        high_traction_domains: high_traction.to_vec(),
        resolved_at,
        roster_size: roster.len(),
    })
}

fn predicted_top_k(submission: &PredictionSubmission, k: usize) -> Result<&[String]> {
    if submission.ranked_domains.len() < k {
        return Err(Error::InvalidSubmission(format!(
            "submission ranks {} domains but K = {k}",
            submission.ranked_domains.len()
        )));
    }
    Ok(&submission.ranked_domains[..k])
}

fn overlap(predicted: &[String], target: &[String]) -> usize {
    let target: HashSet<&str> = target.iter().map(String::as_str).collect();
    predicted.iter().filter(|d| target.contains(d.as_str())).count()
}

/// `|first K predicted ∩ truth top-K| / K`.
pub fn precision_at_k(submission: &PredictionSubmission, truth: &ResolvedTruth) -> Result<f64> {
    let k = truth.k();
    let predicted = predicted_top_k(submission, k)?;
    Ok(overlap(predicted, &truth.top_k_domains) as f64 / k as f64)
}

/// `|first K predicted ∩ high-traction| / M`; `None` when M = 0.
pub fn recall_at_m(submission: &PredictionSubmission, truth: &ResolvedTruth) -> Result<Option<f64>> {
    let predicted = predicted_top_k(submission, truth.k())?;
    let m = truth.m();
    if m == 0 {
        return Ok(None);
    }
    Ok(Some(overlap(predicted, &truth.high_traction_domains) as f64 / m as f64))
}

/// Lift over a uniform random predictor: `(precision / (k/n), precision / 0.10)`.
///
/// Both divide by multiplying with an exactly representable reciprocal
/// (`n/k` as one rounding, `1/0.10 == 10.0`); `0.7 / 0.1` in floating point
/// is `6.999…`, while `0.7 * 10.0` is exactly 7.
pub fn lift_over_random(precision: f64, k: usize, n: usize) -> Result<(f64, f64)> {
    if n == 0 || k == 0 || k > n {
        return Err(Error::Invalid(format!("lift needs 0 < k <= n, got k = {k}, n = {n}")));
    }
    let exact = precision * n as f64 / k as f64;
    Ok((exact, precision * (1.0 / NOMINAL_RANDOM_PRECISION)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub predictor_name: String,
    pub batch: String,
    pub k: usize,
    pub m: usize,
    pub roster_size: usize,
    pub precision_at_k: f64,
    /// `None` when the high-traction set is empty.
    pub recall_at_m: Option<f64>,
    /// Precision of a uniform random predictor, `k / n`.
    pub random_precision: f64,
    pub lift_exact: f64,
    /// Lift against the rounded 10% random precision.
    pub lift_paper_style: f64,
    /// Truth top-K domains found in the first K predictions, in truth order.
    pub hits: Vec<String>,
    /// Truth top-K domains missing from the first K predictions.
    pub misses: Vec<String>,
    pub high_traction_hits: Vec<String>,
    pub high_traction_misses: Vec<String>,
    /// Days from submission to resolution.
    pub horizon_days: i64,
}

/// Validates a submission and scores it against resolved truth.
///
/// With a roster, every ranked domain must be a known non-excluded startup.
pub fn evaluate(
    submission: &PredictionSubmission,
    truth: &ResolvedTruth,
    roster: Option<&Roster>,
) -> Result<EvaluationReport> {
    submission.validate(roster)?;
    if submission.batch != truth.batch {
        return Err(Error::InvalidSubmission(format!(
            "submission is for batch `{}` but truth is for `{}`",
            submission.batch, truth.batch
        )));
    }
    let k = truth.k();
    let precision = precision_at_k(submission, truth)?;
    let recall = recall_at_m(submission, truth)?;
    let (lift_exact, lift_paper_style) = lift_over_random(precision, k, truth.roster_size)?;

    let predicted: HashSet<&str> = predicted_top_k(submission, k)?.iter().map(String::as_str).collect();
    let split = |set: &[String]| -> (Vec<String>, Vec<String>) {
        set.iter().cloned().partition(|d| predicted.contains(d.as_str()))
    };
    let (hits, misses) = split(&truth.top_k_domains);
    let (high_traction_hits, high_traction_misses) = split(&truth.high_traction_domains);

    Ok(EvaluationReport {
        predictor_name: submission.predictor_name.clone(),
        batch: truth.batch.clone(),
        k,
        m: truth.m(),
        roster_size: truth.roster_size,
        precision_at_k: precision,
        recall_at_m: recall,
        random_precision: k as f64 / truth.roster_size as f64,
        lift_exact,
        lift_paper_style,
        hits,
        misses,
        high_traction_hits,
        high_traction_misses,
        horizon_days: (truth.resolved_at - submission.created_at.date_naive()).num_days(),
    })
}

impl EvaluationReport {
    /// Plain-text results table.
    pub fn to_table(&self) -> String {
        let pct = |v: f64| format!("{:.1}%", 100.0 * v);
        let rows = [
            (
                format!("Precision@{}", self.k),
                format!("{} ({}/{})", pct(self.precision_at_k), self.hits.len(), self.k),
                pct(self.random_precision),
            ),
            (
                format!("Recall@{}", self.m),
                match self.recall_at_m {
                    Some(r) => format!("{} ({}/{})", pct(r), self.high_traction_hits.len(), self.m),
                    None => "n/a".into(),
                },
                if self.m == 0 { "n/a".into() } else { pct(self.random_precision) },
            ),
            (
                "Lift over random".into(),
                format!("{:.2}x (vs 10%: {:.1}x)", self.lift_exact, self.lift_paper_style),
                "1x".into(),
            ),
            (
                "Forecasting horizon".into(),
                format!("{} days", self.horizon_days),
                "---".into(),
            ),
        ];
        let mut out = String::new();
        let name = if self.predictor_name.is_empty() { "Submission" } else { &self.predictor_name };
        let _ = writeln!(out, "{:<22} {:<32} Random", "Metric", name);
        for (metric, value, random) in rows {
            let _ = writeln!(out, "{metric:<22} {value:<32} {random}");
        }
        out
    }
}
