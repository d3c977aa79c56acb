//! Shared domain types.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, NaiveDate, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Lowercases and validates a domain key.
///
/// A valid key is non-empty, contains at least one dot and no whitespace.
pub fn normalize_domain(raw: &str) -> Result<String> {
    let domain = raw.trim().to_ascii_lowercase();
    if domain.is_empty()
        || !domain.contains('.')
        || domain.starts_with('.')
        || domain.ends_with('.')
        || domain.chars().any(char::is_whitespace)
    {
        return Err(Error::InvalidDomain(raw.to_string()));
    }
    Ok(domain)
}

fn is_normalized_domain(domain: &str) -> bool {
    normalize_domain(domain).is_ok_and(|d| d == domain)
}

/// One company of a batch, keyed by its domain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StartupRecord {
    pub name: String,
    pub domain: String,
    pub batch: String,
    pub one_liner: Option<String>,
    pub excluded: bool,
    pub exclusion_reason: Option<String>,
}

impl StartupRecord {
    pub fn new(name: impl Into<String>, domain: &str, batch: impl Into<String>) -> Result<Self> {
        Ok(Self {
            name: name.into(),
            domain: normalize_domain(domain)?,
            batch: batch.into(),
            one_liner: None,
            excluded: false,
            exclusion_reason: None,
        })
    }

    pub fn exclude(&mut self, reason: impl Into<String>) {
        self.excluded = true;
        self.exclusion_reason = Some(reason.into());
    }

    pub fn validate(&self) -> Result<()> {
        if !is_normalized_domain(&self.domain) {
            return Err(Error::InvalidDomain(self.domain.clone()));
        }
        if self.excluded && self.exclusion_reason.as_deref().is_none_or(str::is_empty) {
            return Err(Error::Invalid(format!(
                "`{}` is excluded without an exclusion reason",
                self.domain
            )));
        }
        Ok(())
    }
}

/// An ordered batch roster with a domain index.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Roster {
    records: Vec<StartupRecord>,
    index: HashMap<String, usize>,
}

impl Roster {
    /// Builds a roster, rejecting invalid records and duplicate domains.
    pub fn new(records: Vec<StartupRecord>) -> Result<Self> {
        let mut index = HashMap::with_capacity(records.len());
        for (i, record) in records.iter().enumerate() {
            record.validate()?;
            if let Some(first) = index.insert(record.domain.clone(), i) {
                return Err(Error::DuplicateDomain {
                    domain: record.domain.clone(),
                    first_line: first + 1,
                    line: i + 1,
                });
            }
        }
        Ok(Self { records, index })
    }

    pub fn records(&self) -> &[StartupRecord] {
        &self.records
    }

    pub fn into_records(self) -> Vec<StartupRecord> {
        self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, domain: &str) -> Option<&StartupRecord> {
        self.index.get(domain).map(|&i| &self.records[i])
    }

    pub(crate) fn get_mut(&mut self, i: usize) -> &mut StartupRecord {
        &mut self.records[i]
    }

    /// Non-excluded records in roster order.
    pub fn candidates(&self) -> impl Iterator<Item = &StartupRecord> {
        self.records.iter().filter(|r| !r.excluded)
    }

    pub fn candidate_count(&self) -> usize {
        self.candidates().count()
    }

    /// The batch tag shared by the roster, if every record agrees on one.
    pub fn batch(&self) -> Option<&str> {
        let first = self.records.first()?.batch.as_str();
        self.records
            .iter()
            .all(|r| r.batch == first)
            .then_some(first)
    }

    /// Resolves a domain to a known, non-excluded startup.
    pub fn resolve_candidate(&self, domain: &str) -> Result<&StartupRecord> {
        match self.get(domain) {
            None => Err(Error::UnknownDomain(domain.to_string())),
            Some(r) if r.excluded => Err(Error::ExcludedDomain(domain.to_string())),
            Some(r) => Ok(r),
        }
    }
}

/// Traction signal categories with their default weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SignalKind {
    ArrRevenue,
    PilotRevenue,
    LoiSignedContracts,
    ActiveUsers,
    ActivityVolume,
    Signups,
    EcosystemPull,
}

impl SignalKind {
    pub const ALL: [SignalKind; 7] = [
        SignalKind::ArrRevenue,
        SignalKind::PilotRevenue,
        SignalKind::LoiSignedContracts,
        SignalKind::ActiveUsers,
        SignalKind::ActivityVolume,
        SignalKind::Signups,
        SignalKind::EcosystemPull,
    ];

    pub fn default_weight(self) -> f64 {
        match self {
            SignalKind::ArrRevenue => 1.00,
            SignalKind::PilotRevenue => 0.50,
            SignalKind::LoiSignedContracts => 0.20,
            SignalKind::ActiveUsers => 0.40,
            SignalKind::ActivityVolume => 0.25,
            SignalKind::Signups => 0.15,
            SignalKind::EcosystemPull => 0.10,
        }
    }

    /// Wire name, e.g. `ARR_REVENUE`.
    pub fn as_str(self) -> &'static str {
        match self {
            SignalKind::ArrRevenue => "ARR_REVENUE",
            SignalKind::PilotRevenue => "PILOT_REVENUE",
            SignalKind::LoiSignedContracts => "LOI_SIGNED_CONTRACTS",
            SignalKind::ActiveUsers => "ACTIVE_USERS",
            SignalKind::ActivityVolume => "ACTIVITY_VOLUME",
            SignalKind::Signups => "SIGNUPS",
            SignalKind::EcosystemPull => "ECOSYSTEM_PULL",
        }
    }

    /// Lowercase form used in config keys, e.g. `arr_revenue`.
    pub fn config_key(self) -> String {
        self.as_str().to_ascii_lowercase()
    }
}

impl fmt::Display for SignalKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SignalKind {
    type Err = Error;

    /// Case-insensitive; accepts both `ARR_REVENUE` and `arr_revenue`.
    fn from_str(s: &str) -> Result<Self> {
        SignalKind::ALL
            .into_iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Invalid(format!("unknown signal kind `{s}`")))
    }
}

/// One disclosed traction datum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalObservation {
    pub domain: String,
    pub kind: SignalKind,
    pub raw_value: f64,
    pub unit: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mom_growth: Option<f64>,
    pub as_of: NaiveDate,
    pub source: String,
}

impl SignalObservation {
    pub fn validate(&self) -> Result<()> {
        if !is_normalized_domain(&self.domain) {
            return Err(Error::InvalidDomain(self.domain.clone()));
        }
        if !(self.raw_value.is_finite() && self.raw_value >= 0.0) {
            return Err(Error::Invalid(format!(
                "raw_value must be a non-negative number, got {}",
                self.raw_value
            )));
        }
        if let Some(g) = self.mom_growth {
            if !(g.is_finite() && g > -1.0) {
                return Err(Error::Invalid(format!(
                    "mom_growth must be greater than -1, got {g}"
                )));
            }
        }
        Ok(())
    }
}

/// A windowed web-mention count for one domain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MentionRecord {
    pub domain: String,
    pub window_start: NaiveDate,
    pub window_end: NaiveDate,
    pub count: u64,
    pub query: String,
    pub retrieved_at: DateTime<Utc>,
}

impl MentionRecord {
    pub fn validate(&self) -> Result<()> {
        if !is_normalized_domain(&self.domain) {
            return Err(Error::InvalidDomain(self.domain.clone()));
        }
        if self.window_start >= self.window_end {
            return Err(Error::InvalidWindow {
                start: self.window_start.to_string(),
                end: self.window_end.to_string(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Driver {
    Traction,
    Attention,
}

impl Driver {
    pub fn as_str(self) -> &'static str {
        match self {
            Driver::Traction => "TRACTION",
            Driver::Attention => "ATTENTION",
        }
    }
}

impl fmt::Display for Driver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Per-startup score with provenance.
///
/// `traction_score` is `None` when the startup disclosed no traction at all,
/// which is distinct from a disclosed score of zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreBreakdown {
    pub domain: String,
    pub traction_score: Option<f64>,
    pub base_traction_score: Option<f64>,
    pub dominant_signal: Option<SignalKind>,
    pub velocity_multiplier_applied: f64,
    pub mention_count: u64,
    pub attention_score: f64,
    pub pre_demo_day_score: f64,
    pub driver: Driver,
}

/// A ranked prediction for one batch, highest confidence first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PredictionSubmission {
    pub predictor_name: String,
    pub batch: String,
    pub created_at: DateTime<Utc>,
    pub ranked_domains: Vec<String>,
}

impl PredictionSubmission {
    /// Checks for duplicates and, when a roster is given, that every entry
    /// resolves to a known non-excluded startup.
    pub fn validate(&self, roster: Option<&Roster>) -> Result<()> {
        let mut seen = std::collections::HashSet::with_capacity(self.ranked_domains.len());
        for (i, domain) in self.ranked_domains.iter().enumerate() {
            if !seen.insert(domain.as_str()) {
                return Err(Error::InvalidSubmission(format!(
                    "duplicate domain `{domain}` at position {}",
                    i + 1
                )));
            }
            if let Some(roster) = roster {
                roster
                    .resolve_candidate(domain)
                    .map_err(|e| Error::InvalidSubmission(format!("position {}: {e}", i + 1)))?;
            }
        }
        Ok(())
    }
}
