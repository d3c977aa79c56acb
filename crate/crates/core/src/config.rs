//! Scoring configuration: signal weights, unit divisors and aggregation knobs.
//!
//! The on-disk form is flat `key = value` text (TOML syntax):
//!
//! ```text
//! weight.arr_revenue = 1.0
//! weight.pilot_revenue = 0.5
//! unit_divisor.usd = 1000
//! unit_divisor.count = 100
//! attention_weight = 0.05
//! velocity_coefficient = 10
//! apply_velocity_only_when_positive = true
//! top_fraction = 0.10
//! ```
//!
//! Keys missing from a file keep their default values.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::model::{SignalKind, SignalObservation};

pub const DEFAULT_ATTENTION_WEIGHT: f64 = 0.05;
pub const DEFAULT_VELOCITY_COEFFICIENT: f64 = 10.0;
pub const DEFAULT_TOP_FRACTION: f64 = 0.10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoringConfig {
    pub weights: BTreeMap<SignalKind, f64>,
    pub unit_divisors: BTreeMap<String, f64>,
    pub attention_weight: f64,
    pub velocity_coefficient: f64,
    pub apply_velocity_only_when_positive: bool,
    pub top_fraction: f64,
}

impl Default for ScoringConfig {
    fn default() -> Self {
        let weights = SignalKind::ALL
            .into_iter()
            .map(|k| (k, k.default_weight()))
            .collect();
        // Revenue is scored in $K, counts in hundreds.
        let unit_divisors = [("usd", 1000.0), ("usd_k", 1.0), ("count", 100.0)]
            .into_iter()
            .map(|(tag, d)| (tag.to_string(), d))
            .collect();
        Self {
            weights,
            unit_divisors,
            attention_weight: DEFAULT_ATTENTION_WEIGHT,
            velocity_coefficient: DEFAULT_VELOCITY_COEFFICIENT,
            apply_velocity_only_when_positive: true,
            top_fraction: DEFAULT_TOP_FRACTION,
        }
    }
}

/// One failed config invariant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConfigViolation {
    /// Offending key in config-file notation, e.g. `weight.arr_revenue`.
    pub field: String,
    pub message: String,
}

impl fmt::Display for ConfigViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

/// Reports every violated config invariant; an empty list means valid.
pub fn validate_config(config: &ScoringConfig) -> Vec<ConfigViolation> {
    let mut out = Vec::new();
    let mut push = |field: String, message: String| out.push(ConfigViolation { field, message });

    for kind in SignalKind::ALL {
        let field = format!("weight.{}", kind.config_key());
        match config.weights.get(&kind) {
            None => push(field, "missing weight".into()),
            Some(&w) if !(w.is_finite() && w > 0.0) => {
                push(field, format!("weight must be > 0, got {w}"))
            }
            Some(_) => {}
        }
    }
    if config.unit_divisors.is_empty() {
        push("unit_divisor".into(), "at least one unit divisor is required".into());
    }
    for (tag, &d) in &config.unit_divisors {
        if !(d.is_finite() && d > 0.0) {
            push(
                format!("unit_divisor.{tag}"),
                format!("divisor must be > 0, got {d}"),
            );
        }
    }
    let w_m = config.attention_weight;
    if !(w_m.is_finite() && w_m > 0.0) {
        push("attention_weight".into(), format!("must be > 0, got {w_m}"));
    }
    let c = config.velocity_coefficient;
    if !(c.is_finite() && c >= 0.0) {
        push("velocity_coefficient".into(), format!("must be >= 0, got {c}"));
    }
    let f = config.top_fraction;
    if !(f.is_finite() && f > 0.0 && f <= 1.0) {
        push("top_fraction".into(), format!("must be in (0, 1], got {f}"));
    }
    out
}

/// Converts a raw disclosed value into scoring units: `raw_value / divisor(unit)`.
pub fn normalize_value(obs: &SignalObservation, config: &ScoringConfig) -> Result<f64> {
    let divisor = config
        .unit_divisors
        .get(&obs.unit)
        .ok_or_else(|| Error::UnknownUnit(obs.unit.clone()))?;
    Ok(obs.raw_value / divisor)
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    weight: BTreeMap<String, f64>,
    #[serde(default)]
    unit_divisor: BTreeMap<String, f64>,
    attention_weight: Option<f64>,
    velocity_coefficient: Option<f64>,
    apply_velocity_only_when_positive: Option<bool>,
    top_fraction: Option<f64>,
}

impl ScoringConfig {
    /// Parses config text over the defaults. Does not validate; call
    /// [`validate_config`] on the result.
    pub fn from_config_str(text: &str) -> Result<Self> {
        let raw: RawConfig =
            toml::from_str(text).map_err(|e| Error::Configuration(e.to_string()))?;
        let mut config = ScoringConfig::default();
        for (key, w) in raw.weight {
            let kind: SignalKind = key
                .parse()
                .map_err(|_| Error::Configuration(format!("unknown signal kind in `weight.{key}`")))?;
            config.weights.insert(kind, w);
        }
        // An explicit divisor table replaces the defaults wholesale so that
        // removed units really become unknown.
        if !raw.unit_divisor.is_empty() {
            config.unit_divisors = raw.unit_divisor;
        }
        if let Some(v) = raw.attention_weight {
            config.attention_weight = v;
        }
        if let Some(v) = raw.velocity_coefficient {
            config.velocity_coefficient = v;
        }
        if let Some(v) = raw.apply_velocity_only_when_positive {
            config.apply_velocity_only_when_positive = v;
        }
        if let Some(v) = raw.top_fraction {
            config.top_fraction = v;
        }
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_config_str(&text).map_err(|e| match e {
            Error::Configuration(msg) => Error::Configuration(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Loads and rejects configs with violations.
    pub fn load_validated(path: &Path) -> Result<Self> {
        let config = Self::load(path)?;
        let violations = validate_config(&config);
        if violations.is_empty() {
            Ok(config)
        } else {
            Err(Error::InvalidConfig(
                violations.iter().map(ToString::to_string).collect(),
            ))
        }
    }

    /// Renders the config in its file format; round-trips through
    /// [`ScoringConfig::from_config_str`].
    pub fn to_config_string(&self) -> String {
        let mut out = String::new();
        for (kind, w) in &self.weights {
            out.push_str(&format!("weight.{} = {}\n", kind.config_key(), fmt_f64(*w)));
        }
        for (tag, d) in &self.unit_divisors {
            out.push_str(&format!("unit_divisor.{} = {}\n", toml_key(tag), fmt_f64(*d)));
        }
        out.push_str(&format!("attention_weight = {}\n", fmt_f64(self.attention_weight)));
        out.push_str(&format!(
            "velocity_coefficient = {}\n",
            fmt_f64(self.velocity_coefficient)
        ));
        out.push_str(&format!(
            "apply_velocity_only_when_positive = {}\n",
            self.apply_velocity_only_when_positive
        ));
        out.push_str(&format!("top_fraction = {}\n", fmt_f64(self.top_fraction)));
        out
    }

    /// Stable SHA-256 over the canonical JSON form of the config.
    pub fn fingerprint(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(&canonical))
    }

    pub fn weight(&self, kind: SignalKind) -> f64 {
        self.weights.get(&kind).copied().unwrap_or(0.0)
    }
}

fn fmt_f64(v: f64) -> String {
    // TOML floats need a decimal point or exponent.
    let s = format!("{v:?}");
    if s.contains(['.', 'e', 'E']) || s.contains("inf") || s.contains("NaN") {
        s
    } else {
        format!("{s}.0")
    }
}

fn toml_key(tag: &str) -> String {
    if tag
        .chars()
        .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
    {
        tag.to_string()
    } else {
        format!("{tag:?}")
    }
}
