use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A date range for mention collection, inclusive at both ends.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollectionWindow {
    pub label: String,
    pub start: NaiveDate,
    pub end: NaiveDate,
}

impl CollectionWindow {
    pub fn new(label: impl Into<String>, start: NaiveDate, end: NaiveDate) -> Result<Self> {
        if start >= end {
            return Err(Error::InvalidWindow {
                start: start.to_string(),
                end: end.to_string(),
            });
        }
        Ok(Self {
            label: label.into(),
            start,
            end,
        })
    }

    /// The W26 in-batch window, 2026-01-01..2026-03-17.
    pub fn w26_batch() -> Self {
        Self::new("batch", ymd(2026, 1, 1), ymd(2026, 3, 17)).expect("valid")
    }

    /// The W26 pre-application window, 2025-08-17..2025-10-31.
    pub fn w26_pre_application() -> Self {
        Self::new("pre_application", ymd(2025, 8, 17), ymd(2025, 10, 31)).expect("valid")
    }

    /// Number of calendar days covered, counting both endpoints.
    pub fn days(&self) -> i64 {
        (self.end - self.start).num_days() + 1
    }
}

fn ymd(y: i32, m: u32, d: u32) -> NaiveDate {
    NaiveDate::from_ymd_opt(y, m, d).expect("valid date")
}

impl fmt::Display for CollectionWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

impl FromStr for CollectionWindow {
    type Err = Error;

    /// Accepts `START..END` (ISO-8601 dates) or a preset name: `batch`,
    /// `pre_application`.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "batch" => return Ok(Self::w26_batch()),
            "pre_application" => return Ok(Self::w26_pre_application()),
            _ => {}
        }
        let (start, end) = s
            .split_once("..")
            .ok_or_else(|| Error::Invalid(format!("window `{s}` is not START..END")))?;
        let parse = |d: &str| {
            NaiveDate::parse_from_str(d.trim(), "%Y-%m-%d")
                .map_err(|e| Error::Invalid(format!("bad date `{d}` in window: {e}")))
        };
        Self::new("custom", parse(start)?, parse(end)?)
    }
}
