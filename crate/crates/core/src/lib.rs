//! Core of the accelerator-batch forecasting benchmark.
//!
//! A batch is scored with a Pre-Demo Day Score: the larger of a traction
//! score (max of weighted disclosed signals, boosted by month-over-month
//! growth) and an attention score (weighted web-mention count). Submissions
//! are evaluated against the resulting top decile with Precision@K and
//! Recall@M.

pub mod analytics;
pub mod baseline;
pub mod config;
pub mod error;
pub mod evaluation;
pub mod ingest;
pub mod io;
pub mod manifest;
pub mod model;
pub mod scoring;

pub use config::{normalize_value, validate_config, ConfigViolation, ScoringConfig};
pub use error::{Error, Result};
pub use model::{
    normalize_domain, Driver, MentionRecord, PredictionSubmission, Roster, ScoreBreakdown,
    SignalKind, SignalObservation, StartupRecord,
};
