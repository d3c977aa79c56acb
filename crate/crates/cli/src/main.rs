//! `ycbench`: collect, score, baseline, evaluate and analyze an accelerator
//! batch.
//!
//! Exit codes: 0 success, 1 usage/config/validation error, 2 partial
//! collection failure.

use std::path::PathBuf;
use std::process::ExitCode;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand};
use ycbench_core::ingest::CollectionWindow;

mod commands;

#[derive(Debug, Parser)]
#[command(name = "ycbench", version, about = "Short-horizon startup forecasting benchmark harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Query windowed web-mention counts for every non-excluded roster domain.
    Collect(CollectArgs),
    /// Compute Pre-Demo Day Scores and a leaderboard.
    Score(ScoreArgs),
    /// Score a prediction submission against resolved truth.
    Evaluate(EvaluateArgs),
    /// Build the pre-application mention-count baseline submission.
    Baseline(BaselineArgs),
    /// Concentration statistics (Gini, Lorenz, top shares, power law) of mention counts.
    Analyze(AnalyzeArgs),
}

#[derive(Debug, Args)]
struct CollectArgs {
    /// Roster CSV.
    #[arg(long)]
    roster: PathBuf,
    /// Date window `START..END` (ISO-8601, both inclusive), or `batch` / `pre_application`.
    #[arg(long)]
    window: CollectionWindow,
    /// Output mentions JSONL.
    #[arg(long)]
    out: PathBuf,
    /// Homonym blocklist; matching domains are excluded and never queried.
    #[arg(long)]
    blocklist: Option<PathBuf>,
    /// Response cache directory.
    #[arg(long, default_value = ".ycbench-cache")]
    cache_dir: PathBuf,
    /// Request rate ceiling.
    #[arg(long, default_value_t = 2.0)]
    max_requests_per_second: f64,
    /// Retries per domain after the first attempt.
    #[arg(long, default_value_t = 3)]
    max_retries: u32,
    /// Concurrently outstanding requests.
    #[arg(long, default_value_t = 4)]
    max_in_flight: usize,
    /// Environment variable holding the search API key.
    #[arg(long, default_value = ycbench_core::ingest::DEFAULT_API_KEY_ENV)]
    api_key_env: String,
    /// Search provider endpoint.
    #[arg(long, default_value = ycbench_core::ingest::SERPAPI_ENDPOINT)]
    endpoint: String,
}

#[derive(Debug, Args)]
struct ScoreArgs {
    /// Roster CSV.
    #[arg(long)]
    roster: PathBuf,
    /// Traction observations JSONL.
    #[arg(long)]
    traction: PathBuf,
    /// Batch-window mentions JSONL.
    #[arg(long)]
    mentions: PathBuf,
    /// Scoring config (TOML); defaults are used when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Homonym blocklist applied to the roster before scoring.
    #[arg(long)]
    blocklist: Option<PathBuf>,
    /// Output directory for scores.jsonl, leaderboard.csv and manifest.json.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    /// Prediction submission JSON.
    #[arg(long)]
    submission: PathBuf,
    /// Resolved-truth JSON (as written by `--truth-out`).
    #[arg(long, conflicts_with_all = ["scores", "high_traction", "resolved_at", "top_fraction"])]
    truth: Option<PathBuf>,
    /// Scores JSONL to resolve truth from.
    #[arg(long, required_unless_present = "truth", requires_all = ["high_traction", "roster", "resolved_at"])]
    scores: Option<PathBuf>,
    /// Externally disclosed high-traction domain list.
    #[arg(long)]
    high_traction: Option<PathBuf>,
    /// Roster CSV; sets N and validates submission domains.
    #[arg(long)]
    roster: Option<PathBuf>,
    /// Homonym blocklist applied to the roster.
    #[arg(long, requires = "roster")]
    blocklist: Option<PathBuf>,
    /// Resolution date (Demo Day), ISO-8601.
    #[arg(long)]
    resolved_at: Option<NaiveDate>,
    /// K as a fraction of the full roster.
    #[arg(long, default_value_t = ycbench_core::config::DEFAULT_TOP_FRACTION)]
    top_fraction: f64,
    /// Explicit K; overrides --top-fraction. Must match a truth file's K.
    #[arg(long)]
    k: Option<usize>,
    /// Write the report JSON here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the resolved truth JSON here.
    #[arg(long, requires = "scores")]
    truth_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BaselineArgs {
    /// Pre-application-window mentions JSONL.
    #[arg(long)]
    pre_mentions: PathBuf,
    /// Roster CSV.
    #[arg(long)]
    roster: PathBuf,
    /// Homonym blocklist applied to the roster.
    #[arg(long)]
    blocklist: Option<PathBuf>,
    /// Submission size; defaults to ceil(top_fraction * roster size).
    #[arg(long)]
    k: Option<usize>,
    /// K as a fraction of the full roster when --k is absent.
    #[arg(long, default_value_t = ycbench_core::config::DEFAULT_TOP_FRACTION)]
    top_fraction: f64,
    /// Output submission JSON.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    /// Mentions JSONL.
    #[arg(long)]
    mentions: PathBuf,
    /// Output directory.
    #[arg(long)]
    out_dir: PathBuf,
    /// Roster CSV; when given, records for unknown or excluded domains are dropped.
    #[arg(long)]
    roster: Option<PathBuf>,
    /// Homonym blocklist applied to the roster.
    #[arg(long, requires = "roster")]
    blocklist: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };

    let result = match cli.command {
        Command::Collect(a) => commands::collect(a),
        Command::Score(a) => commands::score(a),
        Command::Evaluate(a) => commands::evaluate(a),
        Command::Baseline(a) => commands::baseline(a),
        Command::Analyze(a) => commands::analyze(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
