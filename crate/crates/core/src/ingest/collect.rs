//! Windowed mention collection against a search-results provider.
//!
//! The provider sits behind [`SearchTransport`] so tests can run against
//! canned responses. Every request goes through a disk cache keyed by
//! `(query, window_start, window_end)` and a sliding-window rate limiter.

use std::collections::VecDeque;
use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use chrono::{DateTime, NaiveDate, Utc};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::io::write_json;
use crate::model::{MentionRecord, Roster};

use super::window::CollectionWindow;

pub const DEFAULT_API_KEY_ENV: &str = "YCBENCH_SEARCH_API_KEY";

/// The exact query issued for a domain: the bare domain in double quotes.
/// Date restriction travels separately as provider parameters.
pub fn query_for_domain(domain: &str) -> String {
    format!("\"{domain}\"")
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SearchRequest {
    pub query: String,
    pub start: NaiveDate,
    pub end: NaiveDate,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TransportError {
    /// Non-success HTTP status.
    Http { status: u16, body: String },
    /// Provider signalled quota exhaustion or throttling.
    Quota(String),
    /// Provider returned an error payload.
    Provider(String),
    Network(String),
    Decode(String),
}

impl fmt::Display for TransportError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TransportError::Http { status, body } => write!(f, "HTTP {status}: {body}"),
            TransportError::Quota(m) => write!(f, "quota exceeded: {m}"),
            TransportError::Provider(m) => write!(f, "provider error: {m}"),
            TransportError::Network(m) => write!(f, "network error: {m}"),
            TransportError::Decode(m) => write!(f, "undecodable response: {m}"),
        }
    }
}

impl std::error::Error for TransportError {}

/// A search provider. Returns the provider's total-results estimate for the
/// windowed query; a query the index has nothing for is `Ok(0)`.
pub trait SearchTransport: Send + Sync {
    fn total_results(&self, request: &SearchRequest) -> Result<u64, TransportError>;
}

impl<T: SearchTransport + ?Sized> SearchTransport for &T {
    fn total_results(&self, request: &SearchRequest) -> Result<u64, TransportError> {
        (**self).total_results(request)
    }
}

impl<T: SearchTransport + ?Sized> SearchTransport for Box<T> {
    fn total_results(&self, request: &SearchRequest) -> Result<u64, TransportError> {
        (**self).total_results(request)
    }
}

/// Time source for rate limiting and backoff.
pub trait Clock: Send + Sync {
    /// Monotonic time since an arbitrary fixed origin.
    fn elapsed(&self) -> Duration;
    fn sleep(&self, d: Duration);
    fn utc_now(&self) -> DateTime<Utc>;
}

#[derive(Debug)]
pub struct SystemClock {
    origin: Instant,
}

impl Default for SystemClock {
    fn default() -> Self {
        Self {
            origin: Instant::now(),
        }
    }
}

impl Clock for SystemClock {
    fn elapsed(&self) -> Duration {
        self.origin.elapsed()
    }

    fn sleep(&self, d: Duration) {
        std::thread::sleep(d);
    }

    fn utc_now(&self) -> DateTime<Utc> {
        Utc::now()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollectorSettings {
    pub max_requests_per_second: f64,
    pub max_retries: u32,
    pub cache_dir: PathBuf,
    pub api_key_env_name: String,
    /// Upper bound on concurrently outstanding requests.
    pub max_in_flight: usize,
}

impl Default for CollectorSettings {
    fn default() -> Self {
        Self {
            max_requests_per_second: 2.0,
            max_retries: 3,
            cache_dir: PathBuf::from(".ycbench-cache"),
            api_key_env_name: DEFAULT_API_KEY_ENV.to_string(),
            max_in_flight: 4,
        }
    }
}

impl CollectorSettings {
    pub fn validate(&self) -> Result<()> {
        let r = self.max_requests_per_second;
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::Configuration(format!(
                "max_requests_per_second must be > 0, got {r}"
            )));
        }
        if self.max_in_flight == 0 {
            return Err(Error::Configuration("max_in_flight must be >= 1".into()));
        }
        Ok(())
    }

    /// Reads the provider key from the configured environment variable.
    pub fn api_key(&self) -> Result<String> {
        match std::env::var(&self.api_key_env_name) {
            Ok(k) if !k.trim().is_empty() => Ok(k),
            _ => Err(Error::Configuration(format!(
                "search API key missing: set the {} environment variable",
                self.api_key_env_name
            ))),
        }
    }
}

/// Sliding-window limiter: at most `capacity` permits in any `window`.
///
/// A rate `r >= 1` maps to `floor(r)` permits per second; `r < 1` maps to one
/// permit per `1/r` seconds. Either way no 1-second window ever sees more
/// than `r` requests.
pub struct RateLimiter {
    capacity: usize,
    window: Duration,
    issued: Mutex<VecDeque<Duration>>,
    clock: Arc<dyn Clock>,
}

impl RateLimiter {
    /// Slack added to the window to absorb scheduling jitter between permit
    /// and actual dispatch.
    const GUARD: Duration = Duration::from_millis(10);

    pub fn new(max_per_second: f64, clock: Arc<dyn Clock>) -> Self {
        let (capacity, secs) = if max_per_second >= 1.0 {
            (max_per_second.floor() as usize, 1.0)
        } else {
            (1, 1.0 / max_per_second)
        };
        Self {
            capacity,
            window: Duration::from_secs_f64(secs) + Self::GUARD,
            issued: Mutex::new(VecDeque::new()),
            clock,
        }
    }

    /// Blocks until a permit is available and returns the permit time.
    pub fn acquire(&self) -> Duration {
        loop {
            let wait = {
                let mut issued = self.issued.lock().expect("limiter lock");
                let now = self.clock.elapsed();
                while issued
                    .front()
                    .is_some_and(|&t| now.saturating_sub(t) >= self.window)
                {
                    issued.pop_front();
                }
                if issued.len() < self.capacity {
                    issued.push_back(now);
                    return now;
                }
                (issued[0] + self.window).saturating_sub(now)
            };
            self.clock.sleep(wait.max(Duration::from_micros(100)));
        }
    }
}

/// One cached provider answer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub query: String,
    pub window_start: NaiveDate,
    pub window_end: NaiveDate,
    pub total_results: u64,
    pub retrieved_at: DateTime<Utc>,
}

/// One JSON file per request under `dir`.
#[derive(Debug, Clone)]
pub struct MentionCache {
    dir: PathBuf,
}

impl MentionCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    /// SHA-256 over `query \n start \n end`, hex encoded.
    pub fn key(request: &SearchRequest) -> String {
        let mut h = Sha256::new();
        h.update(request.query.as_bytes());
        h.update(b"\n");
        h.update(request.start.to_string().as_bytes());
        h.update(b"\n");
        h.update(request.end.to_string().as_bytes());
        hex::encode(h.finalize())
    }

    pub fn path_for(&self, request: &SearchRequest) -> PathBuf {
        self.dir.join(format!("{}.json", Self::key(request)))
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// A missing or unreadable entry is a miss.
    pub fn get(&self, request: &SearchRequest) -> Option<CacheEntry> {
        let path = self.path_for(request);
        let text = std::fs::read_to_string(&path).ok()?;
        match serde_json::from_str::<CacheEntry>(&text) {
            Ok(e)
                if e.query == request.query
                    && e.window_start == request.start
                    && e.window_end == request.end =>
            {
                Some(e)
            }
            Ok(_) => {
                log::warn!("cache entry {} does not match its key; ignoring", path.display());
                None
            }
            Err(err) => {
                log::warn!("corrupt cache entry {}: {err}; ignoring", path.display());
                None
            }
        }
    }

    pub fn put(&self, entry: &CacheEntry) -> Result<()> {
        let request = SearchRequest {
            query: entry.query.clone(),
            start: entry.window_start,
            end: entry.window_end,
        };
        write_json(&self.path_for(&request), entry)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollectionFailure {
    pub domain: String,
    pub query: String,
    pub attempts: u32,
    pub error: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CollectionOutcome {
    /// Successful records in roster order.
    pub records: Vec<MentionRecord>,
    pub failures: Vec<CollectionFailure>,
    pub cache_hits: usize,
    pub requests_issued: usize,
}

impl CollectionOutcome {
    pub fn is_complete(&self) -> bool {
        self.failures.is_empty()
    }
}

pub struct MentionCollector<T> {
    transport: T,
    settings: CollectorSettings,
    clock: Arc<dyn Clock>,
}

impl<T: SearchTransport> MentionCollector<T> {
    pub fn new(transport: T, settings: CollectorSettings) -> Result<Self> {
        settings.validate()?;
        Ok(Self {
            transport,
            settings,
            clock: Arc::new(SystemClock::default()),
        })
    }

    pub fn with_clock(mut self, clock: Arc<dyn Clock>) -> Self {
        self.clock = clock;
        self
    }

    /// Collects one record per non-excluded roster domain.
    ///
    /// Cached answers are reused without touching the transport. Failed
    /// domains (after retries) are reported in `failures`; completed work is
    /// always kept.
    pub fn collect(&self, roster: &Roster, window: &CollectionWindow) -> Result<CollectionOutcome> {
        let cache = MentionCache::new(&self.settings.cache_dir);
        let domains: Vec<&str> = roster.candidates().map(|r| r.domain.as_str()).collect();
        let requests: Vec<SearchRequest> = domains
            .iter()
            .map(|d| SearchRequest {
                query: query_for_domain(d),
                start: window.start,
                end: window.end,
            })
            .collect();

        let mut slots: Vec<Option<std::result::Result<CacheEntry, CollectionFailure>>> =
            requests.iter().map(|r| cache.get(r).map(Ok)).collect();
        let cache_hits = slots.iter().filter(|s| s.is_some()).count();
        let misses: Vec<usize> = (0..slots.len()).filter(|&i| slots[i].is_none()).collect();

        let issued = AtomicUsize::new(0);
        if !misses.is_empty() {
            std::fs::create_dir_all(cache.dir()).map_err(|e| Error::io(cache.dir(), e))?;
            let limiter = RateLimiter::new(self.settings.max_requests_per_second, self.clock.clone());
            let next = AtomicUsize::new(0);
            let results = Mutex::new(Vec::with_capacity(misses.len()));
            let workers = self.settings.max_in_flight.min(misses.len());
            std::thread::scope(|scope| {
                for _ in 0..workers {
                    scope.spawn(|| loop {
                        let n = next.fetch_add(1, Ordering::SeqCst);
                        let Some(&slot) = misses.get(n) else { break };
                        let outcome = self.fetch(&requests[slot], domains[slot], &limiter, &issued, &cache);
                        results.lock().expect("results lock").push((slot, outcome));
                    });
                }
            });
            for (slot, outcome) in results.into_inner().expect("results lock") {
                slots[slot] = Some(outcome);
            }
        }

        let mut outcome = CollectionOutcome {
            cache_hits,
            requests_issued: issued.into_inner(),
            ..Default::default()
        };
        for (domain, slot) in domains.iter().zip(slots) {
            match slot.expect("every slot resolved") {
                Ok(entry) => outcome.records.push(MentionRecord {
                    domain: domain.to_string(),
                    window_start: entry.window_start,
                    window_end: entry.window_end,
                    count: entry.total_results,
                    query: entry.query,
                    retrieved_at: entry.retrieved_at,
                }),
                Err(failure) => outcome.failures.push(failure),
            }
        }
        Ok(outcome)
    }

    fn fetch(
        &self,
        request: &SearchRequest,
        domain: &str,
        limiter: &RateLimiter,
        issued: &AtomicUsize,
        cache: &MentionCache,
    ) -> std::result::Result<CacheEntry, CollectionFailure> {
        let max_attempts = self.settings.max_retries + 1;
        let mut last_error = String::new();
        for attempt in 1..=max_attempts {
            limiter.acquire();
            issued.fetch_add(1, Ordering::SeqCst);
            match self.transport.total_results(request) {
                Ok(total) => {
                    let entry = CacheEntry {
                        query: request.query.clone(),
                        window_start: request.start,
                        window_end: request.end,
                        total_results: total,
                        retrieved_at: self.clock.utc_now(),
                    };
                    if let Err(e) = cache.put(&entry) {
                        log::warn!("failed to cache {domain}: {e}");
                    }
                    return Ok(entry);
                }
                Err(e) => {
                    log::warn!("{domain}: attempt {attempt}/{max_attempts} failed: {e}");
                    last_error = e.to_string();
                    if attempt < max_attempts {
                        self.clock.sleep(backoff(attempt));
                    }
                }
            }
        }
        Err(CollectionFailure {
            domain: domain.to_string(),
            query: request.query.clone(),
            attempts: max_attempts,
            error: last_error,
        })
    }
}

fn backoff(attempt: u32) -> Duration {
    Duration::from_millis(250 * 2u64.pow(attempt.min(5) - 1))
}

/// Collects with the system clock. See [`MentionCollector::collect`].
pub fn collect_mentions<T: SearchTransport>(
    roster: &Roster,
    window: &CollectionWindow,
    settings: &CollectorSettings,
    transport: T,
) -> Result<CollectionOutcome> {
    MentionCollector::new(transport, settings.clone())?.collect(roster, window)
}
