//! Roster, traction and mention ingestion.

mod blocklist;
mod collect;
mod roster;
mod serpapi;
mod traction;
mod window;

pub use blocklist::{apply_exclusions, Blocklist, BlocklistEntry};
pub use collect::{
    collect_mentions, query_for_domain, CacheEntry, Clock, CollectionFailure, CollectionOutcome,
    CollectorSettings, MentionCache, MentionCollector, RateLimiter, SearchRequest, SearchTransport,
    SystemClock, TransportError, DEFAULT_API_KEY_ENV,
};
pub use roster::{load_domain_list, load_roster, roster_to_csv, write_roster, ROSTER_HEADER};
pub use serpapi::{date_range_param, parse_total_results, SerpApiTransport, SERPAPI_ENDPOINT};
pub use traction::{load_mentions, load_traction};
pub use window::CollectionWindow;
