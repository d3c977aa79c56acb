//! SerpAPI Google-search transport.

use std::time::Duration;

use serde_json::Value;

use super::collect::{CollectorSettings, SearchRequest, SearchTransport, TransportError};
use crate::error::Result;

pub const SERPAPI_ENDPOINT: &str = "https://serpapi.com/search.json";

pub struct SerpApiTransport {
    client: reqwest::blocking::Client,
    api_key: String,
    endpoint: String,
}

impl SerpApiTransport {
    pub fn new(api_key: String) -> Result<Self> {
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(30))
            .user_agent(concat!("ycbench/", env!("CARGO_PKG_VERSION")))
            .build()
            .map_err(|e| crate::error::Error::Configuration(e.to_string()))?;
        Ok(Self {
            client,
            api_key,
            endpoint: SERPAPI_ENDPOINT.to_string(),
        })
    }

    /// Reads the key from the environment variable named in `settings`;
    /// fails before any request is made when it is missing.
    pub fn from_settings(settings: &CollectorSettings) -> Result<Self> {
        Self::new(settings.api_key()?)
    }

    pub fn with_endpoint(mut self, endpoint: impl Into<String>) -> Self {
        self.endpoint = endpoint.into();
        self
    }
}

/// Google custom-date-range parameter, e.g. `cdr:1,cd_min:1/1/2026,cd_max:3/17/2026`.
pub fn date_range_param(request: &SearchRequest) -> String {
    format!(
        "cdr:1,cd_min:{},cd_max:{}",
        request.start.format("%-m/%-d/%Y"),
        request.end.format("%-m/%-d/%Y")
    )
}

/// Extracts the total-results estimate from a SerpAPI response body.
///
/// An empty result page (no `total_results`, or the provider's "no results"
/// error) is a count of zero.
pub fn parse_total_results(body: &Value) -> Result<u64, TransportError> {
    if let Some(err) = body.get("error").and_then(Value::as_str) {
        let lower = err.to_ascii_lowercase();
        if lower.contains("hasn't returned any results") || lower.contains("no results") {
            return Ok(0);
        }
        if lower.contains("run out of searches") || lower.contains("rate limit") {
            return Err(TransportError::Quota(err.to_string()));
        }
        return Err(TransportError::Provider(err.to_string()));
    }
    let info = body.get("search_information");
    match info.and_then(|i| i.get("total_results")) {
        None | Some(Value::Null) => Ok(0),
        Some(Value::Number(n)) => n
            .as_u64()
            .ok_or_else(|| TransportError::Decode(format!("total_results `{n}` is not a count"))),
        Some(Value::String(s)) => s
            .replace(',', "")
            .trim()
            .parse()
            .map_err(|_| TransportError::Decode(format!("total_results `{s}` is not a count"))),
        Some(other) => Err(TransportError::Decode(format!("unexpected total_results {other}"))),
    }
}

impl SearchTransport for SerpApiTransport {
    fn total_results(&self, request: &SearchRequest) -> Result<u64, TransportError> {
        let tbs = date_range_param(request);
        let response = self
            .client
            .get(&self.endpoint)
            .query(&[
                ("engine", "google"),
                ("q", request.query.as_str()),
                ("tbs", tbs.as_str()),
                ("api_key", self.api_key.as_str()),
            ])
            .send()
            .map_err(|e| TransportError::Network(e.without_url().to_string()))?;
        let status = response.status();
        let text = response
            .text()
            .map_err(|e| TransportError::Network(e.without_url().to_string()))?;
        if status.as_u16() == 429 {
            return Err(TransportError::Quota(text));
        }
        let body: Value = serde_json::from_str(&text).map_err(|e| {
            if status.is_success() {
                TransportError::Decode(e.to_string())
            } else {
                TransportError::Http {
                    status: status.as_u16(),
                    body: text.chars().take(200).collect(),
                }
            }
        })?;
        // SerpAPI reports "no results" as an error payload with a 200 or 400.
        match parse_total_results(&body) {
            Ok(n) => Ok(n),
            Err(e) if status.is_success() => Err(e),
            Err(TransportError::Provider(m)) => Err(TransportError::Http {
                status: status.as_u16(),
                body: m,
            }),
            Err(e) => Err(e),
        }
    }
}
