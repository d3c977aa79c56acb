use std::path::Path;

use crate::config::ScoringConfig;
use crate::error::{Error, Result};
use crate::io::read_jsonl;
use crate::model::{MentionRecord, Roster, SignalObservation};

/// Loads a curated traction JSONL file.
///
/// Every observation must parse (closed signal-kind set), satisfy its value
/// bounds, use a unit known to `config` and reference a roster domain.
/// Errors carry the offending line number.
pub fn load_traction(path: &Path, roster: &Roster, config: &ScoringConfig) -> Result<Vec<SignalObservation>> {
    let mut out = Vec::new();
    for (line, obs) in read_jsonl::<SignalObservation>(path)? {
        let fail = |e: Error| Error::parse(path, line, e.to_string());
        obs.validate().map_err(fail)?;
        if !config.unit_divisors.contains_key(&obs.unit) {
            return Err(fail(Error::UnknownUnit(obs.unit.clone())));
        }
        if roster.get(&obs.domain).is_none() {
            return Err(fail(Error::UnknownDomain(obs.domain.clone())));
        }
        out.push(obs);
    }
    Ok(out)
}

/// Loads a mentions JSONL file, validating each record.
pub fn load_mentions(path: &Path) -> Result<Vec<MentionRecord>> {
    read_jsonl::<MentionRecord>(path)?
        .into_iter()
        .map(|(line, rec)| {
            rec.validate()
                .map(|()| rec)
                .map_err(|e| Error::parse(path, line, e.to_string()))
        })
        .collect()
}
