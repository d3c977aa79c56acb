use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{read_list, write_atomic};
use crate::model::{normalize_domain, Roster, StartupRecord};

pub const ROSTER_HEADER: [&str; 6] = [
    "name",
    "domain",
    "batch",
    "one_liner",
    "excluded",
    "exclusion_reason",
];

#[derive(Debug, Deserialize, Serialize)]
struct RosterRow {
    name: String,
    domain: String,
    batch: String,
    one_liner: Option<String>,
    excluded: bool,
    exclusion_reason: Option<String>,
}

/// Loads a roster CSV, preserving file order.
///
/// Domains are lowercased on load. Malformed rows and duplicate domains are
/// reported with their file line number.
pub fn load_roster(path: &Path) -> Result<Roster> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::parse(path, 1, e.to_string()))?;

    let headers = reader
        .headers()
        .map_err(|e| Error::parse(path, 1, e.to_string()))?
        .clone();
    if headers.iter().ne(ROSTER_HEADER) {
        return Err(Error::parse(
            path,
            1,
            format!("expected header `{}`", ROSTER_HEADER.join(",")),
        ));
    }

    let mut records = Vec::new();
    let mut lines = std::collections::HashMap::new();
    for raw in reader.records() {
        let raw = raw.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            Error::parse(path, line, e.to_string())
        })?;
        let line = raw.position().map_or(0, |p| p.line() as usize);
        let row: RosterRow = raw
            .deserialize(Some(&headers))
            .map_err(|e| Error::parse(path, line, e.to_string()))?;
        let domain = normalize_domain(&row.domain).map_err(|e| Error::parse(path, line, e.to_string()))?;
        if let Some(first_line) = lines.insert(domain.clone(), line) {
            return Err(Error::DuplicateDomain {
                domain,
                first_line,
                line,
            });
        }
        let record = StartupRecord {
            name: row.name,
            domain,
            batch: row.batch,
            one_liner: row.one_liner.filter(|s| !s.is_empty()),
            excluded: row.excluded,
            exclusion_reason: row.exclusion_reason.filter(|s| !s.is_empty()),
        };
        record
            .validate()
            .map_err(|e| Error::parse(path, line, e.to_string()))?;
        records.push(record);
    }
    Roster::new(records)
}

pub fn roster_to_csv(records: &[StartupRecord]) -> Result<Vec<u8>> {
    // Header comes from the serialized field names, which match ROSTER_HEADER.
    let mut writer = csv::Writer::from_writer(Vec::new());
    if records.is_empty() {
        writer
            .write_record(ROSTER_HEADER)
            .map_err(|e| Error::Invalid(e.to_string()))?;
    }
    for r in records {
        writer
            .serialize(RosterRow {
                name: r.name.clone(),
                domain: r.domain.clone(),
                batch: r.batch.clone(),
                one_liner: r.one_liner.clone(),
                excluded: r.excluded,
                exclusion_reason: r.exclusion_reason.clone(),
            })
            .map_err(|e| Error::Invalid(e.to_string()))?;
    }
    writer.into_inner().map_err(|e| Error::Invalid(e.to_string()))
}

pub fn write_roster(path: &Path, records: &[StartupRecord]) -> Result<()> {
    write_atomic(path, &roster_to_csv(records)?)
}

/// Loads a plain domain list (one per line, `#` comments), such as the
/// externally disclosed high-traction set.
pub fn load_domain_list(path: &Path) -> Result<Vec<String>> {
    let mut out: Vec<String> = Vec::new();
    for entry in read_list(path)? {
        let domain = normalize_domain(&entry.value)
            .map_err(|e| Error::parse(path, entry.line, e.to_string()))?;
        if out.contains(&domain) {
            return Err(Error::parse(path, entry.line, format!("duplicate domain `{domain}`")));
        }
        out.push(domain);
    }
    Ok(out)
}
