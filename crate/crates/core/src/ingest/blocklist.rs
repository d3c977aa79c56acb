//! Homonym / common-expression exclusion filter.

use std::path::Path;

use crate::error::{Error, Result};
use crate::io::{parse_list, ListEntry};
use crate::model::Roster;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlocklistEntry {
    /// Lowercase domain pattern; `*` matches any run of characters.
    pub pattern: String,
    pub reason: Option<String>,
}

impl BlocklistEntry {
    pub fn matches(&self, domain: &str) -> bool {
        glob_match(self.pattern.as_bytes(), domain.as_bytes())
    }

    fn reason_text(&self) -> String {
        match &self.reason {
            Some(r) => r.clone(),
            None => format!("blocklist match: {}", self.pattern),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Blocklist {
    pub entries: Vec<BlocklistEntry>,
}

impl Blocklist {
    pub fn parse(text: &str) -> Result<Self> {
        parse_list(text).into_iter().map(entry_from).collect::<Result<_>>().map(|entries| Self { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Parse { line, message, .. } => Error::parse(path, line, message),
            other => other,
        })
    }

    pub fn from_patterns<S: AsRef<str>>(patterns: &[S]) -> Self {
        Self {
            entries: patterns
                .iter()
                .map(|p| BlocklistEntry {
                    pattern: p.as_ref().trim().to_ascii_lowercase(),
                    reason: None,
                })
                .collect(),
        }
    }

    pub fn first_match(&self, domain: &str) -> Option<&BlocklistEntry> {
        self.entries.iter().find(|e| e.matches(domain))
    }
}

fn entry_from(entry: ListEntry) -> Result<BlocklistEntry> {
    let pattern = entry.value.to_ascii_lowercase();
    if pattern.chars().any(char::is_whitespace) {
        return Err(Error::Parse {
            path: Default::default(),
            line: entry.line,
            message: format!("pattern `{pattern}` contains whitespace"),
        });
    }
    Ok(BlocklistEntry {
        pattern,
        reason: entry.comment,
    })
}

/// Marks every record matching a blocklist pattern as excluded. Records that
/// are already excluded keep their original reason. The record count never
/// changes.
pub fn apply_exclusions(mut roster: Roster, blocklist: &Blocklist) -> Roster {
    for i in 0..roster.len() {
        let record = roster.get_mut(i);
        if record.excluded {
            continue;
        }
        if let Some(entry) = blocklist.first_match(&record.domain) {
            record.exclude(entry.reason_text());
        }
    }
    roster
}

fn glob_match(pattern: &[u8], text: &[u8]) -> bool {
    let (mut p, mut t) = (0, 0);
    let mut star: Option<(usize, usize)> = None;
    while t < text.len() {
        if p < pattern.len() && pattern[p] == b'*' {
            star = Some((p, t));
            p += 1;
        } else if p < pattern.len() && pattern[p] == text[t] {
            p += 1;
            t += 1;
        } else if let Some((sp, st)) = star {
            p = sp + 1;
            t = st + 1;
            star = Some((sp, st + 1));
        } else {
            return false;
        }
    }
    pattern[p..].iter().all(|&c| c == b'*')
}
