use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::io::write_json;

/// Record of one CLI run. Written after every other output of the run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config_fingerprint: Option<String>,
    pub input_paths: Vec<PathBuf>,
    pub output_paths: Vec<PathBuf>,
    pub started_at: DateTime<Utc>,
    pub finished_at: DateTime<Utc>,
    pub warnings: Vec<String>,
}

impl RunManifest {
    pub fn start(command: impl Into<String>) -> Self {
        let now = Utc::now();
        Self {
            command: command.into(),
            config_fingerprint: None,
            input_paths: Vec::new(),
            output_paths: Vec::new(),
            started_at: now,
            finished_at: now,
            warnings: Vec::new(),
        }
    }

    pub fn input(&mut self, path: impl AsRef<Path>) -> &mut Self {
        self.input_paths.push(path.as_ref().to_path_buf());
        self
    }

    pub fn output(&mut self, path: impl AsRef<Path>) -> &mut Self {
        self.output_paths.push(path.as_ref().to_path_buf());
        self
    }

    pub fn warn(&mut self, warning: impl Into<String>) -> &mut Self {
        self.warnings.push(warning.into());
        self
    }

    /// Stamps `finished_at` and writes the manifest to `path`.
    pub fn finish(mut self, path: &Path) -> Result<Self> {
        self.finished_at = Utc::now();
        write_json(path, &self)?;
        Ok(self)
    }
}
