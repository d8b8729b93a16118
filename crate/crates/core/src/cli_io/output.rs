//! In-memory artifacts, atomic writes and run manifests.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::format::g12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

impl Artifact {
    pub fn new(name: impl Into<String>, bytes: impl Into<Vec<u8>>) -> Self {
        Self {
            name: name.into(),
            bytes: bytes.into(),
        }
    }

    pub fn json<T: Serialize>(name: impl Into<String>, value: &T) -> Result<Self> {
        let mut s = serde_json::to_string_pretty(value)?;
        s.push('\n');
        Ok(Self::new(name, s))
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// CSV text: `#` comment lines, a header, then rows of floats in `%.12g`.
#[derive(Debug, Clone, Default)]
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(comments: &[String], header: &[&str]) -> Self {
        let mut text = String::new();
        for c in comments {
            for line in c.lines() {
                text.push_str("# ");
                text.push_str(line);
                text.push('\n');
            }
        }
        text.push_str(&header.join(","));
        text.push('\n');
        Self { text }
    }

    pub fn row(&mut self, values: &[f64]) {
        let cells: Vec<String> = values.iter().map(|&v| g12(v)).collect();
        self.raw_row(&cells);
    }

    pub fn raw_row(&mut self, cells: &[String]) {
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
    }

    pub fn into_artifact(self, name: impl Into<String>) -> Artifact {
        Artifact::new(name, self.text)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub file: String,
    pub sha256: String,
    pub bytes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    pub version: String,
    pub config_sha256: String,
    pub seed: u64,
    pub jobs: usize,
    pub wall_time_seconds: f64,
    pub caveat: Option<String>,
    pub notes: Vec<String>,
    pub files: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn file_name(command: &str) -> String {
        format!("{command}.manifest.json")
    }

    pub fn entries(artifacts: &[Artifact]) -> Vec<ManifestEntry> {
        artifacts
            .iter()
            .map(|a| ManifestEntry {
                file: a.name.clone(),
                sha256: sha256_hex(&a.bytes),
                bytes: a.bytes.len(),
            })
            .collect()
    }
}

/// Writes every artifact through a temporary file and a rename; on failure the
/// files already renamed in this call are removed again.
pub fn write_atomically(dir: &Path, artifacts: &[Artifact]) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut staged = Vec::with_capacity(artifacts.len());
    for a in artifacts {
        if a.name.contains(['/', '\\']) || a.name.is_empty() {
            return Err(Error::invalid("out", format!("`{}` is not a plain file name", a.name)));
        }
        let mut tmp = tempfile::Builder::new()
            .prefix(&format!(".{}.", a.name))
            .suffix(".tmp")
            .tempfile_in(dir)?;
        tmp.write_all(&a.bytes)?;
        tmp.as_file().sync_all()?;
        staged.push((tmp, dir.join(&a.name)));
    }
    let mut done: Vec<PathBuf> = Vec::with_capacity(staged.len());
    for (tmp, target) in staged {
        match tmp.persist(&target) {
            Ok(_) => done.push(target),
            Err(e) => {
                for p in &done {
                    let _ = fs::remove_file(p);
                }
                return Err(Error::Io(e.error));
            }
        }
    }
    Ok(done)
}
