//! Staged outputs and the run report.
//!
//! Nothing touches the destination paths until every output of a run has
//! been produced and checked; then each file is written to a sibling
//! temporary and renamed into place.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::exit::Failure;

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

#[derive(Debug, Clone, Serialize)]
pub struct FileRecord {
    pub path: String,
    pub bytes: usize,
    pub sha256: String,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub metrics: BTreeMap<String, Value>,
}

#[derive(Debug, Serialize)]
pub struct Timing {
    pub elapsed_ms: f64,
}

/// Machine-readable summary of one run.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub version: &'static str,
    pub parameters: BTreeMap<String, Value>,
    pub inputs: Vec<FileRecord>,
    pub outputs: Vec<FileRecord>,
    pub metrics: BTreeMap<String, Value>,
    pub warnings: Vec<String>,
    pub timing: Timing,
}

impl RunReport {
    pub fn new(command: &str) -> RunReport {
        RunReport {
            command: command.into(),
            version: env!("CARGO_PKG_VERSION"),
            parameters: BTreeMap::new(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            metrics: BTreeMap::new(),
            warnings: Vec::new(),
            timing: Timing { elapsed_ms: 0.0 },
        }
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) {
        self.parameters
            .insert(key.into(), serde_json::to_value(value).expect("parameter serializes"));
    }

    pub fn metric(&mut self, key: &str, value: impl Serialize) {
        self.metrics
            .insert(key.into(), serde_json::to_value(value).expect("metric serializes"));
    }

    pub fn input(&mut self, path: &Path, bytes: &[u8]) {
        self.inputs.push(FileRecord {
            path: path.display().to_string(),
            bytes: bytes.len(),
            sha256: sha256_hex(bytes),
            metrics: BTreeMap::new(),
        });
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

struct Pending {
    path: PathBuf,
    bytes: Vec<u8>,
    metrics: BTreeMap<String, Value>,
}

/// Outputs accumulated during a run, committed all at once.
#[derive(Default)]
pub struct Staged {
    files: Vec<Pending>,
    dirs: Vec<PathBuf>,
}

impl Staged {
    pub fn add(&mut self, path: impl Into<PathBuf>, bytes: impl Into<Vec<u8>>, metrics: BTreeMap<String, Value>) {
        self.files.push(Pending {
            path: path.into(),
            bytes: bytes.into(),
            metrics,
        });
    }

    /// Directory to create at commit time if it does not exist.
    pub fn dir(&mut self, path: impl Into<PathBuf>) {
        self.dirs.push(path.into());
    }

    pub fn commit(self) -> Result<Vec<FileRecord>, Failure> {
        let mut created = Vec::new();
        for d in &self.dirs {
            if !d.is_dir() {
                fs::create_dir_all(d).map_err(|e| Failure::io(d, e))?;
                created.push(d.clone());
            }
        }
        let mut temps: Vec<PathBuf> = Vec::new();
        let cleanup = |temps: &[PathBuf], created: &[PathBuf]| {
            for t in temps {
                let _ = fs::remove_file(t);
            }
            for d in created.iter().rev() {
                let _ = fs::remove_dir(d);
            }
        };
        for f in &self.files {
            let tmp = temp_sibling(&f.path);
            if let Err(e) = fs::write(&tmp, &f.bytes) {
                cleanup(&temps, &created);
                return Err(Failure::io(&f.path, e));
            }
            temps.push(tmp);
        }
        for (f, tmp) in self.files.iter().zip(&temps) {
            if let Err(e) = fs::rename(tmp, &f.path) {
                cleanup(&temps, &created);
                return Err(Failure::io(&f.path, e));
            }
        }
        Ok(self
            .files
            .into_iter()
            .map(|f| FileRecord {
                path: f.path.display().to_string(),
                bytes: f.bytes.len(),
                sha256: sha256_hex(&f.bytes),
                metrics: f.metrics,
            })
            .collect())
    }
}

fn temp_sibling(path: &Path) -> PathBuf {
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    path.with_file_name(format!(".{name}.{}.partial", std::process::id()))
}
