//! Run manifests: a JSON sidecar written next to every primary output so a
//! run can be audited and replayed. Re-running the recorded command must
//! reproduce the outputs byte-for-byte; only `duration_ms` may differ.

use serde::Serialize;
use std::path::{Path, PathBuf};

#[derive(Serialize)]
pub struct RunManifest {
    pub subcommand: &'static str,
    pub version: &'static str,
    pub config: serde_json::Value,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub seed: Option<u64>,
    pub duration_ms: u128,
}

/// `scores.csv` gets its manifest at `scores.csv.manifest.json`.
pub fn manifest_path(primary_out: &Path) -> PathBuf {
    let mut name = primary_out
        .file_name()
        .map(|n| n.to_os_string())
        .unwrap_or_default();
    name.push(".manifest.json");
    primary_out.with_file_name(name)
}

pub fn write(manifest: &RunManifest, primary_out: &Path) -> std::io::Result<()> {
    let mut text = serde_json::to_string_pretty(manifest).expect("manifest serializes");
    text.push('\n');
    std::fs::write(manifest_path(primary_out), text)
}
