//! Run manifest: configuration echo plus content hashes of every output.
//!
//! Hashes follow the git blob layout, `SHA-256("blob <len>\0" ‖ bytes)`. The
//! combined hash covers the sorted `(path, hash)` list. The manifest holds the
//! only timestamp of a run.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use sqglab::scenario::ScenarioConfig;
use sqglab::Error;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    /// Relative to the output directory, `/`-separated.
    pub path: String,
    pub bytes: u64,
    pub hash: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub config: ScenarioConfig,
    pub status: Value,
    pub outputs: Vec<ManifestEntry>,
    pub content_hash: String,
    pub created_unix: u64,
}

pub fn blob_hash(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", bytes.len()).as_bytes());
    h.update(bytes);
    hex(&h.finalize())
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn collect(dir: &Path, base: &Path, out: &mut Vec<PathBuf>) -> std::io::Result<()> {
    for entry in std::fs::read_dir(dir)? {
        let path = entry?.path();
        if path.is_dir() {
            collect(&path, base, out)?;
        } else if path != base.join(MANIFEST_FILE) {
            out.push(path);
        }
    }
    Ok(())
}

/// Hashes everything under `config.out_dir` and writes `manifest.json`.
pub fn write_manifest(config: &ScenarioConfig, status: &Value) -> Result<Manifest, Error> {
    let base = &config.out_dir;
    let mut files = Vec::new();
    collect(base, base, &mut files)?;
    let mut outputs = Vec::new();
    for f in files {
        let bytes = std::fs::read(&f)?;
        let rel = f
            .strip_prefix(base)
            .expect("collected under base")
            .components()
            .map(|c| c.as_os_str().to_string_lossy().into_owned())
            .collect::<Vec<_>>()
            .join("/");
        outputs.push(ManifestEntry {
            path: rel,
            bytes: bytes.len() as u64,
            hash: blob_hash(&bytes),
        });
    }
    outputs.sort_by(|a, b| a.path.cmp(&b.path));
    let listing: String = outputs.iter().map(|e| format!("{} {}\n", e.hash, e.path)).collect();
    let manifest = Manifest {
        config: config.clone(),
        status: status.clone(),
        content_hash: blob_hash(listing.as_bytes()),
        outputs,
        created_unix: std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
    };
    std::fs::write(base.join(MANIFEST_FILE), serde_json::to_vec_pretty(&manifest)?)?;
    Ok(manifest)
}
