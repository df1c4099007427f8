//! Run directories and self-describing manifests.
//!
//! Every artifact-producing subcommand writes into its own run directory
//! containing a `manifest.json` with the effective configuration, the seed,
//! the tool version, and SHA-256 checksums of all inputs and outputs, so a
//! run can be reproduced and verified from the manifest alone.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub created_utc: String,
    pub seed: Option<u64>,
    pub config: serde_json::Value,
    pub inputs: BTreeMap<String, String>,
    pub outputs: BTreeMap<String, String>,
}

impl Manifest {
    pub fn new(command: &str, seed: Option<u64>, config: serde_json::Value) -> Manifest {
        Manifest {
            tool: "medrel".to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            created_utc: chrono::Utc::now().to_rfc3339(),
            seed,
            config,
            inputs: BTreeMap::new(),
            outputs: BTreeMap::new(),
        }
    }

    pub fn record_input(&mut self, path: &Path) -> Result<()> {
        self.inputs
            .insert(path.display().to_string(), checksum_path(path)?);
        Ok(())
    }

    /// Checksums every file under the run directory (except the manifest
    /// itself) and writes `manifest.json`.
    pub fn finalize(mut self, run_dir: &Path) -> Result<()> {
        let mut files = Vec::new();
        collect_files(run_dir, &mut files)?;
        files.sort();
        for f in files {
            let rel = f
                .strip_prefix(run_dir)
                .unwrap_or(&f)
                .display()
                .to_string();
            if rel == "manifest.json" {
                continue;
            }
            self.outputs.insert(rel, checksum_file(&f)?);
        }
        let path = run_dir.join("manifest.json");
        let json = serde_json::to_string_pretty(&self)?;
        fs::write(&path, json).with_context(|| format!("writing {}", path.display()))?;
        Ok(())
    }
}

/// Creates `<out>/<name>` (default name: UTC timestamp). Fails if the
/// directory already exists, so runs never overwrite each other.
pub fn create_run_dir(out: &Path, run_name: Option<&str>) -> Result<PathBuf> {
    let name = match run_name {
        Some(n) => n.to_string(),
        None => format!("run-{}", chrono::Utc::now().format("%Y%m%dT%H%M%S%3fZ")),
    };
    let dir = out.join(name);
    if dir.exists() {
        bail!("run directory {} already exists", dir.display());
    }
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    Ok(dir)
}

fn hex(digest: &[u8]) -> String {
    digest.iter().fold(String::new(), |mut acc, b| {
        write!(acc, "{b:02x}").unwrap();
        acc
    })
}

pub fn checksum_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(hex(&Sha256::digest(&bytes)))
}

/// SHA-256 of a file, or of a directory's sorted (relative name, content)
/// pairs.
pub fn checksum_path(path: &Path) -> Result<String> {
    if path.is_file() {
        return checksum_file(path);
    }
    let mut files = Vec::new();
    collect_files(path, &mut files)?;
    files.sort();
    let mut hasher = Sha256::new();
    for f in &files {
        let rel = f.strip_prefix(path).unwrap_or(f);
        hasher.update(rel.display().to_string().as_bytes());
        hasher.update([0]);
        let bytes = fs::read(f).with_context(|| format!("reading {}", f.display()))?;
        hasher.update(&bytes);
        hasher.update([0]);
    }
    Ok(hex(&hasher.finalize()))
}

fn collect_files(dir: &Path, out: &mut Vec<PathBuf>) -> Result<()> {
    for entry in fs::read_dir(dir).with_context(|| format!("reading {}", dir.display()))? {
        let path = entry?.path();
        if path.is_dir() {
            collect_files(&path, out)?;
        } else {
            out.push(path);
        }
    }
    Ok(())
}
