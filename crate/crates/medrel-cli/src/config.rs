//! Optional JSON configuration file. Command-line flags override config
//! values, which override built-in defaults. `MEDREL_CONFIG` names a default
//! config path when `--config` is not given.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub corpus: Option<PathBuf>,
    pub gold: Option<PathBuf>,
    pub pred: Option<PathBuf>,
    pub embeddings: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub strict: Option<bool>,
    pub jobs: Option<usize>,

    // Rule engine.
    pub mechanism: Option<String>,
    pub mode: Option<String>,
    pub overrides: Option<BTreeMap<String, String>>,

    // Candidate generation / encoding.
    pub max_cross_sentences: Option<usize>,
    pub window_len: Option<usize>,
    pub segment_lens: Option<[usize; 5]>,

    // Model and training.
    pub model: Option<String>,
    pub kernel_widths: Option<Vec<usize>>,
    pub filters_per_width: Option<usize>,
    pub trainable_embeddings: Option<bool>,
    pub batch_size: Option<usize>,
    pub epochs: Option<usize>,
    pub learning_rate: Option<f64>,
    pub rho: Option<f64>,
    pub epsilon: Option<f64>,
    pub shuffle: Option<bool>,
    pub threshold: Option<f64>,
}

impl FileConfig {
    /// Loads `--config`, else `$MEDREL_CONFIG`, else empty defaults.
    pub fn load(flag: Option<&Path>) -> Result<FileConfig> {
        let path = match flag {
            Some(p) => Some(p.to_path_buf()),
            None => std::env::var_os("MEDREL_CONFIG").map(PathBuf::from),
        };
        let Some(path) = path else {
            return Ok(FileConfig::default());
        };
        let text =
            fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}
