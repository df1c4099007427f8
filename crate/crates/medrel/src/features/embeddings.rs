//! Word-embedding text file loading (GloVe / word2vec text format).

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};
use thiserror::Error;

/// Row index of the all-zero padding vector.
pub const PAD_INDEX: usize = 0;
/// Row index of the unknown-word vector.
pub const UNK_INDEX: usize = 1;

// Fixed seed for the unknown-word row, so repeated loads of the same file
// produce identical matrices.
const UNK_ROW_SEED: u64 = 0x6d65_6472_656c;

#[derive(Debug, Error)]
pub enum EmbeddingError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: expected {expected} vector components, found {got}")]
    Ragged {
        line: usize,
        expected: usize,
        got: usize,
    },
    #[error("embedding dimension {got} does not match expected {expected}")]
    DimMismatch { expected: usize, got: usize },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("header declares {declared} vectors but file contains {actual}")]
    CountMismatch { declared: usize, actual: usize },
    #[error("embedding file contains no vectors")]
    Empty,
}

/// Vocabulary-indexed dense word vectors. Row 0 is the all-zero padding
/// vector, row 1 the unknown-word vector; file vocabulary starts at row 2 in
/// file order.
///
/// The word→row map is derived from the word list and is skipped during
/// (de)serialization; [`EmbeddingMatrix::rebuild_index`] restores it.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct EmbeddingMatrix {
    dim: usize,
    words: Vec<String>,
    #[serde(skip)]
    index: HashMap<String, usize>,
    rows: Vec<f64>,
}

impl EmbeddingMatrix {
    /// Builds a matrix from `(word, vector)` pairs. Vectors must share one
    /// dimension; duplicate words keep their first occurrence.
    pub fn from_vectors(
        pairs: impl IntoIterator<Item = (String, Vec<f64>)>,
        expected_dim: Option<usize>,
    ) -> Result<EmbeddingMatrix, EmbeddingError> {
        let mut dim = expected_dim;
        let mut words = Vec::new();
        let mut index = HashMap::new();
        let mut data: Vec<Vec<f64>> = Vec::new();
        for (word, vector) in pairs {
            let d = *dim.get_or_insert(vector.len());
            if vector.len() != d {
                return Err(EmbeddingError::DimMismatch {
                    expected: d,
                    got: vector.len(),
                });
            }
            if index.contains_key(&word) {
                continue;
            }
            index.insert(word.clone(), words.len() + 2);
            words.push(word);
            data.push(vector);
        }
        let dim = dim.ok_or(EmbeddingError::Empty)?;

        let mut rows = vec![0.0; (words.len() + 2) * dim];
        let mut rng = ChaCha8Rng::seed_from_u64(UNK_ROW_SEED);
        for v in rows[dim..2 * dim].iter_mut() {
            *v = rng.gen_range(-0.05..=0.05);
        }
        for (i, vector) in data.into_iter().enumerate() {
            rows[(i + 2) * dim..(i + 3) * dim].copy_from_slice(&vector);
        }
        Ok(EmbeddingMatrix {
            dim,
            words,
            index,
            rows,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Total row count: padding + unknown + vocabulary.
    pub fn n_rows(&self) -> usize {
        self.words.len() + 2
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows_flat(&self) -> &[f64] {
        &self.rows
    }

    // Mutable access for models fine-tuning their own embedding copy.
    pub(crate) fn rows_flat_mut(&mut self) -> &mut [f64] {
        &mut self.rows
    }

    pub(crate) fn rebuild_index(&mut self) {
        self.index = self
            .words
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i + 2))
            .collect();
    }

    /// Vocabulary words in row order (row = position + 2).
    pub fn words(&self) -> &[String] {
        &self.words
    }

    /// Row index for a word, or [`UNK_INDEX`] when absent. Callers are
    /// expected to lowercase before lookup.
    pub fn index_of(&self, word: &str) -> usize {
        self.index.get(word).copied().unwrap_or(UNK_INDEX)
    }

    /// Hash of the vocabulary identity (dimension plus word list), used to
    /// tie model checkpoints to the embedding table they were trained with.
    pub fn vocab_hash(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.dim.to_le_bytes());
        for w in &self.words {
            hasher.update(w.as_bytes());
            hasher.update(b"\n");
        }
        let digest = hasher.finalize();
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Loads a text-format embedding file: one `word v1 ... vd` line per vector,
/// optionally preceded by a `count dim` header line (two integer fields).
pub fn load_embeddings(
    path: &Path,
    expected_dim: Option<usize>,
) -> Result<EmbeddingMatrix, EmbeddingError> {
    let file = File::open(path).map_err(|e| EmbeddingError::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    let reader = BufReader::new(file);

    let mut declared: Option<(usize, usize)> = None;
    let mut dim = expected_dim;
    let mut pairs: Vec<(String, Vec<f64>)> = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line.map_err(|e| EmbeddingError::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if lineno == 1 && fields.len() == 2 {
            if let (Ok(count), Ok(d)) = (fields[0].parse::<usize>(), fields[1].parse::<usize>()) {
                if let Some(expected) = dim {
                    if d != expected {
                        return Err(EmbeddingError::DimMismatch {
                            expected,
                            got: d,
                        });
                    }
                }
                declared = Some((count, d));
                dim = Some(d);
                continue;
            }
        }
        if fields.len() < 2 {
            return Err(EmbeddingError::Malformed {
                line: lineno,
                message: "expected a word followed by vector components".into(),
            });
        }
        let word = fields[0].to_string();
        let d = *dim.get_or_insert(fields.len() - 1);
        if fields.len() - 1 != d {
            return Err(EmbeddingError::Ragged {
                line: lineno,
                expected: d,
                got: fields.len() - 1,
            });
        }
        let mut vector = Vec::with_capacity(d);
        for f in &fields[1..] {
            let v: f64 = f.parse().map_err(|_| EmbeddingError::Malformed {
                line: lineno,
                message: format!("bad vector component {f:?}"),
            })?;
            vector.push(v);
        }
        pairs.push((word, vector));
    }
    if let Some((count, _)) = declared {
        if count != pairs.len() {
            return Err(EmbeddingError::CountMismatch {
                declared: count,
                actual: pairs.len(),
            });
        }
    }
    EmbeddingMatrix::from_vectors(pairs, dim)
}
