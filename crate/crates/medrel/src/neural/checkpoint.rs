//! Model checkpointing: a versioned JSON file carrying the full model,
//! including its embedding table and vocabulary, so a checkpoint alone can
//! serve predictions. f64 values survive the JSON round trip bit-exactly.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{CnnModel, NeuralError};

pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Serialize)]
struct SaveFile<'a> {
    version: u32,
    model: &'a CnnModel,
}

#[derive(Deserialize)]
struct LoadFile {
    version: u32,
    model: CnnModel,
}

/// Serializes a model to its checkpoint JSON. Deterministic: identical
/// models produce identical bytes.
pub fn model_to_json(model: &CnnModel) -> Result<String, NeuralError> {
    Ok(serde_json::to_string(&SaveFile {
        version: CHECKPOINT_VERSION,
        model,
    })?)
}

pub fn save_model(model: &CnnModel, path: &Path) -> Result<(), NeuralError> {
    let json = model_to_json(model)?;
    fs::write(path, json).map_err(|e| NeuralError::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

/// Loads a checkpoint, verifying the version field and that the stored
/// vocabulary hash matches the stored word list.
pub fn load_model(path: &Path) -> Result<CnnModel, NeuralError> {
    let text = fs::read_to_string(path).map_err(|e| NeuralError::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    let file: LoadFile = serde_json::from_str(&text)?;
    if file.version != CHECKPOINT_VERSION {
        return Err(NeuralError::Version {
            expected: CHECKPOINT_VERSION,
            got: file.version,
        });
    }
    let mut model = file.model;
    model.embedding.rebuild_index();
    if model.embedding.vocab_hash() != model.vocab_hash {
        return Err(NeuralError::VocabHash);
    }
    Ok(model)
}
