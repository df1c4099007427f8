//! Self-contained f64 CNN kernel for binary relation classification:
//! embedding lookup, 1-D convolution, ReLU, max-pool over time, and a dense
//! softmax head, with exact backpropagation.
//!
//! The sentence variant runs one convolution unit over the whole window; the
//! segment variant runs five independent units (preceding, concept1, middle,
//! concept2, succeeding) and concatenates their pooled features, in that
//! fixed order, before the dense layer.
//!
//! Everything is deterministic given a seed: initialization draws from a
//! seeded stream, batches are processed sequentially, and reductions have a
//! fixed order.

mod checkpoint;
mod optim;
mod tensor;
mod train;

pub use checkpoint::{load_model, model_to_json, save_model, CHECKPOINT_VERSION};
pub use optim::{rmsprop_step, RmsPropConfig, RmsPropState};
pub use tensor::Tensor;
pub use train::{encode_pairs, predict, predict_probs, train, EpochStats, TrainConfig};

use std::path::PathBuf;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::RelationType;
use crate::features::{EmbeddingMatrix, EncodeConfig, EncodedExample};

#[derive(Debug, Error)]
pub enum NeuralError {
    #[error("shape mismatch in {what}: expected {expected}, got {got}")]
    ShapeMismatch {
        what: String,
        expected: usize,
        got: usize,
    },
    #[error("empty batch")]
    EmptyBatch,
    #[error("no training candidates")]
    EmptyCandidates,
    #[error("candidates mix relation types {a} and {b}")]
    MixedRelationTypes { a: RelationType, b: RelationType },
    #[error("model was trained for {expected}, got a {got} candidate")]
    RelationTypeMismatch {
        expected: RelationType,
        got: RelationType,
    },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("unknown document {0}")]
    UnknownDocument(String),
    #[error("checkpoint version {got} is unsupported (expected {expected})")]
    Version { expected: u32, got: u32 },
    #[error("checkpoint vocabulary hash does not match its word list")]
    VocabHash,
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("checkpoint serialization: {0}")]
    Serde(#[from] serde_json::Error),
}

/// Which architecture a model uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Sentence,
    Segment,
}

impl std::str::FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sentence" => Ok(ModelKind::Sentence),
            "segment" => Ok(ModelKind::Segment),
            _ => Err(format!("unknown model kind {s:?}")),
        }
    }
}

/// Architecture hyper-parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CnnConfig {
    pub kernel_widths: Vec<usize>,
    pub filters_per_width: usize,
    pub trainable_embeddings: bool,
}

impl Default for CnnConfig {
    fn default() -> Self {
        CnnConfig {
            kernel_widths: vec![3, 4, 5],
            filters_per_width: 100,
            trainable_embeddings: false,
        }
    }
}

/// One bank of convolution filters: for each kernel width, a weight tensor
/// `[filters, width, emb_dim]` and a bias vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvUnit {
    kernel_widths: Vec<usize>,
    filters_per_width: usize,
    weights: Vec<Tensor>,
    biases: Vec<Tensor>,
}

impl ConvUnit {
    fn init(widths: &[usize], filters: usize, emb_dim: usize, rng: &mut impl Rng) -> ConvUnit {
        let weights = widths
            .iter()
            .map(|w| Tensor::uniform([filters, *w, emb_dim], 0.05, rng))
            .collect();
        let biases = widths
            .iter()
            .map(|_| Tensor::uniform([filters], 0.05, rng))
            .collect();
        ConvUnit {
            kernel_widths: widths.to_vec(),
            filters_per_width: filters,
            weights,
            biases,
        }
    }

    /// Pooled feature width: one feature per filter per kernel width.
    pub fn out_features(&self) -> usize {
        self.kernel_widths.len() * self.filters_per_width
    }
}

/// A sentence- or segment-CNN with its embedding table, encode configuration,
/// and the relation type it classifies.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CnnModel {
    pub kind: ModelKind,
    pub rtype: Option<RelationType>,
    pub encode: EncodeConfig,
    pub config: CnnConfig,
    pub(crate) input_lens: Vec<usize>,
    pub(crate) embedding: EmbeddingMatrix,
    vocab_hash: String,
    pub(crate) convs: Vec<ConvUnit>,
    pub(crate) dense_w: Tensor,
    pub(crate) dense_b: Tensor,
}

impl CnnModel {
    /// Builds a freshly initialized model. All weights and biases draw from a
    /// ChaCha stream seeded with `seed`, uniform in `[-0.05, 0.05]`.
    pub fn new(
        kind: ModelKind,
        emb: &EmbeddingMatrix,
        encode: EncodeConfig,
        config: CnnConfig,
        rtype: Option<RelationType>,
        seed: u64,
    ) -> Result<CnnModel, NeuralError> {
        if config.kernel_widths.is_empty() || config.filters_per_width == 0 {
            return Err(NeuralError::Config(
                "need at least one kernel width and one filter".into(),
            ));
        }
        let input_lens: Vec<usize> = match kind {
            ModelKind::Sentence => vec![encode.window_len],
            ModelKind::Segment => encode.segment_lens.to_vec(),
        };
        let max_width = *config.kernel_widths.iter().max().unwrap();
        for (i, len) in input_lens.iter().enumerate() {
            if *len < max_width {
                return Err(NeuralError::Config(format!(
                    "input {i} length {len} is shorter than the widest kernel ({max_width})"
                )));
            }
        }
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let convs: Vec<ConvUnit> = input_lens
            .iter()
            .map(|_| {
                ConvUnit::init(
                    &config.kernel_widths,
                    config.filters_per_width,
                    emb.dim(),
                    &mut rng,
                )
            })
            .collect();
        let total_feats: usize = convs.iter().map(ConvUnit::out_features).sum();
        let dense_w = Tensor::uniform([2, total_feats], 0.05, &mut rng);
        let dense_b = Tensor::uniform([2], 0.05, &mut rng);
        Ok(CnnModel {
            kind,
            rtype,
            encode,
            config,
            input_lens,
            vocab_hash: emb.vocab_hash(),
            embedding: emb.clone(),
            convs,
            dense_w,
            dense_b,
        })
    }

    pub fn total_features(&self) -> usize {
        self.convs.iter().map(ConvUnit::out_features).sum()
    }

    pub fn vocab_hash(&self) -> &str {
        &self.vocab_hash
    }

    pub fn embedding(&self) -> &EmbeddingMatrix {
        &self.embedding
    }

    /// Visits every trainable parameter slice in the fixed enumeration order:
    /// embedding (only when trainable), conv weights and biases per channel
    /// and width, then the dense layer.
    pub fn for_each_param_mut(&mut self, mut f: impl FnMut(&mut [f64])) {
        if self.config.trainable_embeddings {
            f(self.embedding.rows_flat_mut());
        }
        for conv in &mut self.convs {
            for i in 0..conv.weights.len() {
                f(conv.weights[i].data_mut());
                f(conv.biases[i].data_mut());
            }
        }
        f(self.dense_w.data_mut());
        f(self.dense_b.data_mut());
    }

    pub fn for_each_param(&self, mut f: impl FnMut(&[f64])) {
        if self.config.trainable_embeddings {
            f(self.embedding.rows_flat());
        }
        for conv in &self.convs {
            for i in 0..conv.weights.len() {
                f(conv.weights[i].data());
                f(conv.biases[i].data());
            }
        }
        f(self.dense_w.data());
        f(self.dense_b.data());
    }

    pub fn param_names(&self) -> Vec<String> {
        let mut names = Vec::new();
        if self.config.trainable_embeddings {
            names.push("embedding".to_string());
        }
        for (c, conv) in self.convs.iter().enumerate() {
            for w in &conv.kernel_widths {
                names.push(format!("conv{c}.w{w}"));
                names.push(format!("conv{c}.b{w}"));
            }
        }
        names.push("dense.w".to_string());
        names.push("dense.b".to_string());
        names
    }

    fn check_batch(&self, batch: &[EncodedExample]) -> Result<(), NeuralError> {
        if batch.is_empty() {
            return Err(NeuralError::EmptyBatch);
        }
        let vocab_rows = self.embedding.n_rows();
        for (b, ex) in batch.iter().enumerate() {
            if ex.sequences.len() != self.input_lens.len() {
                return Err(NeuralError::ShapeMismatch {
                    what: format!("example {b} channel count"),
                    expected: self.input_lens.len(),
                    got: ex.sequences.len(),
                });
            }
            for (c, seq) in ex.sequences.iter().enumerate() {
                if seq.len() != self.input_lens[c] {
                    return Err(NeuralError::ShapeMismatch {
                        what: format!("example {b} channel {c} length"),
                        expected: self.input_lens[c],
                        got: seq.len(),
                    });
                }
                if let Some(bad) = seq.iter().find(|i| **i >= vocab_rows) {
                    return Err(NeuralError::ShapeMismatch {
                        what: format!("example {b} channel {c} token index {bad}"),
                        expected: vocab_rows,
                        got: *bad,
                    });
                }
            }
        }
        Ok(())
    }

    /// Runs the network over a batch, returning class probabilities
    /// `[batch, 2]` (column 1 is the positive class) plus the caches needed
    /// by [`CnnModel::backward`].
    #[allow(clippy::needless_range_loop)]
    pub fn forward(&self, batch: &[EncodedExample]) -> Result<Forward, NeuralError> {
        self.check_batch(batch)?;
        let dim = self.embedding.dim();
        let emb = self.embedding.rows_flat();
        let total = self.total_features();
        let mut probs = Tensor::zeros([batch.len(), 2]);
        let mut caches = Vec::with_capacity(batch.len());

        for (b, ex) in batch.iter().enumerate() {
            let mut pooled = vec![0.0; total];
            let mut argmax = vec![0usize; total];
            let mut pre_act = vec![0.0; total];
            let mut feat = 0;
            for (c, seq) in ex.sequences.iter().enumerate() {
                let conv = &self.convs[c];
                for (wi, width) in conv.kernel_widths.iter().enumerate() {
                    let wdata = conv.weights[wi].data();
                    let bias = conv.biases[wi].data();
                    let positions = seq.len() - width + 1;
                    for f in 0..conv.filters_per_width {
                        let wbase = f * width * dim;
                        let mut best = f64::NEG_INFINITY;
                        let mut best_t = 0;
                        let mut best_z = 0.0;
                        for t in 0..positions {
                            let mut z = bias[f];
                            for i in 0..*width {
                                let row = seq[t + i] * dim;
                                let x = &emb[row..row + dim];
                                let w = &wdata[wbase + i * dim..wbase + (i + 1) * dim];
                                z += dot(x, w);
                            }
                            let a = z.max(0.0);
                            if a > best {
                                best = a;
                                best_t = t;
                                best_z = z;
                            }
                        }
                        pooled[feat] = best;
                        argmax[feat] = best_t;
                        pre_act[feat] = best_z;
                        feat += 1;
                    }
                }
            }

            let dw = self.dense_w.data();
            let db = self.dense_b.data();
            let mut logits = [db[0], db[1]];
            for k in 0..2 {
                logits[k] += dot(&dw[k * total..(k + 1) * total], &pooled);
            }
            let m = logits[0].max(logits[1]);
            let e = [(logits[0] - m).exp(), (logits[1] - m).exp()];
            let sum = e[0] + e[1];
            probs.data_mut()[b * 2] = e[0] / sum;
            probs.data_mut()[b * 2 + 1] = e[1] / sum;

            caches.push(ExampleCache {
                sequences: ex.sequences.clone(),
                pooled,
                argmax,
                pre_act,
            });
        }
        Ok(Forward { probs, caches })
    }

    /// Gradients of the mean cross-entropy loss over the batch with respect
    /// to every trainable parameter, in the same order as
    /// [`CnnModel::for_each_param`]. `forward` must have been produced by
    /// this model on the same batch. When embeddings are trainable the
    /// padding row stays frozen (its gradient is zero), so padded positions
    /// keep contributing zero vectors.
    #[allow(clippy::needless_range_loop)]
    pub fn backward(&self, forward: &Forward, labels: &[u8]) -> Result<Gradients, NeuralError> {
        let batch = forward.caches.len();
        if labels.len() != batch {
            return Err(NeuralError::ShapeMismatch {
                what: "label count".into(),
                expected: batch,
                got: labels.len(),
            });
        }
        if labels.iter().any(|l| *l > 1) {
            return Err(NeuralError::ShapeMismatch {
                what: "label value".into(),
                expected: 1,
                got: *labels.iter().max().unwrap() as usize,
            });
        }
        let dim = self.embedding.dim();
        let emb = self.embedding.rows_flat();
        let total = self.total_features();

        let mut g_emb = if self.config.trainable_embeddings {
            Some(Tensor::zeros([self.embedding.n_rows(), dim]))
        } else {
            None
        };
        let mut g_conv_w: Vec<Vec<Tensor>> = self
            .convs
            .iter()
            .map(|c| c.weights.iter().map(Tensor::zeros_like).collect())
            .collect();
        let mut g_conv_b: Vec<Vec<Tensor>> = self
            .convs
            .iter()
            .map(|c| c.biases.iter().map(Tensor::zeros_like).collect())
            .collect();
        let mut g_dense_w = Tensor::zeros_like(&self.dense_w);
        let mut g_dense_b = Tensor::zeros_like(&self.dense_b);

        let inv_batch = 1.0 / batch as f64;
        for (b, cache) in forward.caches.iter().enumerate() {
            let p = &forward.probs.data()[b * 2..b * 2 + 2];
            let y = labels[b] as usize;
            let dlogit = [
                (p[0] - if y == 0 { 1.0 } else { 0.0 }) * inv_batch,
                (p[1] - if y == 1 { 1.0 } else { 0.0 }) * inv_batch,
            ];

            let dw = self.dense_w.data();
            for k in 0..2 {
                g_dense_b.data_mut()[k] += dlogit[k];
                let row = &mut g_dense_w.data_mut()[k * total..(k + 1) * total];
                for j in 0..total {
                    row[j] += dlogit[k] * cache.pooled[j];
                }
            }

            let mut feat = 0;
            for (c, seq) in cache.sequences.iter().enumerate() {
                let conv = &self.convs[c];
                for (wi, width) in conv.kernel_widths.iter().enumerate() {
                    let wdata = conv.weights[wi].data();
                    for f in 0..conv.filters_per_width {
                        let dpool = dlogit[0] * dw[feat] + dlogit[1] * dw[total + feat];
                        // ReLU gate at the pooled position.
                        if cache.pre_act[feat] > 0.0 && dpool != 0.0 {
                            let t = cache.argmax[feat];
                            let wbase = f * width * dim;
                            g_conv_b[c][wi].data_mut()[f] += dpool;
                            for i in 0..*width {
                                let row = seq[t + i] * dim;
                                let x = &emb[row..row + dim];
                                let gw = &mut g_conv_w[c][wi].data_mut()
                                    [wbase + i * dim..wbase + (i + 1) * dim];
                                for d in 0..dim {
                                    gw[d] += dpool * x[d];
                                }
                                if seq[t + i] != crate::features::PAD_INDEX {
                                    if let Some(ge) = g_emb.as_mut() {
                                        let w = &wdata[wbase + i * dim..wbase + (i + 1) * dim];
                                        let ge = &mut ge.data_mut()[row..row + dim];
                                        for d in 0..dim {
                                            ge[d] += dpool * w[d];
                                        }
                                    }
                                }
                            }
                        }
                        feat += 1;
                    }
                }
            }
        }

        let mut slots = Vec::new();
        if let Some(ge) = g_emb {
            slots.push(ge);
        }
        for c in 0..self.convs.len() {
            for wi in 0..self.convs[c].kernel_widths.len() {
                slots.push(g_conv_w[c][wi].clone());
                slots.push(g_conv_b[c][wi].clone());
            }
        }
        slots.push(g_dense_w);
        slots.push(g_dense_b);
        Ok(Gradients { slots })
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Forward-pass output: probabilities plus the per-example caches backward
/// needs (pooled features, argmax positions, pre-activations).
#[derive(Debug, Clone)]
pub struct Forward {
    pub probs: Tensor,
    pub(crate) caches: Vec<ExampleCache>,
}

impl Forward {
    /// Positive-class probability of one batch row.
    pub fn positive_prob(&self, row: usize) -> f64 {
        self.probs.data()[row * 2 + 1]
    }

    #[cfg(test)]
    pub(crate) fn pooled(&self, row: usize) -> &[f64] {
        &self.caches[row].pooled
    }
}

#[derive(Debug, Clone)]
pub(crate) struct ExampleCache {
    sequences: Vec<Vec<usize>>,
    pooled: Vec<f64>,
    argmax: Vec<usize>,
    pre_act: Vec<f64>,
}

/// Gradient tensors aligned with the model's parameter enumeration order.
#[derive(Debug, Clone)]
pub struct Gradients {
    pub slots: Vec<Tensor>,
}

impl Gradients {
    pub fn norm(&self) -> f64 {
        self.slots
            .iter()
            .map(|t| t.data().iter().map(|v| v * v).sum::<f64>())
            .sum::<f64>()
            .sqrt()
    }
}

/// Mean negative log-likelihood of the true classes; the log argument is
/// clamped at 1e-12.
pub fn cross_entropy(probs: &Tensor, labels: &[u8]) -> Result<f64, NeuralError> {
    let rows = probs.shape()[0];
    if labels.len() != rows {
        return Err(NeuralError::ShapeMismatch {
            what: "label count".into(),
            expected: rows,
            got: labels.len(),
        });
    }
    if rows == 0 {
        return Err(NeuralError::EmptyBatch);
    }
    let mut sum = 0.0;
    for (b, y) in labels.iter().enumerate() {
        let p = probs.data()[b * 2 + *y as usize];
        sum -= p.max(1e-12).ln();
    }
    Ok(sum / rows as f64)
}
