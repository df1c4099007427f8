//! Per-relation-type training loop, prediction, and the pair → encoded-input
//! pipeline glue.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::features::{
    encode_segments, encode_window, segment, CandidatePair, EmbeddingMatrix, EncodeConfig,
    EncodedExample,
};
use crate::rules::PredictedRelation;

use super::{
    cross_entropy, rmsprop_step, CnnConfig, CnnModel, ModelKind, NeuralError, RmsPropConfig,
    RmsPropState,
};

/// Training hyper-parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub batch_size: usize,
    pub epochs: usize,
    pub optimizer: RmsPropConfig,
    pub seed: u64,
    pub shuffle: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            batch_size: 512,
            epochs: 15,
            optimizer: RmsPropConfig::default(),
            seed: 42,
            shuffle: true,
        }
    }
}

/// Loss and training-set F1 recorded after each epoch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochStats {
    pub epoch: usize,
    pub loss: f64,
    pub f1: f64,
}

/// Default decision threshold; a pair is emitted when its positive-class
/// probability is strictly greater.
pub const DEFAULT_THRESHOLD: f64 = 0.5;

/// Segments and encodes candidate pairs for the given architecture.
pub fn encode_pairs(
    kind: ModelKind,
    corpus: &Corpus,
    pairs: &[CandidatePair],
    emb: &EmbeddingMatrix,
    enc: &EncodeConfig,
) -> Result<Vec<EncodedExample>, NeuralError> {
    pairs
        .iter()
        .map(|pair| {
            let doc = corpus
                .get(&pair.doc_id)
                .ok_or_else(|| NeuralError::UnknownDocument(pair.doc_id.clone()))?;
            let ex = segment(doc, pair);
            Ok(match kind {
                ModelKind::Sentence => encode_window(&ex, pair.label, emb, enc),
                ModelKind::Segment => encode_segments(&ex, pair.label, emb, enc),
            })
        })
        .collect()
}

fn f1_against_labels(predicted: &[bool], labels: &[u8]) -> f64 {
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut fn_ = 0usize;
    for (p, l) in predicted.iter().zip(labels) {
        match (*p, *l) {
            (true, 1) => tp += 1,
            (true, 0) => fp += 1,
            (false, 1) => fn_ += 1,
            _ => {}
        }
    }
    if 2 * tp + fp + fn_ == 0 {
        0.0
    } else {
        2.0 * tp as f64 / (2 * tp + fp + fn_) as f64
    }
}

fn forward_probs(model: &CnnModel, examples: &[EncodedExample]) -> Result<Vec<f64>, NeuralError> {
    let mut probs = Vec::with_capacity(examples.len());
    for chunk in examples.chunks(256) {
        let fw = model.forward(chunk)?;
        for b in 0..chunk.len() {
            probs.push(fw.positive_prob(b));
        }
    }
    Ok(probs)
}

/// Trains one model on candidates of a single relation type.
///
/// Deterministic given the seed: model initialization and epoch shuffles
/// both derive from it, and updates run sequentially. Returns the model and
/// the per-epoch loss/F1 history (empty when `epochs` is 0).
pub fn train(
    kind: ModelKind,
    corpus: &Corpus,
    pairs: &[CandidatePair],
    emb: &EmbeddingMatrix,
    enc: &EncodeConfig,
    cnn: &CnnConfig,
    cfg: &TrainConfig,
) -> Result<(CnnModel, Vec<EpochStats>), NeuralError> {
    if pairs.is_empty() {
        return Err(NeuralError::EmptyCandidates);
    }
    if cfg.batch_size == 0 {
        return Err(NeuralError::Config("batch size must be at least 1".into()));
    }
    let rtype = pairs[0].rtype;
    if let Some(other) = pairs.iter().find(|p| p.rtype != rtype) {
        return Err(NeuralError::MixedRelationTypes {
            a: rtype,
            b: other.rtype,
        });
    }

    let examples = encode_pairs(kind, corpus, pairs, emb, enc)?;
    let labels: Vec<u8> = examples.iter().map(|e| e.label).collect();
    let mut model = CnnModel::new(kind, emb, enc.clone(), cnn.clone(), Some(rtype), cfg.seed)?;

    let mut shuffle_rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut state: Option<RmsPropState> = None;
    let mut history = Vec::with_capacity(cfg.epochs);
    let n = examples.len();

    for epoch in 0..cfg.epochs {
        let mut order: Vec<usize> = (0..n).collect();
        if cfg.shuffle {
            order.shuffle(&mut shuffle_rng);
        }
        let mut loss_sum = 0.0;
        for chunk in order.chunks(cfg.batch_size) {
            let batch: Vec<EncodedExample> =
                chunk.iter().map(|i| examples[*i].clone()).collect();
            let batch_labels: Vec<u8> = chunk.iter().map(|i| labels[*i]).collect();
            let fw = model.forward(&batch)?;
            loss_sum += cross_entropy(&fw.probs, &batch_labels)? * batch.len() as f64;
            let grads = model.backward(&fw, &batch_labels)?;
            let st = state.get_or_insert_with(|| RmsPropState::zeros_like(&grads.slots));
            let mut k = 0;
            model.for_each_param_mut(|p| {
                rmsprop_step(p, grads.slots[k].data(), st.slots[k].data_mut(), &cfg.optimizer);
                k += 1;
            });
        }
        let probs = forward_probs(&model, &examples)?;
        let predicted: Vec<bool> = probs.iter().map(|p| *p > DEFAULT_THRESHOLD).collect();
        history.push(EpochStats {
            epoch,
            loss: loss_sum / n as f64,
            f1: f1_against_labels(&predicted, &labels),
        });
    }
    Ok((model, history))
}

/// Positive-class probability for each candidate, using the model's own
/// embedding table and encode configuration.
pub fn predict_probs(
    model: &CnnModel,
    corpus: &Corpus,
    pairs: &[CandidatePair],
) -> Result<Vec<f64>, NeuralError> {
    if let Some(expected) = model.rtype {
        if let Some(bad) = pairs.iter().find(|p| p.rtype != expected) {
            return Err(NeuralError::RelationTypeMismatch {
                expected,
                got: bad.rtype,
            });
        }
    }
    let examples = encode_pairs(model.kind, corpus, pairs, &model.embedding, &model.encode)?;
    forward_probs(model, &examples)
}

/// Emits the triple of every pair whose positive-class probability is
/// strictly greater than `threshold`.
pub fn predict(
    model: &CnnModel,
    corpus: &Corpus,
    pairs: &[CandidatePair],
    threshold: f64,
) -> Result<Vec<PredictedRelation>, NeuralError> {
    let probs = predict_probs(model, corpus, pairs)?;
    Ok(pairs
        .iter()
        .zip(probs)
        .filter(|(_, p)| *p > threshold)
        .map(|(pair, _)| PredictedRelation {
            doc_id: pair.doc_id.clone(),
            attr: pair.attr.clone(),
            drug: pair.drug.clone(),
            rtype: pair.rtype,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::RelationType;
    use crate::testutil::{separable_corpus, small_embeddings};

    fn small_cfgs() -> (EncodeConfig, CnnConfig) {
        (
            EncodeConfig {
                window_len: 12,
                segment_lens: [6, 4, 6, 4, 6],
            },
            CnnConfig {
                kernel_widths: vec![2, 3],
                filters_per_width: 4,
                trainable_embeddings: false,
            },
        )
    }

    #[test]
    fn empty_candidates_is_an_error() {
        let (corpus, _) = separable_corpus(4);
        let emb = small_embeddings();
        let (enc, cnn) = small_cfgs();
        let err = train(
            ModelKind::Sentence,
            &corpus,
            &[],
            &emb,
            &enc,
            &cnn,
            &TrainConfig::default(),
        )
        .unwrap_err();
        assert!(matches!(err, NeuralError::EmptyCandidates));
    }

    #[test]
    fn mixed_relation_types_are_rejected() {
        let (corpus, mut pairs) = separable_corpus(4);
        pairs[0].rtype = RelationType::RouteDrug;
        let emb = small_embeddings();
        let (enc, cnn) = small_cfgs();
        let err = train(
            ModelKind::Sentence,
            &corpus,
            &pairs,
            &emb,
            &enc,
            &cnn,
            &TrainConfig::default(),
        )
        .unwrap_err();
        assert!(matches!(err, NeuralError::MixedRelationTypes { .. }));
    }

    #[test]
    fn zero_epochs_returns_initialized_model_and_empty_history() {
        let (corpus, pairs) = separable_corpus(6);
        let emb = small_embeddings();
        let (enc, cnn) = small_cfgs();
        let cfg = TrainConfig {
            epochs: 0,
            ..TrainConfig::default()
        };
        let (model, history) = train(
            ModelKind::Segment,
            &corpus,
            &pairs,
            &emb,
            &enc,
            &cnn,
            &cfg,
        )
        .unwrap();
        assert!(history.is_empty());
        assert_eq!(model.rtype, Some(RelationType::StrengthDrug));
    }

    #[test]
    fn identical_seeds_give_bit_identical_parameters() {
        let (corpus, pairs) = separable_corpus(10);
        let emb = small_embeddings();
        let (enc, cnn) = small_cfgs();
        let cfg = TrainConfig {
            batch_size: 4,
            epochs: 3,
            ..TrainConfig::default()
        };
        let run = || {
            train(ModelKind::Sentence, &corpus, &pairs, &emb, &enc, &cnn, &cfg)
                .unwrap()
                .0
        };
        let (a, b) = (run(), run());
        let collect = |m: &CnnModel| {
            let mut out: Vec<f64> = Vec::new();
            m.for_each_param(|p| out.extend_from_slice(p));
            out
        };
        assert_eq!(collect(&a), collect(&b));
    }

    #[test]
    fn separable_dataset_reaches_high_training_f1() {
        let (corpus, pairs) = separable_corpus(40);
        let emb = small_embeddings();
        let (enc, cnn) = small_cfgs();
        let cfg = TrainConfig {
            batch_size: 8,
            epochs: 20,
            ..TrainConfig::default()
        };
        for kind in [ModelKind::Sentence, ModelKind::Segment] {
            let (_, history) =
                train(kind, &corpus, &pairs, &emb, &enc, &cnn, &cfg).unwrap();
            let best = history.iter().map(|h| h.f1).fold(0.0, f64::max);
            assert!(best >= 0.95, "{kind:?} best f1 {best}");
        }
    }

    #[test]
    fn loss_decreases_on_separable_set_at_small_lr() {
        let (corpus, pairs) = separable_corpus(20);
        let emb = small_embeddings();
        let (enc, cnn) = small_cfgs();
        let cfg = TrainConfig {
            batch_size: 8,
            epochs: 10,
            optimizer: RmsPropConfig {
                learning_rate: 1e-4,
                ..RmsPropConfig::default()
            },
            ..TrainConfig::default()
        };
        let (_, history) =
            train(ModelKind::Sentence, &corpus, &pairs, &emb, &enc, &cnn, &cfg).unwrap();
        assert!(history.last().unwrap().loss < history.first().unwrap().loss);
    }

    #[test]
    fn predict_applies_strict_threshold() {
        let (corpus, pairs) = separable_corpus(20);
        let emb = small_embeddings();
        let (enc, cnn) = small_cfgs();
        let cfg = TrainConfig {
            batch_size: 8,
            epochs: 10,
            ..TrainConfig::default()
        };
        let (model, _) =
            train(ModelKind::Sentence, &corpus, &pairs, &emb, &enc, &cnn, &cfg).unwrap();
        let probs = predict_probs(&model, &corpus, &pairs).unwrap();
        let preds = predict(&model, &corpus, &pairs, DEFAULT_THRESHOLD).unwrap();
        let expected: Vec<&CandidatePair> = pairs
            .iter()
            .zip(&probs)
            .filter(|(_, p)| **p > DEFAULT_THRESHOLD)
            .map(|(pair, _)| pair)
            .collect();
        assert_eq!(preds.len(), expected.len());
        // Impossible threshold: nothing is strictly greater than 1.
        assert!(predict(&model, &corpus, &pairs, 1.0).unwrap().is_empty());
        // Empty input, empty output.
        assert!(predict(&model, &corpus, &[], DEFAULT_THRESHOLD)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn predict_rejects_mismatched_relation_type() {
        let (corpus, pairs) = separable_corpus(6);
        let emb = small_embeddings();
        let (enc, cnn) = small_cfgs();
        let cfg = TrainConfig {
            batch_size: 4,
            epochs: 1,
            ..TrainConfig::default()
        };
        let (model, _) =
            train(ModelKind::Sentence, &corpus, &pairs, &emb, &enc, &cnn, &cfg).unwrap();
        let mut other = pairs.clone();
        other[0].rtype = RelationType::RouteDrug;
        assert!(matches!(
            predict(&model, &corpus, &other, DEFAULT_THRESHOLD).unwrap_err(),
            NeuralError::RelationTypeMismatch { .. }
        ));
    }
}
