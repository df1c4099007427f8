//! Shared fixtures for unit tests.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Corpus, Document, Entity, EntityType, Relation, RelationType, Span};
use crate::features::{generate_candidates, CandidatePair, EmbeddingMatrix};

pub(crate) fn random_embeddings(vocab: usize, dim: usize, seed: u64) -> EmbeddingMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    EmbeddingMatrix::from_vectors(
        (0..vocab).map(|i| {
            let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-0.5..0.5)).collect();
            (format!("w{i}"), v)
        }),
        None,
    )
    .unwrap()
}

/// Embeddings covering the [`separable_corpus`] vocabulary.
pub(crate) fn small_embeddings() -> EmbeddingMatrix {
    let words = [
        "take", "aspirin", "81", "mg", "goodlink", "nolink", "daily", "now",
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(97);
    EmbeddingMatrix::from_vectors(
        words.iter().map(|w| {
            let v: Vec<f64> = (0..6).map(|_| rng.gen_range(-0.5..0.5)).collect();
            (w.to_string(), v)
        }),
        None,
    )
    .unwrap()
}

/// A linearly separable Strength-Drug dataset: positive windows carry the
/// token "goodlink" between the concepts, negative windows carry "nolink"
/// and no gold relation. Yields one candidate pair per document.
pub(crate) fn separable_corpus(n_docs: usize) -> (Corpus, Vec<CandidatePair>) {
    let mut docs = Vec::new();
    for i in 0..n_docs {
        let positive = i % 2 == 0;
        let marker = if positive { "goodlink" } else { "nolink" };
        let text = format!("take aspirin {marker} 81 mg daily");
        let drug_start = text.find("aspirin").unwrap();
        let strength_start = text.find("81 mg").unwrap();
        let entities = vec![
            Entity::new(
                "T1",
                EntityType::Drug,
                vec![Span::new(drug_start, drug_start + 7).unwrap()],
                "aspirin",
            )
            .unwrap(),
            Entity::new(
                "T2",
                EntityType::Strength,
                vec![Span::new(strength_start, strength_start + 5).unwrap()],
                "81 mg",
            )
            .unwrap(),
        ];
        let relations = if positive {
            vec![Relation::new("R1", RelationType::StrengthDrug, "T2", "T1")]
        } else {
            vec![]
        };
        docs.push(Document::new(format!("doc{i:03}"), text, entities, relations).unwrap());
    }
    let corpus = Corpus::new(docs);
    let mut pairs = Vec::new();
    for doc in &corpus.documents {
        pairs.extend(generate_candidates(doc, RelationType::StrengthDrug, 1).pairs);
    }
    (corpus, pairs)
}
