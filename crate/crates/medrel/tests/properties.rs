//! Property tests over arbitrary text and randomly structured synthetic
//! corpora.

use proptest::prelude::*;

use medrel::corpus::{parse_ann, serialize_ann, split_sentences, tokenize, Document};
use medrel::eval::{score_relations, RelationKey};
use medrel::features::{encode_segments, encode_window, segment, EmbeddingMatrix, EncodeConfig, Label};
use medrel::rules::{extract_relations, RuleConfig};
use medrel::synth::{generate, SynthConfig};
use medrel::RelationType;

// Reconstructing the text from tokens plus the original inter-token gaps
// must reproduce it exactly.
proptest! {
    #[test]
    fn token_coverage_reconstructs_text(text in "\\PC{0,200}") {
        let chars: Vec<char> = text.chars().collect();
        let tokens = tokenize(&text);
        let mut rebuilt = String::new();
        let mut cursor = 0usize;
        for t in &tokens {
            rebuilt.extend(chars[cursor..t.span.start].iter());
            prop_assert_eq!(
                chars[t.span.start..t.span.end].iter().collect::<String>(),
                t.text.clone()
            );
            rebuilt.push_str(&t.text);
            cursor = t.span.end;
        }
        rebuilt.extend(chars[cursor..].iter());
        prop_assert_eq!(rebuilt, text.clone());
        // Tokens contain no whitespace and are sorted and non-overlapping.
        let mut prev_end = 0;
        for t in &tokens {
            prop_assert!(t.span.start >= prev_end);
            prop_assert!(!t.text.chars().any(char::is_whitespace));
            prev_end = t.span.end;
        }
    }

    #[test]
    fn sentences_partition_tokens(text in "\\PC{0,200}") {
        let tokens = tokenize(&text);
        let sentences = split_sentences(&text, &tokens);
        let total: usize = sentences.iter().map(|s| s.token_range.len()).sum();
        prop_assert_eq!(total, tokens.len());
        let mut next = 0;
        for s in &sentences {
            prop_assert_eq!(s.token_range.start, next);
            prop_assert!(s.token_range.end > s.token_range.start);
            next = s.token_range.end;
        }
        // Spans sorted and non-overlapping.
        for pair in sentences.windows(2) {
            prop_assert!(pair[0].span.end <= pair[1].span.start);
        }
    }

    #[test]
    fn bad_spans_are_rejected(start in 0usize..40, len in 0usize..10) {
        let text = "0123456789";
        let end = start + len;
        let ann = format!("T1\tDrug {start} {end}\txxx");
        let result = parse_ann(&ann, text, false);
        if start >= end || end > text.chars().count() {
            prop_assert!(result.is_err());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    // serialize -> parse -> serialize is byte-identical on arbitrary
    // generated corpora.
    #[test]
    fn generated_corpora_round_trip(seed in any::<u64>()) {
        let config = SynthConfig {
            seed,
            n_docs: 2,
            sentences_per_doc: (1, 4),
            p_multi_drug_sentence: 0.5,
            p_cross_sentence: 0.5,
            ..SynthConfig::default()
        };
        let gold = generate(&config).unwrap();
        for doc in &gold.corpus.documents {
            let first = serialize_ann(doc.entities(), doc.relations());
            let parsed = parse_ann(&first, &doc.text, true).unwrap();
            prop_assert!(parsed.warnings.is_empty());
            let second = serialize_ann(parsed.entities.iter(), parsed.relations.iter());
            prop_assert_eq!(first, second);
        }
    }

    // Rule extraction must not depend on entity storage order.
    #[test]
    fn rules_ignore_entity_storage_order(seed in any::<u64>()) {
        let config = SynthConfig {
            seed,
            n_docs: 1,
            sentences_per_doc: (2, 5),
            p_multi_drug_sentence: 0.6,
            ..SynthConfig::default()
        };
        let gold = generate(&config).unwrap();
        let doc = &gold.corpus.documents[0];
        let mut entities: Vec<_> = doc.entities().cloned().collect();
        let relations: Vec<_> = doc.relations().cloned().collect();
        let base = extract_relations(doc, &RuleConfig::default());
        entities.reverse();
        let permuted_doc =
            Document::new(doc.doc_id.clone(), doc.text.clone(), entities, relations).unwrap();
        let permuted = extract_relations(&permuted_doc, &RuleConfig::default());
        prop_assert_eq!(base, permuted);
    }

    // Scoring is invariant under duplication of predicted triples.
    #[test]
    fn duplicate_triples_change_nothing(seed in any::<u64>()) {
        let config = SynthConfig { seed, n_docs: 2, ..SynthConfig::default() };
        let gold = generate(&config).unwrap();
        let keys: Vec<RelationKey> = gold
            .corpus
            .documents
            .iter()
            .flat_map(|d| {
                d.relations()
                    .map(|r| RelationKey::new(d.doc_id.clone(), r.attr.clone(), r.drug.clone(), r.rtype))
                    .collect::<Vec<_>>()
            })
            .collect();
        let once = score_relations(&keys, &keys);
        let mut doubled = keys.clone();
        doubled.extend(keys.iter().cloned());
        let twice = score_relations(&keys, &doubled);
        prop_assert_eq!(once, twice);
    }

    // encode never errors and always produces exactly the configured
    // lengths, whatever the candidate geometry.
    #[test]
    fn encoding_is_total_and_fixed_length(seed in any::<u64>(), cap in 0usize..3) {
        let config = SynthConfig {
            seed,
            n_docs: 1,
            sentences_per_doc: (1, 5),
            p_multi_drug_sentence: 0.5,
            p_cross_sentence: 0.5,
            ..SynthConfig::default()
        };
        let gold = generate(&config).unwrap();
        let emb = EmbeddingMatrix::from_vectors(
            [("started".to_string(), vec![0.1, 0.2])],
            None,
        )
        .unwrap();
        let enc = EncodeConfig {
            window_len: 12,
            segment_lens: [5, 3, 6, 3, 5],
        };
        for doc in &gold.corpus.documents {
            for rtype in RelationType::ALL {
                for pair in medrel::features::generate_candidates(doc, rtype, cap).pairs {
                    let ex = segment(doc, &pair);
                    let w = encode_window(&ex, Label::Negative, &emb, &enc);
                    prop_assert_eq!(w.sequences.len(), 1);
                    prop_assert_eq!(w.sequences[0].len(), enc.window_len);
                    let s = encode_segments(&ex, pair.label, &emb, &enc);
                    prop_assert_eq!(s.sequences.len(), 5);
                    for (seq, len) in s.sequences.iter().zip(enc.segment_lens) {
                        prop_assert_eq!(seq.len(), len);
                        prop_assert!(seq.iter().all(|i| *i < emb.n_rows()));
                    }
                }
            }
        }
    }
}
