//! Candidate-pair generation, five-segment windowing, and index encoding for
//! the CNN classifiers.
//!
//! For each relation type, every entity of that type's attribute side is
//! paired with every drug mention at most `max_cross_sentences` sentences
//! away; the window is the contiguous run of sentences covering both. The
//! pair is positive exactly when the gold annotations contain the triple.

mod embeddings;

pub use embeddings::{
    load_embeddings, EmbeddingError, EmbeddingMatrix, PAD_INDEX, UNK_INDEX,
};

use serde::{Deserialize, Serialize};

use crate::corpus::{Document, Entity, RelationType, Span, Token};

/// Gold label of a candidate pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Positive,
    Negative,
}

impl Label {
    pub fn is_positive(&self) -> bool {
        matches!(self, Label::Positive)
    }

    pub fn as_u8(&self) -> u8 {
        match self {
            Label::Positive => 1,
            Label::Negative => 0,
        }
    }
}

/// An (attribute, drug) pair with the sentence window containing both.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidatePair {
    pub doc_id: String,
    pub attr: String,
    pub drug: String,
    pub rtype: RelationType,
    pub label: Label,
    pub window: Span,
    pub window_tokens: Vec<Token>,
}

/// Candidates of one relation type for one document, plus the number of gold
/// pairs skipped because they exceeded the sentence-distance cap.
#[derive(Debug, Clone, Default)]
pub struct CandidateSet {
    pub pairs: Vec<CandidatePair>,
    pub dropped_gold_pairs: usize,
}

/// Default sentence-distance cap: the two entities may be at most one
/// sentence apart.
pub const DEFAULT_MAX_CROSS_SENTENCES: usize = 1;

/// Generates labeled candidate pairs of `rtype` for one document.
///
/// Gold relations whose entities are further apart than the cap are not
/// representable as candidates; they are counted in `dropped_gold_pairs` so
/// the recall ceiling stays measurable.
pub fn generate_candidates(
    doc: &Document,
    rtype: RelationType,
    max_cross_sentences: usize,
) -> CandidateSet {
    let sentence_of = doc.entity_sentence_index();
    let mut attrs: Vec<&Entity> = doc
        .entities()
        .filter(|e| e.etype == rtype.attribute_type())
        .collect();
    attrs.sort_by(|a, b| (a.anchor().start, &a.id).cmp(&(b.anchor().start, &b.id)));
    let mut drugs: Vec<&Entity> = doc
        .entities()
        .filter(|e| e.etype == crate::corpus::EntityType::Drug)
        .collect();
    drugs.sort_by(|a, b| (a.anchor().start, &a.id).cmp(&(b.anchor().start, &b.id)));

    let gold: std::collections::BTreeSet<(&str, &str)> = doc
        .relations()
        .filter(|r| r.rtype == rtype)
        .map(|r| (r.attr.as_str(), r.drug.as_str()))
        .collect();

    let mut set = CandidateSet::default();
    let mut emitted: std::collections::BTreeSet<(&str, &str)> = std::collections::BTreeSet::new();
    for attr in &attrs {
        let s_attr = sentence_of[&attr.id];
        for drug in &drugs {
            let s_drug = sentence_of[&drug.id];
            if s_attr.abs_diff(s_drug) > max_cross_sentences {
                continue;
            }
            let lo = s_attr.min(s_drug);
            let hi = s_attr.max(s_drug);
            let sents = doc.sentences();
            let window = Span {
                start: sents[lo].span.start,
                end: sents[hi].span.end,
            };
            let token_range = sents[lo].token_range.start..sents[hi].token_range.end;
            let label = if gold.contains(&(attr.id.as_str(), drug.id.as_str())) {
                Label::Positive
            } else {
                Label::Negative
            };
            emitted.insert((attr.id.as_str(), drug.id.as_str()));
            set.pairs.push(CandidatePair {
                doc_id: doc.doc_id.clone(),
                attr: attr.id.clone(),
                drug: drug.id.clone(),
                rtype,
                label,
                window,
                window_tokens: doc.tokens()[token_range].to_vec(),
            });
        }
    }
    set.dropped_gold_pairs = gold.iter().filter(|pair| !emitted.contains(*pair)).count();
    set
}

/// The five positional segments of a candidate window, in document order:
/// tokens before the first concept, the first concept, tokens between the
/// concepts, the second concept, and tokens after the second concept.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentedExample {
    pub preceding: Vec<Token>,
    pub concept1: Vec<Token>,
    pub middle: Vec<Token>,
    pub concept2: Vec<Token>,
    pub succeeding: Vec<Token>,
    /// Whether the drug is concept1 (i.e. precedes the attribute).
    pub drug_first: bool,
}

impl SegmentedExample {
    pub fn segments(&self) -> [&[Token]; 5] {
        [
            &self.preceding,
            &self.concept1,
            &self.middle,
            &self.concept2,
            &self.succeeding,
        ]
    }

    fn concept_token_bounds(&self) -> (usize, usize) {
        let core_start = self.preceding.len();
        let core_end =
            core_start + self.concept1.len() + self.middle.len() + self.concept2.len();
        (core_start, core_end)
    }
}

// Token index range covered by an entity within a window: [first, last+1) of
// tokens overlapping any fragment, or an empty range at the entity's
// insertion position when no token overlaps.
fn entity_token_range(entity: &Entity, tokens: &[Token]) -> (usize, usize) {
    let mut first = None;
    let mut last = None;
    for (i, t) in tokens.iter().enumerate() {
        if entity.fragments.iter().any(|f| f.overlaps(&t.span)) {
            first.get_or_insert(i);
            last = Some(i);
        }
    }
    match (first, last) {
        (Some(f), Some(l)) => (f, l + 1),
        _ => {
            let ins = tokens.partition_point(|t| t.span.end <= entity.start());
            (ins, ins)
        }
    }
}

/// Splits a candidate window into the five positional segments.
///
/// Tokens partially covered by a concept are assigned wholly to that concept;
/// when the two concepts' token ranges overlap, the shared tokens go to
/// concept1 and the middle segment is empty.
pub fn segment(doc: &Document, pair: &CandidatePair) -> SegmentedExample {
    let attr = doc.entity(&pair.attr).expect("attr resolves");
    let drug = doc.entity(&pair.drug).expect("drug resolves");
    let drug_first = (drug.anchor().start, &drug.id) < (attr.anchor().start, &attr.id);
    let (c1, c2) = if drug_first { (drug, attr) } else { (attr, drug) };

    let tokens = &pair.window_tokens;
    let (a, b1) = entity_token_range(c1, tokens);
    let (c, d1) = entity_token_range(c2, tokens);
    let c2_start = c.max(b1);
    let c2_end = d1.max(c2_start);

    SegmentedExample {
        preceding: tokens[..a].to_vec(),
        concept1: tokens[a..b1].to_vec(),
        middle: tokens[b1..c2_start].to_vec(),
        concept2: tokens[c2_start..c2_end].to_vec(),
        succeeding: tokens[c2_end..].to_vec(),
        drug_first,
    }
}

/// Fixed lengths for the padded index sequences.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodeConfig {
    /// Whole-window length for the sentence model.
    pub window_len: usize,
    /// Per-segment lengths, in segment order, for the segment model.
    pub segment_lens: [usize; 5],
}

impl Default for EncodeConfig {
    fn default() -> Self {
        EncodeConfig {
            window_len: 64,
            segment_lens: [16, 8, 32, 8, 16],
        }
    }
}

/// Padded, vocabulary-indexed input for one candidate: one sequence for the
/// sentence model, five for the segment model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedExample {
    pub sequences: Vec<Vec<usize>>,
    /// 1 for positive, 0 for negative.
    pub label: u8,
}

fn lookup(emb: &EmbeddingMatrix, token: &Token) -> usize {
    emb.index_of(&token.text.to_lowercase())
}

// Truncation keeping the end of the list nearest the concepts.
enum Keep {
    // Keep the last `max` tokens and pad at the front (preceding segment).
    Last,
    // Keep the first `max` tokens and pad at the back.
    First,
}

fn fit(ids: &[usize], max: usize, keep: Keep) -> Vec<usize> {
    let mut out = vec![PAD_INDEX; max];
    match keep {
        Keep::Last => {
            let kept = &ids[ids.len().saturating_sub(max)..];
            out[max - kept.len()..].copy_from_slice(kept);
        }
        Keep::First => {
            let kept = &ids[..ids.len().min(max)];
            out[..kept.len()].copy_from_slice(kept);
        }
    }
    out
}

// Range of window positions kept when the window exceeds `max`: the span
// covering both concepts is mandatory and the remainder expands outward,
// left first.
fn window_keep_range(len: usize, max: usize, core_start: usize, core_end: usize) -> (usize, usize) {
    if len <= max {
        return (0, len);
    }
    let core = core_end.saturating_sub(core_start);
    if core >= max {
        return (core_start, core_start + max);
    }
    let remaining = max - core;
    let left_avail = core_start;
    let right_avail = len - core_end;
    let want_left = remaining.div_ceil(2);
    let want_right = remaining / 2;
    let take_left = left_avail.min(want_left + want_right.saturating_sub(right_avail));
    let take_right = right_avail.min(want_right + want_left.saturating_sub(left_avail));
    (core_start - take_left, core_end + take_right)
}

/// Encodes the whole window as a single padded sequence (sentence model).
/// Lookup is lowercased; out-of-vocabulary tokens map to the unknown index;
/// when the window exceeds the configured length, the tokens nearest the two
/// concepts are kept.
pub fn encode_window(
    ex: &SegmentedExample,
    label: Label,
    emb: &EmbeddingMatrix,
    cfg: &EncodeConfig,
) -> EncodedExample {
    let ids: Vec<usize> = ex
        .segments()
        .iter()
        .flat_map(|seg| seg.iter().map(|t| lookup(emb, t)))
        .collect();
    let (core_start, core_end) = ex.concept_token_bounds();
    let (lo, hi) = window_keep_range(ids.len(), cfg.window_len, core_start, core_end);
    EncodedExample {
        sequences: vec![fit(&ids[lo..hi], cfg.window_len, Keep::First)],
        label: label.as_u8(),
    }
}

/// Encodes the five segments as padded sequences (segment model). The
/// preceding segment keeps its last tokens and is padded at the front; all
/// other segments keep their first tokens and are padded at the back.
pub fn encode_segments(
    ex: &SegmentedExample,
    label: Label,
    emb: &EmbeddingMatrix,
    cfg: &EncodeConfig,
) -> EncodedExample {
    let sequences = ex
        .segments()
        .iter()
        .enumerate()
        .map(|(i, seg)| {
            let ids: Vec<usize> = seg.iter().map(|t| lookup(emb, t)).collect();
            let keep = if i == 0 { Keep::Last } else { Keep::First };
            fit(&ids, cfg.segment_lens[i], keep)
        })
        .collect();
    EncodedExample {
        sequences,
        label: label.as_u8(),
    }
}
