//! Annotation data model and standoff-format I/O.
//!
//! Documents follow the n2c2/brat convention: a plain-text note (`.txt`)
//! plus a line-oriented annotation file (`.ann`) whose `T` lines carry
//! entities anchored by character offsets and whose `R` lines carry binary
//! relations between them. Offsets count Unicode scalar values.

mod ann;
mod text;

pub use ann::{load_corpus, parse_ann, parse_pred_ann, serialize_ann, AnnParse};
pub use text::{split_sentences, tokenize};

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Range;
use std::path::PathBuf;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors raised while parsing, validating, or loading annotated documents.
#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid span {start}..{end}: start must be less than end")]
    InvalidSpan { start: usize, end: usize },
    #[error("entity {id}: span {start}..{end} out of bounds for text of {len} characters")]
    SpanOutOfBounds {
        id: String,
        start: usize,
        end: usize,
        len: usize,
    },
    #[error("entity {id}: fragments must be sorted and non-overlapping")]
    BadFragments { id: String },
    #[error("entity {id}: surface {surface:?} does not match document text {expected:?}")]
    SurfaceMismatch {
        id: String,
        surface: String,
        expected: String,
    },
    #[error("relation {id}: argument {arg} does not resolve to an entity")]
    DanglingArgument { id: String, arg: String },
    #[error("relation {id}: {message}")]
    BadRelation { id: String, message: String },
    #[error("duplicate annotation id {id}")]
    DuplicateId { id: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("orphan annotation file {path} has no companion .txt")]
    OrphanAnn { path: PathBuf },
}

/// Non-fatal issue noticed while parsing or loading.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Warning {
    pub line: Option<usize>,
    pub message: String,
}

impl Warning {
    pub(crate) fn new(line: Option<usize>, message: impl Into<String>) -> Self {
        Warning {
            line,
            message: message.into(),
        }
    }
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(n) => write!(f, "line {}: {}", n, self.message),
            None => write!(f, "{}", self.message),
        }
    }
}

/// The nine entity types of the ADE annotation schema.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EntityType {
    Drug,
    Strength,
    Duration,
    Route,
    Form,
    #[serde(rename = "ADE")]
    Ade,
    Dosage,
    Reason,
    Frequency,
}

impl EntityType {
    pub const ALL: [EntityType; 9] = [
        EntityType::Drug,
        EntityType::Strength,
        EntityType::Duration,
        EntityType::Route,
        EntityType::Form,
        EntityType::Ade,
        EntityType::Dosage,
        EntityType::Reason,
        EntityType::Frequency,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            EntityType::Drug => "Drug",
            EntityType::Strength => "Strength",
            EntityType::Duration => "Duration",
            EntityType::Route => "Route",
            EntityType::Form => "Form",
            EntityType::Ade => "ADE",
            EntityType::Dosage => "Dosage",
            EntityType::Reason => "Reason",
            EntityType::Frequency => "Frequency",
        }
    }

    /// The relation type this entity type participates in as the attribute
    /// side, or `None` for `Drug`.
    pub fn relation_type(&self) -> Option<RelationType> {
        match self {
            EntityType::Drug => None,
            EntityType::Strength => Some(RelationType::StrengthDrug),
            EntityType::Duration => Some(RelationType::DurationDrug),
            EntityType::Route => Some(RelationType::RouteDrug),
            EntityType::Form => Some(RelationType::FormDrug),
            EntityType::Ade => Some(RelationType::AdeDrug),
            EntityType::Dosage => Some(RelationType::DosageDrug),
            EntityType::Reason => Some(RelationType::ReasonDrug),
            EntityType::Frequency => Some(RelationType::FrequencyDrug),
        }
    }
}

impl fmt::Display for EntityType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for EntityType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        EntityType::ALL
            .iter()
            .copied()
            .find(|t| t.name() == s)
            .ok_or_else(|| format!("unknown entity type {s:?}"))
    }
}

/// The eight drug-attribute relation types, in report order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RelationType {
    #[serde(rename = "Strength-Drug")]
    StrengthDrug,
    #[serde(rename = "Duration-Drug")]
    DurationDrug,
    #[serde(rename = "Route-Drug")]
    RouteDrug,
    #[serde(rename = "Form-Drug")]
    FormDrug,
    #[serde(rename = "ADE-Drug")]
    AdeDrug,
    #[serde(rename = "Dosage-Drug")]
    DosageDrug,
    #[serde(rename = "Reason-Drug")]
    ReasonDrug,
    #[serde(rename = "Frequency-Drug")]
    FrequencyDrug,
}

impl RelationType {
    pub const ALL: [RelationType; 8] = [
        RelationType::StrengthDrug,
        RelationType::DurationDrug,
        RelationType::RouteDrug,
        RelationType::FormDrug,
        RelationType::AdeDrug,
        RelationType::DosageDrug,
        RelationType::ReasonDrug,
        RelationType::FrequencyDrug,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            RelationType::StrengthDrug => "Strength-Drug",
            RelationType::DurationDrug => "Duration-Drug",
            RelationType::RouteDrug => "Route-Drug",
            RelationType::FormDrug => "Form-Drug",
            RelationType::AdeDrug => "ADE-Drug",
            RelationType::DosageDrug => "Dosage-Drug",
            RelationType::ReasonDrug => "Reason-Drug",
            RelationType::FrequencyDrug => "Frequency-Drug",
        }
    }

    /// Entity type of the non-drug argument.
    pub fn attribute_type(&self) -> EntityType {
        match self {
            RelationType::StrengthDrug => EntityType::Strength,
            RelationType::DurationDrug => EntityType::Duration,
            RelationType::RouteDrug => EntityType::Route,
            RelationType::FormDrug => EntityType::Form,
            RelationType::AdeDrug => EntityType::Ade,
            RelationType::DosageDrug => EntityType::Dosage,
            RelationType::ReasonDrug => EntityType::Reason,
            RelationType::FrequencyDrug => EntityType::Frequency,
        }
    }
}

impl fmt::Display for RelationType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for RelationType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RelationType::ALL
            .iter()
            .copied()
            .find(|t| t.name() == s)
            .ok_or_else(|| format!("unknown relation type {s:?}"))
    }
}

/// Half-open character range `[start, end)` into a document text.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default,
)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Result<Span, CorpusError> {
        if start >= end {
            return Err(CorpusError::InvalidSpan { start, end });
        }
        Ok(Span { start, end })
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    pub fn overlaps(&self, other: &Span) -> bool {
        self.start < other.end && other.start < self.end
    }

    /// Character gap between the nearest edges of two spans; 0 when they
    /// overlap or touch.
    pub fn gap(&self, other: &Span) -> usize {
        if self.overlaps(other) {
            0
        } else if self.end <= other.start {
            other.start - self.end
        } else {
            self.start - other.end
        }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

/// An annotated entity mention, possibly discontinuous.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entity {
    pub id: String,
    pub etype: EntityType,
    /// Ordered, non-overlapping fragments. Ordering and distance computations
    /// use the first fragment as the anchor.
    pub fragments: Vec<Span>,
    pub surface: String,
}

impl Entity {
    pub fn new(
        id: impl Into<String>,
        etype: EntityType,
        fragments: Vec<Span>,
        surface: impl Into<String>,
    ) -> Result<Entity, CorpusError> {
        let id = id.into();
        if fragments.is_empty() {
            return Err(CorpusError::BadFragments { id });
        }
        for pair in fragments.windows(2) {
            if pair[0].end > pair[1].start {
                return Err(CorpusError::BadFragments { id });
            }
        }
        Ok(Entity {
            id,
            etype,
            fragments,
            surface: surface.into(),
        })
    }

    /// First fragment: the canonical anchor for ordering and distance.
    pub fn anchor(&self) -> Span {
        self.fragments[0]
    }

    pub fn start(&self) -> usize {
        self.fragments[0].start
    }

    pub fn end(&self) -> usize {
        self.fragments.last().unwrap().end
    }
}

/// A gold binary relation between an attribute entity and a drug entity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Relation {
    pub id: String,
    pub rtype: RelationType,
    /// Entity id of the non-drug argument.
    pub attr: String,
    /// Entity id of the `Drug` argument.
    pub drug: String,
}

impl Relation {
    pub fn new(
        id: impl Into<String>,
        rtype: RelationType,
        attr: impl Into<String>,
        drug: impl Into<String>,
    ) -> Relation {
        Relation {
            id: id.into(),
            rtype,
            attr: attr.into(),
            drug: drug.into(),
        }
    }
}

/// A token with its exact character span.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub text: String,
    pub span: Span,
}

/// A sentence as a span plus the range of token indices it covers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sentence {
    pub span: Span,
    pub token_range: Range<usize>,
}

/// An immutable annotated document: note text, entities, relations, and the
/// derived token/sentence segmentation.
#[derive(Debug, Clone)]
pub struct Document {
    pub doc_id: String,
    pub text: String,
    entities: IndexMap<String, Entity>,
    relations: IndexMap<String, Relation>,
    tokens: Vec<Token>,
    sentences: Vec<Sentence>,
    char_len: usize,
}

impl Document {
    /// Builds a document, validating every cross-reference: spans in bounds,
    /// relation arguments resolving to entities of the right types.
    pub fn new(
        doc_id: impl Into<String>,
        text: impl Into<String>,
        entities: Vec<Entity>,
        relations: Vec<Relation>,
    ) -> Result<Document, CorpusError> {
        let doc_id = doc_id.into();
        let text = text.into();
        let char_len = text.chars().count();

        let mut emap = IndexMap::with_capacity(entities.len());
        for e in entities {
            for frag in &e.fragments {
                if frag.start >= frag.end {
                    return Err(CorpusError::InvalidSpan {
                        start: frag.start,
                        end: frag.end,
                    });
                }
                if frag.end > char_len {
                    return Err(CorpusError::SpanOutOfBounds {
                        id: e.id.clone(),
                        start: frag.start,
                        end: frag.end,
                        len: char_len,
                    });
                }
            }
            if emap.insert(e.id.clone(), e.clone()).is_some() {
                return Err(CorpusError::DuplicateId { id: e.id });
            }
        }

        let mut rmap = IndexMap::with_capacity(relations.len());
        for r in relations {
            let attr = emap
                .get(&r.attr)
                .ok_or_else(|| CorpusError::DanglingArgument {
                    id: r.id.clone(),
                    arg: r.attr.clone(),
                })?;
            let drug = emap
                .get(&r.drug)
                .ok_or_else(|| CorpusError::DanglingArgument {
                    id: r.id.clone(),
                    arg: r.drug.clone(),
                })?;
            if drug.etype != EntityType::Drug {
                return Err(CorpusError::BadRelation {
                    id: r.id,
                    message: format!("drug argument {} has type {}", drug.id, drug.etype),
                });
            }
            if attr.etype != r.rtype.attribute_type() {
                return Err(CorpusError::BadRelation {
                    id: r.id,
                    message: format!(
                        "attribute argument {} has type {}, expected {}",
                        attr.id,
                        attr.etype,
                        r.rtype.attribute_type()
                    ),
                });
            }
            if rmap.insert(r.id.clone(), r.clone()).is_some() {
                return Err(CorpusError::DuplicateId { id: r.id });
            }
        }

        let tokens = tokenize(&text);
        let sentences = split_sentences(&text, &tokens);
        Ok(Document {
            doc_id,
            text,
            entities: emap,
            relations: rmap,
            tokens,
            sentences,
            char_len,
        })
    }

    pub fn entities(&self) -> impl Iterator<Item = &Entity> {
        self.entities.values()
    }

    pub fn relations(&self) -> impl Iterator<Item = &Relation> {
        self.relations.values()
    }

    pub fn entity(&self, id: &str) -> Option<&Entity> {
        self.entities.get(id)
    }

    pub fn relation(&self, id: &str) -> Option<&Relation> {
        self.relations.get(id)
    }

    pub fn n_entities(&self) -> usize {
        self.entities.len()
    }

    pub fn n_relations(&self) -> usize {
        self.relations.len()
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn sentences(&self) -> &[Sentence] {
        &self.sentences
    }

    pub fn char_len(&self) -> usize {
        self.char_len
    }

    /// Document text of a character span.
    pub fn slice(&self, span: Span) -> String {
        self.text
            .chars()
            .skip(span.start)
            .take(span.end.saturating_sub(span.start))
            .collect()
    }

    /// Maps each entity id to the index of the sentence containing the start
    /// of its first fragment.
    pub fn entity_sentence_index(&self) -> BTreeMap<String, usize> {
        let mut out = BTreeMap::new();
        for e in self.entities.values() {
            out.insert(e.id.clone(), self.sentence_of_offset(e.start()));
        }
        out
    }

    /// Index of the sentence containing a character offset. Offsets in the
    /// whitespace gap after a sentence resolve to that sentence.
    pub fn sentence_of_offset(&self, offset: usize) -> usize {
        if self.sentences.is_empty() {
            return 0;
        }
        let idx = self
            .sentences
            .partition_point(|s| s.span.start <= offset);
        idx.saturating_sub(1)
    }
}

/// A loaded collection of documents, sorted by `doc_id`.
#[derive(Debug, Clone, Default)]
pub struct Corpus {
    pub documents: Vec<Document>,
}

impl Corpus {
    pub fn new(mut documents: Vec<Document>) -> Corpus {
        documents.sort_by(|a, b| a.doc_id.cmp(&b.doc_id));
        Corpus { documents }
    }

    pub fn get(&self, doc_id: &str) -> Option<&Document> {
        self.documents.iter().find(|d| d.doc_id == doc_id)
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entity_type_round_trips_through_names() {
        for t in EntityType::ALL {
            assert_eq!(t.name().parse::<EntityType>().unwrap(), t);
        }
        assert!("Disease".parse::<EntityType>().is_err());
    }

    #[test]
    fn relation_types_map_to_unique_attribute_types() {
        let mut seen = std::collections::BTreeSet::new();
        for r in RelationType::ALL {
            let a = r.attribute_type();
            assert_ne!(a, EntityType::Drug);
            assert!(seen.insert(a));
            assert_eq!(a.relation_type(), Some(r));
        }
        assert_eq!(seen.len(), 8);
    }

    #[test]
    fn span_rejects_degenerate_ranges() {
        assert!(Span::new(3, 3).is_err());
        assert!(Span::new(5, 2).is_err());
        assert!(Span::new(0, 1).is_ok());
    }

    #[test]
    fn span_gap_clamps_overlap_to_zero() {
        let a = Span::new(0, 5).unwrap();
        let b = Span::new(3, 8).unwrap();
        assert_eq!(a.gap(&b), 0);
        let c = Span::new(7, 9).unwrap();
        assert_eq!(a.gap(&c), 2);
        assert_eq!(c.gap(&a), 2);
        let touching = Span::new(5, 6).unwrap();
        assert_eq!(a.gap(&touching), 0);
    }

    #[test]
    fn entity_rejects_unsorted_fragments() {
        let frags = vec![Span::new(10, 14).unwrap(), Span::new(5, 8).unwrap()];
        assert!(Entity::new("T1", EntityType::Ade, frags, "x y").is_err());
        let overlapping = vec![Span::new(0, 5).unwrap(), Span::new(4, 8).unwrap()];
        assert!(Entity::new("T1", EntityType::Ade, overlapping, "x y").is_err());
    }

    #[test]
    fn document_rejects_out_of_bounds_spans() {
        let e = Entity::new("T1", EntityType::Drug, vec![Span::new(0, 99).unwrap()], "x").unwrap();
        let err = Document::new("d", "short", vec![e], vec![]).unwrap_err();
        assert!(matches!(err, CorpusError::SpanOutOfBounds { .. }));
    }

    #[test]
    fn document_rejects_dangling_relation() {
        let e = Entity::new("T1", EntityType::Drug, vec![Span::new(0, 3).unwrap()], "abc").unwrap();
        let r = Relation::new("R1", RelationType::RouteDrug, "T9", "T1");
        let err = Document::new("d", "abc def", vec![e], vec![r]).unwrap_err();
        assert!(matches!(err, CorpusError::DanglingArgument { .. }));
    }

    #[test]
    fn document_rejects_type_mismatched_relation() {
        let d = Entity::new("T1", EntityType::Drug, vec![Span::new(0, 3).unwrap()], "abc").unwrap();
        let a = Entity::new("T2", EntityType::Ade, vec![Span::new(4, 7).unwrap()], "def").unwrap();
        let r = Relation::new("R1", RelationType::RouteDrug, "T2", "T1");
        let err = Document::new("d", "abc def", vec![d, a], vec![r]).unwrap_err();
        assert!(matches!(err, CorpusError::BadRelation { .. }));
    }

    #[test]
    fn entity_sentence_index_uses_first_fragment() {
        let text = "One two. Three four. Five six.";
        let e1 = Entity::new("T1", EntityType::Drug, vec![Span::new(0, 3).unwrap()], "One").unwrap();
        // Starts in sentence 1, ends in sentence 2.
        let e2 = Entity::new(
            "T2",
            EntityType::Reason,
            vec![Span::new(9, 14).unwrap(), Span::new(21, 25).unwrap()],
            "Three Five",
        )
        .unwrap();
        let doc = Document::new("d", text, vec![e1, e2], vec![]).unwrap();
        let idx = doc.entity_sentence_index();
        assert_eq!(idx["T1"], 0);
        assert_eq!(idx["T2"], 1);
    }

    #[test]
    fn single_sentence_document_maps_everything_to_zero() {
        let text = "no terminator here at all";
        let e = Entity::new("T1", EntityType::Drug, vec![Span::new(3, 13).unwrap()], "terminator")
            .unwrap();
        let doc = Document::new("d", text, vec![e], vec![]).unwrap();
        assert_eq!(doc.sentences().len(), 1);
        assert_eq!(doc.entity_sentence_index()["T1"], 0);
    }
}
