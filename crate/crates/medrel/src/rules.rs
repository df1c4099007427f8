//! Co-location rule engine: link each non-drug entity to the nearest drug
//! mention under a configured traversal mechanism and binding mode.
//!
//! Distance is the character gap between the nearest edges of the two
//! entities' anchor spans (first fragments), clamped to zero on overlap. The
//! search is document-wide; there is no sentence cutoff.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Document, Entity, EntityType, RelationType};

/// Which side(s) of the attribute entity to search, and in what order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TraversalMechanism {
    LeftOnly,
    RightOnly,
    LeftThenRight,
    RightThenLeft,
}

impl std::str::FromStr for TraversalMechanism {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "left-only" | "left" => Ok(TraversalMechanism::LeftOnly),
            "right-only" | "right" => Ok(TraversalMechanism::RightOnly),
            "left-then-right" | "left-right" => Ok(TraversalMechanism::LeftThenRight),
            "right-then-left" | "right-left" => Ok(TraversalMechanism::RightThenLeft),
            _ => Err(format!("unknown traversal mechanism {s:?}")),
        }
    }
}

/// Whether a drug may receive at most one relation per relation type
/// (bounded) or arbitrarily many (unbounded).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BindingMode {
    Bounded,
    Unbounded,
}

impl std::str::FromStr for BindingMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "bounded" => Ok(BindingMode::Bounded),
            "unbounded" => Ok(BindingMode::Unbounded),
            _ => Err(format!("unknown binding mode {s:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Left,
    Right,
}

/// Extraction settings: a default mechanism, a binding mode, the relation
/// types to emit, and optional per-type mechanism overrides (e.g. search
/// left-then-right for the types usually mentioned after the drug).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RuleConfig {
    pub mechanism: TraversalMechanism,
    pub mode: BindingMode,
    pub relation_types: BTreeSet<RelationType>,
    #[serde(default)]
    pub overrides: BTreeMap<RelationType, TraversalMechanism>,
}

impl Default for RuleConfig {
    fn default() -> Self {
        RuleConfig {
            mechanism: TraversalMechanism::LeftOnly,
            mode: BindingMode::Unbounded,
            relation_types: RelationType::ALL.into_iter().collect(),
            overrides: BTreeMap::new(),
        }
    }
}

impl RuleConfig {
    pub fn new(mechanism: TraversalMechanism, mode: BindingMode) -> Self {
        RuleConfig {
            mechanism,
            mode,
            ..RuleConfig::default()
        }
    }

    fn mechanism_for(&self, rtype: RelationType) -> TraversalMechanism {
        self.overrides.get(&rtype).copied().unwrap_or(self.mechanism)
    }
}

/// A (attribute, drug, type) triple emitted by any extractor backend.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PredictedRelation {
    pub doc_id: String,
    pub attr: String,
    pub drug: String,
    pub rtype: RelationType,
}

/// Finds the drug entity nearest to `attr` strictly in `direction`,
/// measuring the character gap between anchor spans. Ties break toward the
/// lexicographically smaller entity id.
pub fn nearest_drug<'d>(
    doc: &'d Document,
    attr: &Entity,
    direction: Direction,
) -> Option<&'d Entity> {
    let anchor = attr.anchor();
    doc.entities()
        .filter(|e| e.etype == EntityType::Drug)
        .filter(|e| match direction {
            Direction::Left => e.anchor().start < anchor.start,
            Direction::Right => e.anchor().start > anchor.start,
        })
        .min_by(|a, b| {
            (a.anchor().gap(&anchor), &a.id).cmp(&(b.anchor().gap(&anchor), &b.id))
        })
}

/// Runs the rule engine over one document.
///
/// Non-drug entities are processed in document order (anchor offset, then
/// id). In bounded mode each drug accepts at most one relation per relation
/// type; an entity whose chosen drug has exhausted its budget emits nothing.
pub fn extract_relations(doc: &Document, config: &RuleConfig) -> Vec<PredictedRelation> {
    let mut attrs: Vec<&Entity> = doc
        .entities()
        .filter(|e| e.etype != EntityType::Drug)
        .collect();
    attrs.sort_by(|a, b| (a.anchor().start, &a.id).cmp(&(b.anchor().start, &b.id)));

    let mut budget: BTreeSet<(String, RelationType)> = BTreeSet::new();
    let mut out = Vec::new();
    for attr in attrs {
        let Some(rtype) = attr.etype.relation_type() else {
            continue;
        };
        if !config.relation_types.contains(&rtype) {
            continue;
        }
        let drug = match config.mechanism_for(rtype) {
            TraversalMechanism::LeftOnly => nearest_drug(doc, attr, Direction::Left),
            TraversalMechanism::RightOnly => nearest_drug(doc, attr, Direction::Right),
            TraversalMechanism::LeftThenRight => nearest_drug(doc, attr, Direction::Left)
                .or_else(|| nearest_drug(doc, attr, Direction::Right)),
            TraversalMechanism::RightThenLeft => nearest_drug(doc, attr, Direction::Right)
                .or_else(|| nearest_drug(doc, attr, Direction::Left)),
        };
        let Some(drug) = drug else { continue };
        if config.mode == BindingMode::Bounded
            && !budget.insert((drug.id.clone(), rtype))
        {
            continue;
        }
        out.push(PredictedRelation {
            doc_id: doc.doc_id.clone(),
            attr: attr.id.clone(),
            drug: drug.id.clone(),
            rtype,
        });
    }
    out
}

/// Applies [`extract_relations`] to every document of a corpus.
pub fn run_rules(corpus: &Corpus, config: &RuleConfig) -> BTreeMap<String, Vec<PredictedRelation>> {
    corpus
        .documents
        .iter()
        .map(|doc| (doc.doc_id.clone(), extract_relations(doc, config)))
        .collect()
}
