//! Deterministic synthetic standoff corpora with controllable structure.
//!
//! Documents are built from phrase templates over lexicons of pronounceable
//! nonsense words, so every pipeline stage is testable without access to
//! restricted clinical data. The knobs mirror the structural properties the
//! extractors are sensitive to: whether the drug precedes its attribute,
//! whether extra drugs share the sentence, and whether a relation crosses a
//! sentence boundary.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::corpus::{
    serialize_ann, Corpus, CorpusError, Document, Entity, EntityType, Relation, RelationType,
    Span,
};

const LEXICON_SALT: u64 = 0x4c45_5849;
const DOC_SALT: u64 = 0x444f_4353;
const PERTURB_SALT: u64 = 0x5045_5254;

const OPENERS: [&str; 6] = ["Started", "Continue", "Resumed", "Given", "Plan", "Restarted"];
const CONNECTORS: [&str; 5] = ["with", "via", "using", "per", "alongside"];
const TAILS: [&str; 4] = ["today", "overnight", "as needed", "for now"];
const SYLLABLES: [&str; 20] = [
    "ba", "ce", "di", "fo", "gu", "ha", "ki", "lo", "mu", "ne", "pa", "qui", "ro", "su", "ta",
    "ve", "wi", "xa", "yo", "zu",
];

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid generator configuration: {0}")]
    InvalidConfig(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Corpus(#[from] CorpusError),
}

/// Generator knobs. Probabilities are per generated fact; `drug_first` maps
/// each relation type to the probability that the drug mention precedes its
/// attribute (the attribute types usually written after the drug — Reason,
/// ADE, Duration — default to 0).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub seed: u64,
    pub n_docs: usize,
    /// Inclusive range of sentences per document.
    pub sentences_per_doc: (usize, usize),
    pub relation_weights: BTreeMap<RelationType, f64>,
    pub drug_first: BTreeMap<RelationType, f64>,
    pub p_multi_drug_sentence: f64,
    pub p_cross_sentence: f64,
    pub lexicon_sizes: BTreeMap<EntityType, usize>,
}

impl Default for SynthConfig {
    fn default() -> Self {
        let relation_weights = RelationType::ALL.iter().map(|t| (*t, 1.0)).collect();
        let drug_first = RelationType::ALL
            .iter()
            .map(|t| {
                let p = match t {
                    RelationType::ReasonDrug
                    | RelationType::AdeDrug
                    | RelationType::DurationDrug => 0.0,
                    _ => 1.0,
                };
                (*t, p)
            })
            .collect();
        let lexicon_sizes = EntityType::ALL
            .iter()
            .map(|t| (*t, if *t == EntityType::Drug { 30 } else { 12 }))
            .collect();
        SynthConfig {
            seed: 0,
            n_docs: 10,
            sentences_per_doc: (3, 8),
            relation_weights,
            drug_first,
            p_multi_drug_sentence: 0.0,
            p_cross_sentence: 0.0,
            lexicon_sizes,
        }
    }
}

impl SynthConfig {
    pub fn with_drug_first_all(mut self, p: f64) -> Self {
        for t in RelationType::ALL {
            self.drug_first.insert(t, p);
        }
        self
    }

    fn validate(&self) -> Result<(), SynthError> {
        if self.n_docs == 0 {
            return Err(SynthError::InvalidConfig("n_docs must be positive".into()));
        }
        if self.sentences_per_doc.0 == 0 || self.sentences_per_doc.0 > self.sentences_per_doc.1 {
            return Err(SynthError::InvalidConfig(
                "sentences_per_doc must be a non-empty positive range".into(),
            ));
        }
        for t in RelationType::ALL {
            let w = self.relation_weights.get(&t).copied().unwrap_or(0.0);
            if w < 0.0 || !w.is_finite() {
                return Err(SynthError::InvalidConfig(format!("weight for {t} is invalid")));
            }
            let p = self.drug_first.get(&t).copied().unwrap_or(0.0);
            if !(0.0..=1.0).contains(&p) {
                return Err(SynthError::InvalidConfig(format!(
                    "drug_first for {t} must be a probability"
                )));
            }
        }
        if self
            .relation_weights
            .values()
            .all(|w| *w <= 0.0)
        {
            return Err(SynthError::InvalidConfig(
                "relation weights must not all be zero".into(),
            ));
        }
        for p in [self.p_multi_drug_sentence, self.p_cross_sentence] {
            if !(0.0..=1.0).contains(&p) {
                return Err(SynthError::InvalidConfig(
                    "probabilities must be within [0, 1]".into(),
                ));
            }
        }
        for t in EntityType::ALL {
            if self.lexicon_sizes.get(&t).copied().unwrap_or(0) == 0 {
                return Err(SynthError::InvalidConfig(format!("empty lexicon for {t}")));
            }
        }
        Ok(())
    }
}

/// Echo of the generating configuration plus a content checksum, written
/// alongside the corpus so runs can pin expected outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthManifest {
    pub config: SynthConfig,
    pub distractor_rate: f64,
    pub checksum: String,
    pub generator_version: String,
}

/// A generated corpus whose relations are exactly the pairings the generator
/// intended.
#[derive(Debug, Clone)]
pub struct GoldCorpus {
    pub corpus: Corpus,
    pub manifest: SynthManifest,
}

fn make_word(rng: &mut ChaCha8Rng) -> String {
    let n = rng.gen_range(2..=4);
    (0..n).map(|_| SYLLABLES[rng.gen_range(0..SYLLABLES.len())]).collect()
}

fn build_lexicons(config: &SynthConfig) -> BTreeMap<EntityType, Vec<String>> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ LEXICON_SALT);
    let mut lexicons = BTreeMap::new();
    for etype in EntityType::ALL {
        let size = config.lexicon_sizes[&etype];
        let mut words: Vec<String> = Vec::with_capacity(size);
        while words.len() < size {
            let w = make_word(&mut rng);
            if !words.contains(&w) {
                words.push(w);
            }
        }
        lexicons.insert(etype, words);
    }
    lexicons
}

fn choose_rtype(rng: &mut ChaCha8Rng, weights: &BTreeMap<RelationType, f64>) -> RelationType {
    let total: f64 = RelationType::ALL
        .iter()
        .map(|t| weights.get(t).copied().unwrap_or(0.0).max(0.0))
        .sum();
    let mut x = rng.gen_range(0.0..total);
    for t in RelationType::ALL {
        let w = weights.get(&t).copied().unwrap_or(0.0).max(0.0);
        if x < w {
            return t;
        }
        x -= w;
    }
    RelationType::FrequencyDrug
}

struct DocBuilder {
    text: String,
    char_len: usize,
    entities: Vec<Entity>,
    relations: Vec<Relation>,
    next_t: usize,
    next_r: usize,
}

impl DocBuilder {
    fn new() -> DocBuilder {
        DocBuilder {
            text: String::new(),
            char_len: 0,
            entities: Vec::new(),
            relations: Vec::new(),
            next_t: 1,
            next_r: 1,
        }
    }

    fn push_word(&mut self, word: &str) -> Span {
        if !self.text.is_empty() {
            self.text.push(' ');
            self.char_len += 1;
        }
        let start = self.char_len;
        self.text.push_str(word);
        self.char_len += word.chars().count();
        Span {
            start,
            end: self.char_len,
        }
    }

    fn end_sentence(&mut self) {
        self.text.push('.');
        self.char_len += 1;
    }

    fn slice(&self, span: Span) -> String {
        self.text
            .chars()
            .skip(span.start)
            .take(span.end - span.start)
            .collect()
    }

    fn add_entity(&mut self, etype: EntityType, fragments: Vec<Span>) -> String {
        let id = format!("T{}", self.next_t);
        self.next_t += 1;
        let surface = fragments
            .iter()
            .map(|f| self.slice(*f))
            .collect::<Vec<_>>()
            .join(" ");
        self.entities
            .push(Entity::new(&id, etype, fragments, surface).expect("generated spans are valid"));
        id
    }

    fn add_relation(&mut self, rtype: RelationType, attr: &str, drug: &str) {
        let id = format!("R{}", self.next_r);
        self.next_r += 1;
        self.relations.push(Relation::new(id, rtype, attr, drug));
    }
}

// Pushes an attribute phrase and returns its fragments. Strength, Dosage and
// Duration get a numeric head ("81 <unit>"); ADE and Reason occasionally get
// a discontinuous two-fragment form ("<w> of <w>").
fn push_attr_phrase(
    b: &mut DocBuilder,
    rng: &mut ChaCha8Rng,
    etype: EntityType,
    lexicons: &BTreeMap<EntityType, Vec<String>>,
) -> Vec<Span> {
    let lex = &lexicons[&etype];
    let pick = |rng: &mut ChaCha8Rng| lex[rng.gen_range(0..lex.len())].clone();
    match etype {
        EntityType::Strength | EntityType::Dosage | EntityType::Duration => {
            let number = rng.gen_range(1..1000usize).to_string();
            let s1 = b.push_word(&number);
            let unit = pick(rng);
            let s2 = b.push_word(&unit);
            vec![Span {
                start: s1.start,
                end: s2.end,
            }]
        }
        EntityType::Ade | EntityType::Reason if rng.gen_bool(0.15) => {
            let s1 = b.push_word(&pick(rng));
            b.push_word("of");
            let s2 = b.push_word(&pick(rng));
            vec![s1, s2]
        }
        _ => {
            let first = b.push_word(&pick(rng));
            if rng.gen_bool(0.3) {
                let second = b.push_word(&pick(rng));
                vec![Span {
                    start: first.start,
                    end: second.end,
                }]
            } else {
                vec![first]
            }
        }
    }
}

fn corpus_checksum(corpus: &Corpus) -> String {
    let mut hasher = Sha256::new();
    for doc in &corpus.documents {
        hasher.update(doc.doc_id.as_bytes());
        hasher.update([0]);
        hasher.update(doc.text.as_bytes());
        hasher.update([0]);
        hasher.update(serialize_ann(doc.entities(), doc.relations()).as_bytes());
        hasher.update([0]);
    }
    let digest = hasher.finalize();
    digest.iter().fold(String::new(), |mut acc, b| {
        write!(acc, "{b:02x}").unwrap();
        acc
    })
}

/// Generates a corpus. The same configuration always produces byte-identical
/// documents; the manifest records the configuration and a content checksum.
pub fn generate(config: &SynthConfig) -> Result<GoldCorpus, SynthError> {
    config.validate()?;
    let lexicons = build_lexicons(config);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ DOC_SALT);

    let mut documents = Vec::with_capacity(config.n_docs);
    for doc_idx in 0..config.n_docs {
        let mut b = DocBuilder::new();
        let n_sent = rng.gen_range(config.sentences_per_doc.0..=config.sentences_per_doc.1);
        let mut made = 0;
        while made < n_sent {
            let rtype = choose_rtype(&mut rng, &config.relation_weights);
            let etype = rtype.attribute_type();
            let drug_first = rng.gen_bool(config.drug_first[&rtype]);
            let cross = rng.gen_bool(config.p_cross_sentence) && made + 2 <= n_sent;
            let multi = !cross && rng.gen_bool(config.p_multi_drug_sentence);
            let drug_lex = &lexicons[&EntityType::Drug];
            let drug_word = drug_lex[rng.gen_range(0..drug_lex.len())].clone();
            let opener = OPENERS[rng.gen_range(0..OPENERS.len())];
            let connector = CONNECTORS[rng.gen_range(0..CONNECTORS.len())];

            let (attr_id, drug_id);
            if cross {
                // The two mentions sit in adjacent sentences.
                b.push_word(opener);
                if drug_first {
                    let span = b.push_word(&drug_word);
                    drug_id = b.add_entity(EntityType::Drug, vec![span]);
                    b.push_word(TAILS[rng.gen_range(0..TAILS.len())]);
                    b.end_sentence();
                    b.push_word(OPENERS[rng.gen_range(0..OPENERS.len())]);
                    b.push_word(connector);
                    let frags = push_attr_phrase(&mut b, &mut rng, etype, &lexicons);
                    attr_id = b.add_entity(etype, frags);
                    b.end_sentence();
                } else {
                    let frags = push_attr_phrase(&mut b, &mut rng, etype, &lexicons);
                    attr_id = b.add_entity(etype, frags);
                    b.push_word(TAILS[rng.gen_range(0..TAILS.len())]);
                    b.end_sentence();
                    b.push_word(OPENERS[rng.gen_range(0..OPENERS.len())]);
                    b.push_word(connector);
                    let span = b.push_word(&drug_word);
                    drug_id = b.add_entity(EntityType::Drug, vec![span]);
                    b.end_sentence();
                }
                made += 2;
            } else {
                b.push_word(opener);
                if drug_first {
                    let span = b.push_word(&drug_word);
                    drug_id = b.add_entity(EntityType::Drug, vec![span]);
                    if multi {
                        b.push_word("and");
                        let d2 = drug_lex[rng.gen_range(0..drug_lex.len())].clone();
                        let span2 = b.push_word(&d2);
                        b.add_entity(EntityType::Drug, vec![span2]);
                    }
                    b.push_word(connector);
                    let frags = push_attr_phrase(&mut b, &mut rng, etype, &lexicons);
                    attr_id = b.add_entity(etype, frags);
                } else {
                    let frags = push_attr_phrase(&mut b, &mut rng, etype, &lexicons);
                    attr_id = b.add_entity(etype, frags);
                    if multi {
                        b.push_word("and");
                        let d2 = drug_lex[rng.gen_range(0..drug_lex.len())].clone();
                        let span2 = b.push_word(&d2);
                        b.add_entity(EntityType::Drug, vec![span2]);
                    }
                    b.push_word(connector);
                    let span = b.push_word(&drug_word);
                    drug_id = b.add_entity(EntityType::Drug, vec![span]);
                }
                if rng.gen_bool(0.5) {
                    b.push_word(TAILS[rng.gen_range(0..TAILS.len())]);
                }
                b.end_sentence();
                made += 1;
            }
            b.add_relation(rtype, &attr_id, &drug_id);
        }
        documents.push(Document::new(
            format!("synth-{doc_idx:04}"),
            b.text,
            b.entities,
            b.relations,
        )?);
    }

    let corpus = Corpus::new(documents);
    let manifest = SynthManifest {
        config: config.clone(),
        distractor_rate: 0.0,
        checksum: corpus_checksum(&corpus),
        generator_version: env!("CARGO_PKG_VERSION").to_string(),
    };
    Ok(GoldCorpus { corpus, manifest })
}

/// Inserts unrelated distractor drug mentions directly before attribute
/// entities (each with probability `distractor_rate`) without touching the
/// gold relations, so co-location precision degrades measurably.
pub fn perturb(gold: &GoldCorpus, distractor_rate: f64) -> Result<GoldCorpus, SynthError> {
    if !(0.0..=1.0).contains(&distractor_rate) {
        return Err(SynthError::InvalidConfig(
            "distractor_rate must be within [0, 1]".into(),
        ));
    }
    let config = &gold.manifest.config;
    let lexicons = build_lexicons(config);
    let drug_lex = &lexicons[&EntityType::Drug];
    let mut rng =
        ChaCha8Rng::seed_from_u64(config.seed ^ PERTURB_SALT ^ distractor_rate.to_bits());

    let mut documents = Vec::with_capacity(gold.corpus.len());
    for doc in &gold.corpus.documents {
        let mut text: Vec<char> = doc.text.chars().collect();
        let mut entities: Vec<Entity> = doc.entities().cloned().collect();
        let relations: Vec<Relation> = doc.relations().cloned().collect();

        // Decide insertions against the original offsets, then apply from the
        // rightmost position so earlier offsets stay valid while shifting.
        let mut insertions: Vec<(usize, String)> = Vec::new();
        for rel in &relations {
            if rng.gen_bool(distractor_rate) {
                let word = drug_lex[rng.gen_range(0..drug_lex.len())].clone();
                let at = entities
                    .iter()
                    .find(|e| e.id == rel.attr)
                    .expect("relation argument resolves")
                    .start();
                insertions.push((at, word));
            }
        }
        insertions.sort_by_key(|ins| std::cmp::Reverse(ins.0));

        for (next_t, (at, word)) in (entities.len() + 1..).zip(insertions) {
            let ins: Vec<char> = word.chars().chain([' ']).collect();
            let shift = ins.len();
            text.splice(at..at, ins);
            for e in &mut entities {
                for f in &mut e.fragments {
                    debug_assert!(!(f.start < at && at < f.end), "insertion splits an entity");
                    if f.start >= at {
                        f.start += shift;
                        f.end += shift;
                    }
                }
            }
            entities.push(
                Entity::new(
                    format!("T{next_t}"),
                    EntityType::Drug,
                    vec![Span {
                        start: at,
                        end: at + word.chars().count(),
                    }],
                    word,
                )
                .expect("distractor span is valid"),
            );
        }

        documents.push(Document::new(
            doc.doc_id.clone(),
            text.into_iter().collect::<String>(),
            entities,
            relations,
        )?);
    }

    let corpus = Corpus::new(documents);
    let manifest = SynthManifest {
        config: config.clone(),
        distractor_rate,
        checksum: corpus_checksum(&corpus),
        generator_version: gold.manifest.generator_version.clone(),
    };
    Ok(GoldCorpus { corpus, manifest })
}

/// Writes `<doc_id>.txt`/`<doc_id>.ann` pairs plus `manifest.json`.
pub fn write_corpus(gold: &GoldCorpus, dir: &Path) -> Result<(), SynthError> {
    let io_err = |path: &Path, e: std::io::Error| SynthError::Io {
        path: path.to_path_buf(),
        source: e,
    };
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    for doc in &gold.corpus.documents {
        let txt = dir.join(format!("{}.txt", doc.doc_id));
        fs::write(&txt, &doc.text).map_err(|e| io_err(&txt, e))?;
        let ann = dir.join(format!("{}.ann", doc.doc_id));
        fs::write(&ann, serialize_ann(doc.entities(), doc.relations()))
            .map_err(|e| io_err(&ann, e))?;
    }
    let manifest_path = dir.join("manifest.json");
    let manifest =
        serde_json::to_string_pretty(&gold.manifest).expect("manifest serializes");
    fs::write(&manifest_path, manifest).map_err(|e| io_err(&manifest_path, e))?;
    Ok(())
}
