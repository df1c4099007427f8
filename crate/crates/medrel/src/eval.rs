//! Scoring: per-type, micro, and macro P/R/F1 over relation triples, plus
//! per-class (relation / no-relation) breakdowns of candidate decisions.
//!
//! Triples are compared as exact (doc id, attribute id, drug id, type) keys;
//! duplicates collapse under set semantics. Zero denominators yield 0. The
//! macro average is the unweighted mean over all eight relation types,
//! including types with zero support.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Corpus, RelationType};
use crate::features::CandidatePair;
use crate::rules::PredictedRelation;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("decision references unknown candidate ({0})")]
    UnknownCandidate(String),
    #[error("conflicting decisions for candidate ({0})")]
    ConflictingDecision(String),
    #[error("missing decision for candidate ({0})")]
    MissingDecision(String),
}

/// Identity of one relation instance.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RelationKey {
    pub doc_id: String,
    pub attr: String,
    pub drug: String,
    pub rtype: RelationType,
}

impl RelationKey {
    pub fn new(
        doc_id: impl Into<String>,
        attr: impl Into<String>,
        drug: impl Into<String>,
        rtype: RelationType,
    ) -> RelationKey {
        RelationKey {
            doc_id: doc_id.into(),
            attr: attr.into(),
            drug: drug.into(),
            rtype,
        }
    }
}

impl std::fmt::Display for RelationKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}, {}, {}, {}",
            self.doc_id, self.attr, self.drug, self.rtype
        )
    }
}

impl From<&PredictedRelation> for RelationKey {
    fn from(p: &PredictedRelation) -> RelationKey {
        RelationKey::new(p.doc_id.clone(), p.attr.clone(), p.drug.clone(), p.rtype)
    }
}

impl From<&CandidatePair> for RelationKey {
    fn from(p: &CandidatePair) -> RelationKey {
        RelationKey::new(p.doc_id.clone(), p.attr.clone(), p.drug.clone(), p.rtype)
    }
}

/// Gold triples of an entire corpus.
pub fn gold_keys(corpus: &Corpus) -> Vec<RelationKey> {
    corpus
        .documents
        .iter()
        .flat_map(|doc| {
            doc.relations()
                .map(|r| RelationKey::new(doc.doc_id.clone(), r.attr.clone(), r.drug.clone(), r.rtype))
        })
        .collect()
}

/// Flattens a per-document prediction map into keys.
pub fn prediction_keys(map: &BTreeMap<String, Vec<PredictedRelation>>) -> Vec<RelationKey> {
    map.values().flatten().map(RelationKey::from).collect()
}

/// True/false positive and false negative counts for one relation type.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    #[serde(rename = "p")]
    pub precision: f64,
    #[serde(rename = "r")]
    pub recall: f64,
    #[serde(rename = "f")]
    pub f1: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct TypeMetrics {
    #[serde(rename = "p")]
    pub precision: f64,
    #[serde(rename = "r")]
    pub recall: f64,
    #[serde(rename = "f")]
    pub f1: f64,
    pub support: usize,
}

/// Per-type and aggregate scores; `dropped_pairs` carries the candidate
///-generation tally when the caller has one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub per_type: BTreeMap<RelationType, TypeMetrics>,
    pub micro: Metrics,
    #[serde(rename = "macro")]
    pub macro_avg: Metrics,
    pub dropped_pairs: usize,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn harmonic(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

fn metrics_from(c: &ConfusionCounts) -> Metrics {
    let precision = ratio(c.tp, c.tp + c.fp);
    let recall = ratio(c.tp, c.tp + c.fn_);
    Metrics {
        precision,
        recall,
        f1: harmonic(precision, recall),
    }
}

/// Per-type confusion counts from exact set comparison of relation keys;
/// duplicates collapse.
pub fn confusion_counts(
    gold: &[RelationKey],
    pred: &[RelationKey],
) -> BTreeMap<RelationType, ConfusionCounts> {
    let gold: BTreeSet<&RelationKey> = gold.iter().collect();
    let pred: BTreeSet<&RelationKey> = pred.iter().collect();
    RelationType::ALL
        .iter()
        .map(|rtype| {
            let g: BTreeSet<&&RelationKey> = gold.iter().filter(|k| k.rtype == *rtype).collect();
            let p: BTreeSet<&&RelationKey> = pred.iter().filter(|k| k.rtype == *rtype).collect();
            (
                *rtype,
                ConfusionCounts {
                    tp: g.intersection(&p).count(),
                    fp: p.difference(&g).count(),
                    fn_: g.difference(&p).count(),
                },
            )
        })
        .collect()
}

/// Scores predictions against gold by exact set comparison of relation keys.
pub fn score_relations(gold: &[RelationKey], pred: &[RelationKey]) -> ScoreReport {
    let counts = confusion_counts(gold, pred);
    let mut per_type = BTreeMap::new();
    let mut pooled = ConfusionCounts::default();
    let mut macro_sum = Metrics::default();
    for (rtype, c) in &counts {
        pooled.tp += c.tp;
        pooled.fp += c.fp;
        pooled.fn_ += c.fn_;
        let m = metrics_from(c);
        macro_sum.precision += m.precision;
        macro_sum.recall += m.recall;
        macro_sum.f1 += m.f1;
        per_type.insert(
            *rtype,
            TypeMetrics {
                precision: m.precision,
                recall: m.recall,
                f1: m.f1,
                support: c.tp + c.fn_,
            },
        );
    }
    let n = RelationType::ALL.len() as f64;
    ScoreReport {
        per_type,
        micro: metrics_from(&pooled),
        macro_avg: Metrics {
            precision: macro_sum.precision / n,
            recall: macro_sum.recall / n,
            f1: macro_sum.f1 / n,
        },
        dropped_pairs: 0,
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    #[serde(rename = "p")]
    pub precision: f64,
    #[serde(rename = "r")]
    pub recall: f64,
    #[serde(rename = "f")]
    pub f1: f64,
    pub support: usize,
}

/// Positive (relation) and negative (no-relation) class metrics for one type.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct TypeClassReport {
    pub positive: ClassMetrics,
    pub negative: ClassMetrics,
}

/// Per-class breakdown of binary candidate decisions, one entry per relation
/// type present in the candidate set.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ClassReport {
    pub per_type: BTreeMap<RelationType, TypeClassReport>,
}

/// Builds a decision list covering every candidate: a candidate is decided
/// positive exactly when its key appears in `predictions`.
pub fn decisions_from_predictions(
    candidates: &[CandidatePair],
    predictions: &[PredictedRelation],
) -> Vec<(RelationKey, bool)> {
    let predicted: BTreeSet<RelationKey> = predictions.iter().map(RelationKey::from).collect();
    candidates
        .iter()
        .map(|c| {
            let key = RelationKey::from(c);
            let hit = predicted.contains(&key);
            (key, hit)
        })
        .collect()
}

/// Scores candidate-level decisions per relation type and per class, treating
/// "no relation" as its own class with its own support.
///
/// The decisions must cover exactly the candidate set: a decision for an
/// unknown candidate, conflicting duplicate decisions, or a candidate without
/// a decision are errors.
pub fn class_report(
    candidates: &[CandidatePair],
    decisions: &[(RelationKey, bool)],
) -> Result<ClassReport, EvalError> {
    let candidate_keys: BTreeSet<RelationKey> =
        candidates.iter().map(RelationKey::from).collect();
    let mut decided: BTreeMap<&RelationKey, bool> = BTreeMap::new();
    for (key, positive) in decisions {
        if !candidate_keys.contains(key) {
            return Err(EvalError::UnknownCandidate(key.to_string()));
        }
        if let Some(prev) = decided.insert(key, *positive) {
            if prev != *positive {
                return Err(EvalError::ConflictingDecision(key.to_string()));
            }
        }
    }

    // (pred positive & gold positive, pred positive & gold negative, ...)
    let mut cells: BTreeMap<RelationType, [usize; 4]> = BTreeMap::new();
    for cand in candidates {
        let key = RelationKey::from(cand);
        let Some(pred) = decided.get(&key) else {
            return Err(EvalError::MissingDecision(key.to_string()));
        };
        let gold = cand.label.is_positive();
        let cell = match (*pred, gold) {
            (true, true) => 0,
            (true, false) => 1,
            (false, true) => 2,
            (false, false) => 3,
        };
        cells.entry(cand.rtype).or_default()[cell] += 1;
    }

    let mut report = ClassReport::default();
    for (rtype, [tp, fp, fn_, tn]) in cells {
        let positive = metrics_from(&ConfusionCounts { tp, fp, fn_ });
        // Negative class: swap the roles, tn is its true positive.
        let negative = metrics_from(&ConfusionCounts {
            tp: tn,
            fp: fn_,
            fn_: fp,
        });
        report.per_type.insert(
            rtype,
            TypeClassReport {
                positive: ClassMetrics {
                    precision: positive.precision,
                    recall: positive.recall,
                    f1: positive.f1,
                    support: tp + fn_,
                },
                negative: ClassMetrics {
                    precision: negative.precision,
                    recall: negative.recall,
                    f1: negative.f1,
                    support: tn + fp,
                },
            },
        );
    }
    Ok(report)
}

/// Output format for rendered reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Table,
    Json,
    Tsv,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "table" => Ok(ReportFormat::Table),
            "json" => Ok(ReportFormat::Json),
            "tsv" => Ok(ReportFormat::Tsv),
            _ => Err(format!("unknown report format {s:?}")),
        }
    }
}

/// Renders a score report. The table view rounds to two decimals; JSON and
/// TSV carry full precision. Column order is fixed: type, P, R, F, support.
pub fn render_report(report: &ScoreReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => {
            serde_json::to_string_pretty(report).expect("report serializes")
        }
        ReportFormat::Tsv => {
            let mut out = String::from("type\tP\tR\tF\tsupport\n");
            let mut total = 0;
            for (rtype, m) in &report.per_type {
                total += m.support;
                writeln!(
                    out,
                    "{rtype}\t{}\t{}\t{}\t{}",
                    m.precision, m.recall, m.f1, m.support
                )
                .unwrap();
            }
            writeln!(
                out,
                "System (Micro)\t{}\t{}\t{}\t{total}",
                report.micro.precision, report.micro.recall, report.micro.f1
            )
            .unwrap();
            writeln!(
                out,
                "System (Macro)\t{}\t{}\t{}\t{total}",
                report.macro_avg.precision, report.macro_avg.recall, report.macro_avg.f1
            )
            .unwrap();
            out
        }
        ReportFormat::Table => {
            let mut out = format!(
                "{:<16} {:>6} {:>6} {:>6} {:>8}\n",
                "Relation", "P", "R", "F", "Support"
            );
            let mut total = 0;
            for (rtype, m) in &report.per_type {
                total += m.support;
                writeln!(
                    out,
                    "{:<16} {:>6.2} {:>6.2} {:>6.2} {:>8}",
                    rtype.name(),
                    m.precision,
                    m.recall,
                    m.f1,
                    m.support
                )
                .unwrap();
            }
            writeln!(
                out,
                "{:<16} {:>6.2} {:>6.2} {:>6.2} {:>8}",
                "System (Micro)",
                report.micro.precision,
                report.micro.recall,
                report.micro.f1,
                total
            )
            .unwrap();
            writeln!(
                out,
                "{:<16} {:>6.2} {:>6.2} {:>6.2} {:>8}",
                "System (Macro)",
                report.macro_avg.precision,
                report.macro_avg.recall,
                report.macro_avg.f1,
                total
            )
            .unwrap();
            out
        }
    }
}

/// Renders a per-class report with one positive and one negative row per
/// relation type.
pub fn render_class_report(report: &ClassReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => {
            serde_json::to_string_pretty(report).expect("report serializes")
        }
        ReportFormat::Tsv => {
            let mut out = String::from("type\tclass\tP\tR\tF\tsupport\n");
            for (rtype, t) in &report.per_type {
                for (class, m) in [("positive", &t.positive), ("negative", &t.negative)] {
                    writeln!(
                        out,
                        "{rtype}\t{class}\t{}\t{}\t{}\t{}",
                        m.precision, m.recall, m.f1, m.support
                    )
                    .unwrap();
                }
            }
            out
        }
        ReportFormat::Table => {
            let mut out = format!(
                "{:<16} {:<9} {:>6} {:>6} {:>6} {:>8}\n",
                "Relation", "Class", "P", "R", "F", "Support"
            );
            for (rtype, t) in &report.per_type {
                for (class, m) in [("positive", &t.positive), ("negative", &t.negative)] {
                    writeln!(
                        out,
                        "{:<16} {:<9} {:>6.2} {:>6.2} {:>6.2} {:>8}",
                        rtype.name(),
                        class,
                        m.precision,
                        m.recall,
                        m.f1,
                        m.support
                    )
                    .unwrap();
                }
            }
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Span;
    use crate::features::Label;

    fn key(doc: &str, attr: &str, drug: &str, rtype: RelationType) -> RelationKey {
        RelationKey::new(doc, attr, drug, rtype)
    }

    #[test]
    fn identical_sets_score_one() {
        let gold = vec![
            key("d1", "T2", "T1", RelationType::StrengthDrug),
            key("d1", "T4", "T1", RelationType::RouteDrug),
        ];
        let report = score_relations(&gold, &gold.clone());
        assert_eq!(report.micro.precision, 1.0);
        assert_eq!(report.micro.recall, 1.0);
        assert_eq!(report.micro.f1, 1.0);
        assert_eq!(report.per_type[&RelationType::StrengthDrug].f1, 1.0);
        assert_eq!(report.per_type[&RelationType::StrengthDrug].support, 1);
    }

    #[test]
    fn one_each_of_tp_fp_fn_scores_half() {
        let gold = vec![
            key("d1", "a", "x", RelationType::StrengthDrug),
            key("d1", "b", "x", RelationType::StrengthDrug),
        ];
        let pred = vec![
            key("d1", "a", "x", RelationType::StrengthDrug),
            key("d1", "c", "x", RelationType::StrengthDrug),
        ];
        let report = score_relations(&gold, &pred);
        let m = &report.per_type[&RelationType::StrengthDrug];
        assert_eq!((m.precision, m.recall, m.f1), (0.5, 0.5, 0.5));
    }

    #[test]
    fn micro_pools_counts_and_macro_averages_all_types() {
        // Type A perfect (1 triple), type B all wrong (fp=1, fn=1).
        let gold = vec![
            key("d1", "a", "x", RelationType::StrengthDrug),
            key("d1", "b", "x", RelationType::RouteDrug),
        ];
        let pred = vec![
            key("d1", "a", "x", RelationType::StrengthDrug),
            key("d1", "c", "x", RelationType::RouteDrug),
        ];
        let report = score_relations(&gold, &pred);
        // Micro pools: tp=1, fp=1, fn=1.
        assert_eq!(report.micro.f1, 0.5);
        assert_eq!(report.micro.precision, 0.5);
        // Per-type F over the two populated types is 1 and 0; the macro
        // average runs over the full eight-type universe, so six types with
        // zero support contribute zeros.
        assert_eq!(report.per_type[&RelationType::StrengthDrug].f1, 1.0);
        assert_eq!(report.per_type[&RelationType::RouteDrug].f1, 0.0);
        assert!((report.macro_avg.f1 - 1.0 / 8.0).abs() < 1e-15);
    }

    #[test]
    fn empty_inputs_score_zero_not_nan() {
        let report = score_relations(&[], &[]);
        assert_eq!(report.micro.precision, 0.0);
        assert_eq!(report.micro.recall, 0.0);
        assert_eq!(report.micro.f1, 0.0);
        assert_eq!(report.macro_avg.f1, 0.0);
    }

    #[test]
    fn duplicate_predictions_collapse() {
        let gold = vec![key("d1", "a", "x", RelationType::StrengthDrug)];
        let pred = vec![
            key("d1", "a", "x", RelationType::StrengthDrug),
            key("d1", "a", "x", RelationType::StrengthDrug),
        ];
        let report = score_relations(&gold, &pred);
        assert_eq!(report.micro.f1, 1.0);
    }

    #[test]
    fn metrics_are_permutation_invariant() {
        let gold = vec![
            key("d1", "a", "x", RelationType::StrengthDrug),
            key("d2", "b", "y", RelationType::AdeDrug),
            key("d1", "c", "x", RelationType::RouteDrug),
        ];
        let pred = vec![
            key("d1", "a", "x", RelationType::StrengthDrug),
            key("d2", "b", "y", RelationType::AdeDrug),
        ];
        let a = score_relations(&gold, &pred);
        let mut gold_r = gold.clone();
        gold_r.reverse();
        let mut pred_r = pred.clone();
        pred_r.reverse();
        let b = score_relations(&gold_r, &pred_r);
        assert_eq!(a, b);
    }

    fn pair(doc: &str, attr: &str, rtype: RelationType, label: Label) -> CandidatePair {
        CandidatePair {
            doc_id: doc.into(),
            attr: attr.into(),
            drug: "T1".into(),
            rtype,
            label,
            window: Span { start: 0, end: 1 },
            window_tokens: vec![],
        }
    }

    #[test]
    fn all_positive_all_predicted_gives_perfect_positive_class() {
        let candidates = vec![
            pair("d1", "T2", RelationType::StrengthDrug, Label::Positive),
            pair("d1", "T3", RelationType::StrengthDrug, Label::Positive),
        ];
        let decisions: Vec<(RelationKey, bool)> = candidates
            .iter()
            .map(|c| (RelationKey::from(c), true))
            .collect();
        let report = class_report(&candidates, &decisions).unwrap();
        let t = &report.per_type[&RelationType::StrengthDrug];
        assert_eq!((t.positive.precision, t.positive.recall, t.positive.f1), (1.0, 1.0, 1.0));
        assert_eq!(t.positive.support, 2);
        assert_eq!(t.negative.support, 0);
    }

    #[test]
    fn supports_equal_class_frequencies() {
        let candidates = vec![
            pair("d1", "T2", RelationType::RouteDrug, Label::Positive),
            pair("d1", "T3", RelationType::RouteDrug, Label::Negative),
            pair("d1", "T4", RelationType::RouteDrug, Label::Negative),
        ];
        let decisions: Vec<(RelationKey, bool)> = candidates
            .iter()
            .map(|c| (RelationKey::from(c), false))
            .collect();
        let report = class_report(&candidates, &decisions).unwrap();
        let t = &report.per_type[&RelationType::RouteDrug];
        assert_eq!(t.positive.support, 1);
        assert_eq!(t.negative.support, 2);
        // Everything predicted negative: negative recall is 1, precision 2/3.
        assert_eq!(t.negative.recall, 1.0);
        assert!((t.negative.precision - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn unknown_and_missing_decisions_are_errors() {
        let candidates = vec![pair("d1", "T2", RelationType::RouteDrug, Label::Positive)];
        let stranger = key("d9", "T2", "T1", RelationType::RouteDrug);
        assert!(matches!(
            class_report(&candidates, &[(stranger, true)]).unwrap_err(),
            EvalError::UnknownCandidate(_)
        ));
        assert!(matches!(
            class_report(&candidates, &[]).unwrap_err(),
            EvalError::MissingDecision(_)
        ));
        let k = RelationKey::from(&candidates[0]);
        assert!(matches!(
            class_report(&candidates, &[(k.clone(), true), (k, false)]).unwrap_err(),
            EvalError::ConflictingDecision(_)
        ));
    }

    #[test]
    fn class_report_matches_brute_force_cells() {
        // 200 candidates with varied labels and decisions; recompute the four
        // cells independently per type.
        let mut candidates = Vec::new();
        let mut decisions = Vec::new();
        for i in 0..200 {
            let rtype = RelationType::ALL[i % 4];
            let label = if i % 3 == 0 { Label::Positive } else { Label::Negative };
            let cand = pair("d1", &format!("T{i}"), rtype, label);
            let decide = i % 5 < 2;
            decisions.push((RelationKey::from(&cand), decide));
            candidates.push(cand);
        }
        let report = class_report(&candidates, &decisions).unwrap();
        for rtype in &RelationType::ALL[..4] {
            let (mut tp, mut fp, mut fn_, mut tn) = (0usize, 0, 0, 0);
            for (c, (_, d)) in candidates.iter().zip(&decisions) {
                if c.rtype != *rtype {
                    continue;
                }
                match (*d, c.label.is_positive()) {
                    (true, true) => tp += 1,
                    (true, false) => fp += 1,
                    (false, true) => fn_ += 1,
                    (false, false) => tn += 1,
                }
            }
            let t = &report.per_type[rtype];
            let p = if tp + fp == 0 { 0.0 } else { tp as f64 / (tp + fp) as f64 };
            let r = if tp + fn_ == 0 { 0.0 } else { tp as f64 / (tp + fn_) as f64 };
            assert!((t.positive.precision - p).abs() < 1e-12);
            assert!((t.positive.recall - r).abs() < 1e-12);
            let np = if tn + fn_ == 0 { 0.0 } else { tn as f64 / (tn + fn_) as f64 };
            let nr = if tn + fp == 0 { 0.0 } else { tn as f64 / (tn + fp) as f64 };
            assert!((t.negative.precision - np).abs() < 1e-12);
            assert!((t.negative.recall - nr).abs() < 1e-12);
            assert_eq!(t.positive.support + t.negative.support, tp + fp + fn_ + tn);
        }
    }

    #[test]
    fn micro_f_is_harmonic_of_micro_p_and_r() {
        let gold = vec![
            key("d1", "a", "x", RelationType::StrengthDrug),
            key("d1", "b", "x", RelationType::RouteDrug),
            key("d1", "c", "x", RelationType::AdeDrug),
        ];
        let pred = vec![
            key("d1", "a", "x", RelationType::StrengthDrug),
            key("d1", "d", "x", RelationType::RouteDrug),
        ];
        let r = score_relations(&gold, &pred);
        let expected = 2.0 * r.micro.precision * r.micro.recall
            / (r.micro.precision + r.micro.recall);
        assert_eq!(r.micro.f1, expected);
    }

    #[test]
    fn identical_per_type_counts_align_micro_and_macro() {
        let mut gold = Vec::new();
        let mut pred = Vec::new();
        for rtype in RelationType::ALL {
            gold.push(key("d1", "a", "x", rtype));
            gold.push(key("d1", "b", "x", rtype));
            pred.push(key("d1", "a", "x", rtype));
            pred.push(key("d1", "c", "x", rtype));
        }
        let r = score_relations(&gold, &pred);
        assert!((r.micro.precision - r.macro_avg.precision).abs() <= 1e-12);
        assert!((r.micro.recall - r.macro_avg.recall).abs() <= 1e-12);
        assert!((r.micro.f1 - r.macro_avg.f1).abs() <= 1e-12);
    }

    #[test]
    fn rendered_table_is_stable_and_labeled() {
        let gold = vec![key("d1", "a", "x", RelationType::StrengthDrug)];
        let report = score_relations(&gold, &gold.clone());
        let t1 = render_report(&report, ReportFormat::Table);
        let t2 = render_report(&report, ReportFormat::Table);
        assert_eq!(t1, t2);
        assert!(t1.contains("System (Micro)"));
        assert!(t1.contains("System (Macro)"));
        assert!(t1.contains("Strength-Drug"));
        let json = render_report(&report, ReportFormat::Json);
        let parsed: ScoreReport = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed, report);
        let tsv = render_report(&report, ReportFormat::Tsv);
        assert!(tsv.starts_with("type\tP\tR\tF\tsupport\n"));
    }

    #[test]
    fn empty_report_renders_header_plus_aggregates() {
        let report = score_relations(&[], &[]);
        let table = render_report(&report, ReportFormat::Table);
        let lines: Vec<&str> = table.lines().collect();
        assert_eq!(lines.len(), 1 + 8 + 2);
        assert!(lines[0].starts_with("Relation"));
    }
}
