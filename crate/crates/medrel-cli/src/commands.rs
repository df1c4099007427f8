//! Subcommand implementations.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};
use rayon::prelude::*;
use serde::Serialize;

use medrel::corpus::{load_corpus, parse_pred_ann, Corpus, Document, EntityType, RelationType};
use medrel::eval::{
    class_report, decisions_from_predictions, gold_keys, render_class_report, render_report,
    score_relations, RelationKey, ReportFormat, ScoreReport,
};
use medrel::features::{
    generate_candidates, load_embeddings, CandidatePair, EncodeConfig,
    DEFAULT_MAX_CROSS_SENTENCES,
};
use medrel::neural::{
    load_model, predict as predict_pairs, save_model, train as train_model, CnnConfig, ModelKind,
    RmsPropConfig, TrainConfig,
};
use medrel::rules::{extract_relations, BindingMode, PredictedRelation, RuleConfig, TraversalMechanism};
use medrel::synth::{generate, perturb, write_corpus, SynthConfig};

use crate::config::FileConfig;
use crate::manifest::{create_run_dir, Manifest};
use crate::{
    ExtractRulesArgs, GenCandidatesArgs, PredictArgs, ReportArgs, ScoreArgs, SynthArgs, TrainArgs,
    ValidateArgs,
};

/// An error plus the process exit code it maps to (1 internal, 2 bad input).
pub struct Failure {
    pub code: i32,
    pub error: anyhow::Error,
}

pub type CliResult = Result<(), Failure>;

fn input(error: anyhow::Error) -> Failure {
    Failure { code: 2, error }
}

fn internal(error: anyhow::Error) -> Failure {
    Failure { code: 1, error }
}

fn required(name: &str, flag: Option<PathBuf>, cfg: Option<&PathBuf>) -> Result<PathBuf, Failure> {
    flag.or_else(|| cfg.cloned())
        .ok_or_else(|| input(anyhow!("missing required --{name} (or config key \"{name}\")")))
}

fn load(dir: &Path, strict: bool) -> Result<Corpus, Failure> {
    let (corpus, warnings) = load_corpus(dir, strict)
        .map_err(|e| input(anyhow!(e).context(format!("loading corpus {}", dir.display()))))?;
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    Ok(corpus)
}

fn parse_rtype_selection(s: &str) -> Result<Vec<RelationType>, Failure> {
    if s == "all" {
        return Ok(RelationType::ALL.to_vec());
    }
    s.parse::<RelationType>()
        .map(|t| vec![t])
        .map_err(|e| input(anyhow!(e)))
}

fn thread_pool(jobs: usize) -> Result<rayon::ThreadPool, Failure> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| internal(anyhow!(e)))
}

pub fn validate(args: ValidateArgs, cfg: &FileConfig) -> CliResult {
    let dir = required("corpus", args.corpus, cfg.corpus.as_ref())?;
    let corpus = load(&dir, true)?;

    let mut entity_counts: BTreeMap<EntityType, usize> =
        EntityType::ALL.iter().map(|t| (*t, 0)).collect();
    let mut relation_counts: BTreeMap<RelationType, usize> =
        RelationType::ALL.iter().map(|t| (*t, 0)).collect();
    for doc in &corpus.documents {
        for e in doc.entities() {
            *entity_counts.get_mut(&e.etype).unwrap() += 1;
        }
        for r in doc.relations() {
            *relation_counts.get_mut(&r.rtype).unwrap() += 1;
        }
    }
    println!("Documents: {}", corpus.len());
    println!();
    println!("{:<16} {:>10}", "Entity", "#Instances");
    for (t, n) in &entity_counts {
        println!("{:<16} {:>10}", t.name(), n);
    }
    println!();
    println!("{:<16} {:>10}", "Relation", "#Instances");
    for (t, n) in &relation_counts {
        println!("{:<16} {:>10}", t.name(), n);
    }
    Ok(())
}

pub fn synth(args: SynthArgs, cfg: &FileConfig) -> CliResult {
    let out = required("out", args.out, cfg.out.as_ref())?;
    let mut config = SynthConfig {
        seed: args.seed.or(cfg.seed).unwrap_or(0),
        ..SynthConfig::default()
    };
    if let Some(n) = args.docs {
        config.n_docs = n;
    }
    if let Some(lo) = args.sentences_min {
        config.sentences_per_doc.0 = lo;
    }
    if let Some(hi) = args.sentences_max {
        config.sentences_per_doc.1 = hi;
    }
    if let Some(p) = args.p_multi_drug {
        config.p_multi_drug_sentence = p;
    }
    if let Some(p) = args.p_cross_sentence {
        config.p_cross_sentence = p;
    }
    if let Some(p) = args.p_drug_first {
        config = config.with_drug_first_all(p);
    }
    let mut gold = generate(&config).map_err(|e| input(anyhow!(e)))?;
    if let Some(rate) = args.distractor_rate {
        gold = perturb(&gold, rate).map_err(|e| input(anyhow!(e)))?;
    }
    write_corpus(&gold, &out).map_err(|e| internal(anyhow!(e)))?;
    println!(
        "wrote {} documents to {} (checksum {})",
        gold.corpus.len(),
        out.display(),
        &gold.manifest.checksum[..12]
    );

    if let Some(emb_path) = args.emit_embeddings {
        let text = random_embedding_file(&gold.corpus, args.embedding_dim, config.seed);
        fs::write(&emb_path, text)
            .with_context(|| format!("writing {}", emb_path.display()))
            .map_err(internal)?;
        println!("wrote embeddings to {}", emb_path.display());
    }
    Ok(())
}

// GloVe-style text file with seeded random vectors over the corpus
// vocabulary (lowercased tokens, sorted).
fn random_embedding_file(corpus: &Corpus, dim: usize, seed: u64) -> String {
    use rand::Rng;
    use rand::SeedableRng;
    let mut vocab: Vec<String> = corpus
        .documents
        .iter()
        .flat_map(|d| d.tokens().iter().map(|t| t.text.to_lowercase()))
        .collect();
    vocab.sort();
    vocab.dedup();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0x454d_4244);
    let mut out = String::new();
    for word in vocab {
        out.push_str(&word);
        for _ in 0..dim {
            out.push_str(&format!(" {}", rng.gen_range(-0.5..0.5)));
        }
        out.push('\n');
    }
    out
}

fn rule_config_from(
    mechanism: Option<String>,
    mode: Option<String>,
    override_flags: &[String],
    cfg: &FileConfig,
) -> Result<RuleConfig, Failure> {
    let mechanism: TraversalMechanism = mechanism
        .or_else(|| cfg.mechanism.clone())
        .unwrap_or_else(|| "left-only".to_string())
        .parse()
        .map_err(|e: String| input(anyhow!(e)))?;
    let mode: BindingMode = mode
        .or_else(|| cfg.mode.clone())
        .unwrap_or_else(|| "unbounded".to_string())
        .parse()
        .map_err(|e: String| input(anyhow!(e)))?;
    let mut config = RuleConfig::new(mechanism, mode);
    let mut raw: Vec<(String, String)> = Vec::new();
    if let Some(map) = &cfg.overrides {
        raw.extend(map.iter().map(|(k, v)| (k.clone(), v.clone())));
    }
    for flag in override_flags {
        let (k, v) = flag
            .split_once('=')
            .ok_or_else(|| input(anyhow!("override {flag:?} is not RTYPE=MECHANISM")))?;
        raw.push((k.to_string(), v.to_string()));
    }
    for (k, v) in raw {
        let rtype: RelationType = k.parse().map_err(|e: String| input(anyhow!(e)))?;
        let mech: TraversalMechanism = v.parse().map_err(|e: String| input(anyhow!(e)))?;
        config.overrides.insert(rtype, mech);
    }
    Ok(config)
}

fn write_predictions(
    run_dir: &Path,
    corpus: &Corpus,
    by_doc: &BTreeMap<String, Vec<PredictedRelation>>,
) -> Result<(), Failure> {
    let pred_dir = run_dir.join("predictions");
    fs::create_dir_all(&pred_dir)
        .with_context(|| format!("creating {}", pred_dir.display()))
        .map_err(internal)?;
    for doc in &corpus.documents {
        let mut lines = String::new();
        if let Some(preds) = by_doc.get(&doc.doc_id) {
            for (i, p) in preds.iter().enumerate() {
                lines.push_str(&format!(
                    "R{}\t{} Arg1:{} Arg2:{}\n",
                    i + 1,
                    p.rtype,
                    p.attr,
                    p.drug
                ));
            }
        }
        let path = pred_dir.join(format!("{}.ann", doc.doc_id));
        fs::write(&path, lines)
            .with_context(|| format!("writing {}", path.display()))
            .map_err(internal)?;
    }
    Ok(())
}

pub fn extract_rules(args: ExtractRulesArgs, cfg: &FileConfig) -> CliResult {
    let corpus_dir = required("corpus", args.corpus, cfg.corpus.as_ref())?;
    let out = required("out", args.out, cfg.out.as_ref())?;
    let strict = args.strict || cfg.strict.unwrap_or(false);
    let jobs = args.jobs.or(cfg.jobs).unwrap_or(1);
    let rule_config = rule_config_from(args.mechanism, args.mode, &args.overrides, cfg)?;

    let corpus = load(&corpus_dir, strict)?;
    let pool = thread_pool(jobs)?;
    // Per-document extraction in parallel; the keyed collection fixes the
    // output order regardless of thread count.
    let by_doc: BTreeMap<String, Vec<PredictedRelation>> = pool.install(|| {
        corpus
            .documents
            .par_iter()
            .map(|doc| (doc.doc_id.clone(), extract_relations(doc, &rule_config)))
            .collect()
    });

    let run_dir = create_run_dir(&out, args.run_name.as_deref()).map_err(input)?;
    write_predictions(&run_dir, &corpus, &by_doc)?;

    let mut manifest = Manifest::new(
        "extract-rules",
        None,
        serde_json::to_value(&rule_config).map_err(|e| internal(anyhow!(e)))?,
    );
    manifest.record_input(&corpus_dir).map_err(internal)?;
    manifest.finalize(&run_dir).map_err(internal)?;

    let total: usize = by_doc.values().map(Vec::len).sum();
    println!(
        "extracted {total} relations from {} documents into {}",
        corpus.len(),
        run_dir.display()
    );
    Ok(())
}

pub fn gen_candidates(args: GenCandidatesArgs, cfg: &FileConfig) -> CliResult {
    let corpus_dir = required("corpus", args.corpus, cfg.corpus.as_ref())?;
    let out = required("out", args.out, cfg.out.as_ref())?;
    let strict = args.strict || cfg.strict.unwrap_or(false);
    let max_cross = args
        .max_cross
        .or(cfg.max_cross_sentences)
        .unwrap_or(DEFAULT_MAX_CROSS_SENTENCES);
    let rtypes = parse_rtype_selection(&args.rtype)?;
    let corpus = load(&corpus_dir, strict)?;

    let mut tsv = String::from("doc_id\tattr_id\tdrug_id\trtype\tlabel\n");
    let mut dropped = 0usize;
    let mut total = 0usize;
    for doc in &corpus.documents {
        for rtype in &rtypes {
            let set = generate_candidates(doc, *rtype, max_cross);
            dropped += set.dropped_gold_pairs;
            for p in set.pairs {
                let label = if p.label.is_positive() { "positive" } else { "negative" };
                tsv.push_str(&format!(
                    "{}\t{}\t{}\t{}\t{}\n",
                    p.doc_id, p.attr, p.drug, p.rtype, label
                ));
                total += 1;
            }
        }
    }

    let run_dir = create_run_dir(&out, args.run_name.as_deref()).map_err(input)?;
    let path = run_dir.join("candidates.tsv");
    fs::write(&path, tsv)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(internal)?;

    let mut manifest = Manifest::new(
        "gen-candidates",
        None,
        serde_json::json!({ "rtype": args.rtype, "max_cross_sentences": max_cross }),
    );
    manifest.record_input(&corpus_dir).map_err(internal)?;
    manifest.finalize(&run_dir).map_err(internal)?;
    println!(
        "wrote {total} candidates ({dropped} gold pairs beyond the sentence cap) to {}",
        path.display()
    );
    Ok(())
}

#[derive(Serialize)]
struct TrainSummary {
    rtype: RelationType,
    pairs: usize,
    positives: usize,
    dropped_gold_pairs: usize,
    final_loss: f64,
    final_f1: f64,
}

fn candidates_for(
    corpus: &Corpus,
    rtype: RelationType,
    max_cross: usize,
) -> (Vec<CandidatePair>, usize) {
    let mut pairs = Vec::new();
    let mut dropped = 0;
    for doc in &corpus.documents {
        let set = generate_candidates(doc, rtype, max_cross);
        dropped += set.dropped_gold_pairs;
        pairs.extend(set.pairs);
    }
    (pairs, dropped)
}

pub fn train(args: TrainArgs, cfg: &FileConfig) -> CliResult {
    let corpus_dir = required("corpus", args.corpus, cfg.corpus.as_ref())?;
    let emb_path = required("embeddings", args.embeddings, cfg.embeddings.as_ref())?;
    let out = required("out", args.out, cfg.out.as_ref())?;
    let strict = args.strict || cfg.strict.unwrap_or(false);
    let jobs = args.jobs.or(cfg.jobs).unwrap_or(1);
    let max_cross = args
        .max_cross
        .or(cfg.max_cross_sentences)
        .unwrap_or(DEFAULT_MAX_CROSS_SENTENCES);
    let rtypes = parse_rtype_selection(&args.rtype)?;
    let explicit_rtype = args.rtype != "all";

    let kind: ModelKind = args
        .model
        .or_else(|| cfg.model.clone())
        .unwrap_or_else(|| "segment".to_string())
        .parse()
        .map_err(|e: String| input(anyhow!(e)))?;

    let mut encode = EncodeConfig::default();
    if let Some(w) = args.window_len.or(cfg.window_len) {
        encode.window_len = w;
    }
    if let Some(lens) = args
        .segment_lens
        .map(|v| {
            <[usize; 5]>::try_from(v)
                .map_err(|v: Vec<usize>| input(anyhow!("need 5 segment lengths, got {}", v.len())))
        })
        .transpose()?
        .or(cfg.segment_lens)
    {
        encode.segment_lens = lens;
    }

    let mut cnn = CnnConfig::default();
    if let Some(w) = args.kernel_widths.or_else(|| cfg.kernel_widths.clone()) {
        cnn.kernel_widths = w;
    }
    if let Some(f) = args.filters.or(cfg.filters_per_width) {
        cnn.filters_per_width = f;
    }
    cnn.trainable_embeddings =
        args.trainable_embeddings || cfg.trainable_embeddings.unwrap_or(false);

    let mut train_cfg = TrainConfig {
        seed: args.seed.or(cfg.seed).unwrap_or(42),
        ..TrainConfig::default()
    };
    if let Some(b) = args.batch_size.or(cfg.batch_size) {
        train_cfg.batch_size = b;
    }
    if let Some(e) = args.epochs.or(cfg.epochs) {
        train_cfg.epochs = e;
    }
    let mut optimizer = RmsPropConfig::default();
    if let Some(lr) = args.learning_rate.or(cfg.learning_rate) {
        optimizer.learning_rate = lr;
    }
    if let Some(rho) = cfg.rho {
        optimizer.rho = rho;
    }
    if let Some(eps) = cfg.epsilon {
        optimizer.epsilon = eps;
    }
    train_cfg.optimizer = optimizer;
    if let Some(s) = cfg.shuffle {
        train_cfg.shuffle = s;
    }

    let corpus = load(&corpus_dir, strict)?;
    let embeddings = load_embeddings(&emb_path, None)
        .map_err(|e| input(anyhow!(e).context(format!("loading {}", emb_path.display()))))?;

    let run_dir = create_run_dir(&out, args.run_name.as_deref()).map_err(input)?;
    let pool = thread_pool(jobs)?;
    let results: Vec<Result<Option<TrainSummary>, Failure>> = pool.install(|| {
        rtypes
            .par_iter()
            .map(|rtype| {
                let (pairs, dropped) = candidates_for(&corpus, *rtype, max_cross);
                if pairs.is_empty() {
                    if explicit_rtype {
                        return Err(input(anyhow!("no candidates for {rtype}")));
                    }
                    eprintln!("warning: no candidates for {rtype}; skipped");
                    return Ok(None);
                }
                let (model, history) =
                    train_model(kind, &corpus, &pairs, &embeddings, &encode, &cnn, &train_cfg)
                        .map_err(|e| input(anyhow!(e).context(format!("training {rtype}"))))?;
                let model_path = run_dir.join(format!("model-{rtype}.json"));
                save_model(&model, &model_path).map_err(|e| internal(anyhow!(e)))?;
                let history_path = run_dir.join(format!("history-{rtype}.json"));
                fs::write(
                    &history_path,
                    serde_json::to_string_pretty(&history).map_err(|e| internal(anyhow!(e)))?,
                )
                .with_context(|| format!("writing {}", history_path.display()))
                .map_err(internal)?;
                let positives = pairs.iter().filter(|p| p.label.is_positive()).count();
                Ok(Some(TrainSummary {
                    rtype: *rtype,
                    pairs: pairs.len(),
                    positives,
                    dropped_gold_pairs: dropped,
                    final_loss: history.last().map(|h| h.loss).unwrap_or(f64::NAN),
                    final_f1: history.last().map(|h| h.f1).unwrap_or(0.0),
                }))
            })
            .collect()
    });

    let mut summaries = Vec::new();
    for r in results {
        if let Some(s) = r? {
            summaries.push(s);
        }
    }
    summaries.sort_by_key(|s| s.rtype);
    let summary_path = run_dir.join("summary.json");
    fs::write(
        &summary_path,
        serde_json::to_string_pretty(&summaries).map_err(|e| internal(anyhow!(e)))?,
    )
    .with_context(|| format!("writing {}", summary_path.display()))
    .map_err(internal)?;

    let mut manifest = Manifest::new(
        "train",
        Some(train_cfg.seed),
        serde_json::json!({
            "model": kind,
            "encode": encode,
            "cnn": cnn,
            "train": train_cfg,
            "max_cross_sentences": max_cross,
        }),
    );
    manifest.record_input(&corpus_dir).map_err(internal)?;
    manifest.record_input(&emb_path).map_err(internal)?;
    manifest.finalize(&run_dir).map_err(internal)?;

    for s in &summaries {
        println!(
            "{}: {} pairs ({} positive, {} dropped), final loss {:.4}, training F1 {:.3}",
            s.rtype, s.pairs, s.positives, s.dropped_gold_pairs, s.final_loss, s.final_f1
        );
    }
    println!("run directory: {}", run_dir.display());
    Ok(())
}

pub fn predict(args: PredictArgs, cfg: &FileConfig) -> CliResult {
    let corpus_dir = required("corpus", args.corpus, cfg.corpus.as_ref())?;
    let out = required("out", args.out, cfg.out.as_ref())?;
    let strict = args.strict || cfg.strict.unwrap_or(false);
    let threshold = args.threshold.or(cfg.threshold).unwrap_or(0.5);
    let max_cross = args
        .max_cross
        .or(cfg.max_cross_sentences)
        .unwrap_or(DEFAULT_MAX_CROSS_SENTENCES);

    let corpus = load(&corpus_dir, strict)?;
    let run_dir = create_run_dir(&out, args.run_name.as_deref()).map_err(input)?;

    let mut by_doc: BTreeMap<String, Vec<PredictedRelation>> = BTreeMap::new();
    let mut dropped_total = 0usize;
    for model_path in &args.models {
        let model = load_model(model_path)
            .map_err(|e| input(anyhow!(e).context(format!("loading {}", model_path.display()))))?;
        let rtype = model.rtype.ok_or_else(|| {
            input(anyhow!(
                "{} carries no relation type; it cannot drive prediction",
                model_path.display()
            ))
        })?;
        let (pairs, dropped) = candidates_for(&corpus, rtype, max_cross);
        dropped_total += dropped;
        let preds = predict_pairs(&model, &corpus, &pairs, threshold)
            .map_err(|e| input(anyhow!(e)))?;
        if args.class_report {
            let decisions = decisions_from_predictions(&pairs, &preds);
            let report = class_report(&pairs, &decisions).map_err(|e| internal(anyhow!(e)))?;
            let path = run_dir.join(format!("class-report-{rtype}.json"));
            fs::write(&path, render_class_report(&report, ReportFormat::Json))
                .with_context(|| format!("writing {}", path.display()))
                .map_err(internal)?;
            print!("{}", render_class_report(&report, ReportFormat::Table));
        }
        for p in preds {
            by_doc.entry(p.doc_id.clone()).or_default().push(p);
        }
    }
    for preds in by_doc.values_mut() {
        preds.sort_by(|a, b| (a.rtype, &a.attr, &a.drug).cmp(&(b.rtype, &b.attr, &b.drug)));
    }

    write_predictions(&run_dir, &corpus, &by_doc)?;
    let mut manifest = Manifest::new(
        "predict",
        None,
        serde_json::json!({
            "threshold": threshold,
            "max_cross_sentences": max_cross,
            "models": args.models,
            "dropped_gold_pairs": dropped_total,
        }),
    );
    manifest.record_input(&corpus_dir).map_err(internal)?;
    for m in &args.models {
        manifest.record_input(m).map_err(internal)?;
    }
    manifest.finalize(&run_dir).map_err(internal)?;

    let total: usize = by_doc.values().map(Vec::len).sum();
    println!(
        "predicted {total} relations into {} ({dropped_total} gold pairs beyond the sentence cap)",
        run_dir.display()
    );
    Ok(())
}

pub fn score(args: ScoreArgs, cfg: &FileConfig) -> CliResult {
    let gold_dir = required("gold", args.gold, cfg.gold.as_ref())?;
    let pred_dir = required("pred", args.pred, cfg.pred.as_ref())?;
    let format: ReportFormat = args
        .format
        .parse()
        .map_err(|e: String| input(anyhow!(e)))?;
    let strict = args.strict || cfg.strict.unwrap_or(false);

    let corpus = load(&gold_dir, strict)?;
    let pred_keys = read_predictions(&pred_dir, &corpus)?;
    let report = score_relations(&gold_keys(&corpus), &pred_keys);
    print!("{}", render_report(&report, format));

    if let Some(out) = args.out {
        let run_dir = create_run_dir(&out, args.run_name.as_deref()).map_err(input)?;
        let path = run_dir.join("report.json");
        fs::write(&path, render_report(&report, ReportFormat::Json))
            .with_context(|| format!("writing {}", path.display()))
            .map_err(internal)?;
        let mut manifest = Manifest::new("score", None, serde_json::json!({}));
        manifest.record_input(&gold_dir).map_err(internal)?;
        manifest.record_input(&pred_dir).map_err(internal)?;
        manifest.finalize(&run_dir).map_err(internal)?;
        println!("report written to {}", path.display());
    }
    Ok(())
}

fn read_predictions(pred_dir: &Path, gold: &Corpus) -> Result<Vec<RelationKey>, Failure> {
    let mut keys = Vec::new();
    let entries = fs::read_dir(pred_dir)
        .with_context(|| format!("reading {}", pred_dir.display()))
        .map_err(input)?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().and_then(|e| e.to_str()) == Some("ann"))
        .collect();
    paths.sort();
    for path in paths {
        let doc_id = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or_default()
            .to_string();
        let doc: &Document = gold.get(&doc_id).ok_or_else(|| {
            input(anyhow!(
                "prediction file {} has no matching gold document",
                path.display()
            ))
        })?;
        let text = fs::read_to_string(&path)
            .with_context(|| format!("reading {}", path.display()))
            .map_err(input)?;
        let (relations, warnings) = parse_pred_ann(&text, doc)
            .map_err(|e| input(anyhow!(e).context(format!("parsing {}", path.display()))))?;
        for w in warnings {
            eprintln!("warning: {}: {w}", path.display());
        }
        keys.extend(
            relations
                .iter()
                .map(|r| RelationKey::new(doc_id.clone(), r.attr.clone(), r.drug.clone(), r.rtype)),
        );
    }
    Ok(keys)
}

pub fn report(args: ReportArgs) -> CliResult {
    let format: ReportFormat = args
        .format
        .parse()
        .map_err(|e: String| input(anyhow!(e)))?;
    let text = fs::read_to_string(&args.input)
        .with_context(|| format!("reading {}", args.input.display()))
        .map_err(input)?;
    let parsed: ScoreReport = serde_json::from_str(&text)
        .with_context(|| format!("parsing {}", args.input.display()))
        .map_err(input)?;
    print!("{}", render_report(&parsed, format));
    Ok(())
}
