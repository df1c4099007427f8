//! End-to-end tests of the `medrel` binary: exit codes, artifact layout,
//! and pipeline determinism.

use std::path::Path;
use std::process::{Command, Output};

fn medrel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_medrel"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn synth_corpus(dir: &Path, extra: &[&str]) {
    let dir_s = dir.display().to_string();
    let mut args = vec![
        "synth",
        "--out",
        &dir_s,
        "--docs",
        "6",
        "--seed",
        "11",
        "--p-drug-first",
        "1.0",
    ];
    args.extend_from_slice(extra);
    let out = medrel(&args);
    assert!(out.status.success(), "synth failed: {}", stderr(&out));
}

#[test]
fn synth_extract_score_pipeline_is_perfect() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = tmp.path().join("corpus");
    synth_corpus(&corpus, &[]);

    let runs = tmp.path().join("runs");
    let out = medrel(&[
        "extract-rules",
        "--corpus",
        corpus.to_str().unwrap(),
        "--out",
        runs.to_str().unwrap(),
        "--run-name",
        "rules",
        "--mechanism",
        "left-only",
        "--mode",
        "unbounded",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let pred_dir = runs.join("rules").join("predictions");
    assert!(pred_dir.is_dir());
    assert!(runs.join("rules").join("manifest.json").is_file());

    let out = medrel(&[
        "score",
        "--gold",
        corpus.to_str().unwrap(),
        "--pred",
        pred_dir.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["micro"]["f"], 1.0);
    assert_eq!(report["micro"]["p"], 1.0);
    assert_eq!(report["micro"]["r"], 1.0);

    // Table format carries the aggregate rows.
    let out = medrel(&[
        "score",
        "--gold",
        corpus.to_str().unwrap(),
        "--pred",
        pred_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let table = stdout(&out);
    assert!(table.contains("System (Micro)"));
    assert!(table.contains("System (Macro)"));
    assert!(table.contains("1.00"));
}

#[test]
fn score_with_unknown_doc_id_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = tmp.path().join("corpus");
    synth_corpus(&corpus, &[]);
    let pred = tmp.path().join("pred");
    std::fs::create_dir_all(&pred).unwrap();
    std::fs::write(pred.join("no-such-doc.ann"), "").unwrap();

    let out = medrel(&[
        "score",
        "--gold",
        corpus.to_str().unwrap(),
        "--pred",
        pred.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
}

#[test]
fn validate_reports_counts_and_catches_orphans() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = tmp.path().join("corpus");
    synth_corpus(&corpus, &[]);
    let out = medrel(&["validate", corpus.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("Strength-Drug"));
    assert!(text.contains("#Instances"));

    std::fs::write(corpus.join("orphan.ann"), "T1\tDrug 0 4\ttest\n").unwrap();
    let out = medrel(&["validate", corpus.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn extract_rules_output_is_independent_of_jobs() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = tmp.path().join("corpus");
    synth_corpus(&corpus, &["--p-multi-drug", "0.5", "--p-cross-sentence", "0.4"]);
    let runs = tmp.path().join("runs");
    for (name, jobs) in [("serial", "1"), ("parallel", "4")] {
        let out = medrel(&[
            "extract-rules",
            "--corpus",
            corpus.to_str().unwrap(),
            "--out",
            runs.to_str().unwrap(),
            "--run-name",
            name,
            "--jobs",
            jobs,
        ]);
        assert!(out.status.success(), "{}", stderr(&out));
    }
    let read_all = |name: &str| {
        let dir = runs.join(name).join("predictions");
        let mut files: Vec<_> = std::fs::read_dir(&dir)
            .unwrap()
            .map(|e| e.unwrap().path())
            .collect();
        files.sort();
        files
            .into_iter()
            .map(|p| (p.file_name().unwrap().to_owned(), std::fs::read(&p).unwrap()))
            .collect::<Vec<_>>()
    };
    assert_eq!(read_all("serial"), read_all("parallel"));
}

fn train_tiny(corpus: &Path, emb: &Path, runs: &Path, name: &str) -> Output {
    medrel(&[
        "train",
        "--corpus",
        corpus.to_str().unwrap(),
        "--embeddings",
        emb.to_str().unwrap(),
        "--out",
        runs.to_str().unwrap(),
        "--run-name",
        name,
        "--rtype",
        "all",
        "--model",
        "segment",
        "--kernel-widths",
        "2,3",
        "--filters",
        "2",
        "--segment-lens",
        "6,4,6,4,6",
        "--window-len",
        "12",
        "--epochs",
        "2",
        "--batch-size",
        "32",
        "--seed",
        "7",
    ])
}

#[test]
fn train_predict_score_round_trip_with_deterministic_checkpoints() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = tmp.path().join("corpus");
    let emb = tmp.path().join("vectors.txt");
    synth_corpus(
        &corpus,
        &[
            "--emit-embeddings",
            emb.to_str().unwrap(),
            "--embedding-dim",
            "8",
        ],
    );
    let runs = tmp.path().join("runs");

    let out = train_tiny(&corpus, &emb, &runs, "t1");
    assert!(out.status.success(), "{}", stderr(&out));
    let out = train_tiny(&corpus, &emb, &runs, "t2");
    assert!(out.status.success(), "{}", stderr(&out));

    // Same seed, same inputs: byte-identical checkpoints.
    let mut compared = 0;
    for entry in std::fs::read_dir(runs.join("t1")).unwrap() {
        let path = entry.unwrap().path();
        let name = path.file_name().unwrap().to_str().unwrap().to_string();
        if name.starts_with("model-") {
            let twin = runs.join("t2").join(&name);
            assert!(twin.is_file(), "missing twin checkpoint {name}");
            assert_eq!(
                std::fs::read(&path).unwrap(),
                std::fs::read(&twin).unwrap(),
                "{name} differs between identical runs"
            );
            compared += 1;
        }
    }
    assert!(compared > 0, "no checkpoints written");

    // Predict with every trained model, then score the output.
    let mut predict_args: Vec<String> = vec![
        "predict".into(),
        "--corpus".into(),
        corpus.display().to_string(),
        "--out".into(),
        runs.display().to_string(),
        "--run-name".into(),
        "preds".into(),
        "--class-report".into(),
    ];
    for entry in std::fs::read_dir(runs.join("t1")).unwrap() {
        let path = entry.unwrap().path();
        if path
            .file_name()
            .unwrap()
            .to_str()
            .unwrap()
            .starts_with("model-")
        {
            predict_args.push("--model".into());
            predict_args.push(path.display().to_string());
        }
    }
    let arg_refs: Vec<&str> = predict_args.iter().map(String::as_str).collect();
    let out = medrel(&arg_refs);
    assert!(out.status.success(), "{}", stderr(&out));
    let pred_dir = runs.join("preds").join("predictions");
    assert!(pred_dir.is_dir());
    assert!(stdout(&out).contains("positive"), "class report printed");

    let out = medrel(&[
        "score",
        "--gold",
        corpus.to_str().unwrap(),
        "--pred",
        pred_dir.to_str().unwrap(),
        "--format",
        "tsv",
        "--out",
        runs.to_str().unwrap(),
        "--run-name",
        "scored",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).starts_with("type\tP\tR\tF\tsupport"));
    let report_path = runs.join("scored").join("report.json");
    assert!(report_path.is_file());

    let out = medrel(&[
        "report",
        "--input",
        report_path.to_str().unwrap(),
        "--format",
        "table",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("System (Micro)"));
}

#[test]
fn gen_candidates_writes_tsv_with_header() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = tmp.path().join("corpus");
    synth_corpus(&corpus, &[]);
    let runs = tmp.path().join("runs");
    let out = medrel(&[
        "gen-candidates",
        "--corpus",
        corpus.to_str().unwrap(),
        "--out",
        runs.to_str().unwrap(),
        "--run-name",
        "cands",
        "--rtype",
        "Strength-Drug",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let tsv = std::fs::read_to_string(runs.join("cands").join("candidates.tsv")).unwrap();
    let mut lines = tsv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "doc_id\tattr_id\tdrug_id\trtype\tlabel"
    );
    for line in lines {
        assert!(line.contains("Strength-Drug"));
        assert!(line.ends_with("positive") || line.ends_with("negative"));
    }
}

#[test]
fn missing_required_input_exits_2() {
    let out = medrel(&["extract-rules", "--out", "/tmp/nowhere-out"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--corpus"));
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = tmp.path().join("corpus");
    synth_corpus(&corpus, &[]);
    let config_path = tmp.path().join("config.json");
    std::fs::write(
        &config_path,
        serde_json::json!({
            "corpus": corpus.to_str().unwrap(),
            "mechanism": "right-only",
        })
        .to_string(),
    )
    .unwrap();

    // Corpus comes from the config; mechanism is overridden by the flag.
    let runs = tmp.path().join("runs");
    let out = medrel(&[
        "extract-rules",
        "--config",
        config_path.to_str().unwrap(),
        "--out",
        runs.to_str().unwrap(),
        "--run-name",
        "via-config",
        "--mechanism",
        "left-only",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let manifest: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(runs.join("via-config").join("manifest.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(manifest["config"]["mechanism"], "left-only");
    assert_eq!(manifest["command"], "extract-rules");
    assert!(manifest["inputs"].as_object().unwrap().len() == 1);
    assert!(!manifest["outputs"].as_object().unwrap().is_empty());
}
