//! End-to-end tests of the `semsim` binary over the bundled mini corpus.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use semsim_core::corpus::{load_pairs, load_study, sample_pairs, PairFormat};

fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

fn semsim(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_semsim"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, metrics: &str) -> PathBuf {
    let data = data_dir().canonicalize().unwrap();
    let config = format!(
        r#"{{
  "manifest": "{}/mini/study.json",
  "metrics": [{metrics}],
  "embeddings": {{"w2v": "{0}/embeddings/toy_w2v.txt", "fasttext": "{0}/embeddings/toy_fasttext.txt"}},
  "contextual": "{0}/contextual/mini_context.jsonl",
  "lexicon": "{0}/lexicon/nouns.txt",
  "synonyms": "{0}/synonyms/synonyms.jsonl",
  "seed": 7,
  "out_dir": "out"
}}"#,
        data.display()
    );
    let path = dir.join("run.json");
    fs::write(&path, config).unwrap();
    path
}

#[test]
fn evaluate_produces_all_outputs_with_expected_values() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), r#""word_overlap", "chrf""#);
    let out = semsim(
        &["evaluate", "--config", config.to_str().unwrap()],
        dir.path(),
    );
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    for name in [
        "scores.csv",
        "summaries.csv",
        "metric_human.csv",
        "order_scores.csv",
        "order_matrix.csv",
        "report.json",
    ] {
        assert!(dir.path().join("out").join(name).exists(), "missing {name}");
    }

    // Hand-computed values for the bundled corpus: word overlap means are
    // 0.5 / (7/15) / (3/28) / 0 and the human order is
    // para > style > rand-style > rand-para.
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("out/report.json")).unwrap())
            .unwrap();
    assert_eq!(
        report["human_order"],
        serde_json::json!(["para", "style", "rand-style", "rand-para"])
    );
    let overlap = &report["metrics"][0];
    assert_eq!(overlap["metric"], "word_overlap");
    assert_eq!(
        overlap["induced_order"],
        serde_json::json!(["para", "style", "rand-para", "rand-style"])
    );
    assert_eq!(overlap["inequality_violations"], serde_json::json!([]));
    let mean = overlap["dataset_means"]["para"].as_f64().unwrap();
    assert!((mean - 0.5).abs() < 1e-9);
    let v = overlap["variability"].as_f64().unwrap();
    assert!((v - 3.0 / 14.0).abs() < 1e-9);
    assert_eq!(overlap["swap_count"], 1);
    assert_eq!(overlap["rank_coincidence"], 2);
    let rho = overlap["order_corr_with_human"].as_f64().unwrap();
    assert!((rho - 0.8).abs() < 1e-9);

    let matrix = report["order_corr_matrix"].as_array().unwrap();
    assert_eq!(matrix[0][0], serde_json::json!(1.0));
    assert_eq!(matrix[1][1], serde_json::json!(1.0));
    assert_eq!(matrix[0][1], matrix[1][0]);

    // Every output carries the config hash of the run.
    assert!(report["config_hash"].is_string());
    let summaries = fs::read_to_string(dir.path().join("out/summaries.csv")).unwrap();
    assert!(summaries.starts_with("# config_hash="));
    assert!(summaries.contains("word_overlap,para,paraphrase,0.5,"));
}

#[test]
fn score_reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), r#""bleu", "wmd", "meteor""#);
    let run = || {
        let out = semsim(&["score", "--config", config.to_str().unwrap()], dir.path());
        assert!(out.status.success());
        fs::read(dir.path().join("out/scores.csv")).unwrap()
    };
    let first = run();
    let second = run();
    assert_eq!(first, second);
    let text = String::from_utf8(first).unwrap();
    assert!(text.lines().next().unwrap().starts_with("# config_hash="));
    assert_eq!(
        text.lines().nth(1).unwrap(),
        "metric,dataset_id,pair_id,value"
    );
    // 3 metrics x 4 datasets x 4 pairs, plus hash comment and header.
    assert_eq!(text.lines().count(), 2 + 3 * 4 * 4);
}

#[test]
fn unknown_metric_exits_2_listing_known_names() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), r#""word_overlap""#);
    let out = semsim(
        &[
            "score",
            "--config",
            config.to_str().unwrap(),
            "--metrics",
            "bleus",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("bleus"), "stderr: {stderr}");
    assert!(stderr.contains("word_overlap") && stderr.contains("wmd"));
}

#[test]
fn empty_metric_selection_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let data = data_dir().canonicalize().unwrap();
    let config = dir.path().join("run.json");
    fs::write(
        &config,
        format!(
            r#"{{"manifest": "{}/mini/study.json", "metrics": []}}"#,
            data.display()
        ),
    )
    .unwrap();
    let out = semsim(&["score", "--config", config.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_resource_for_contextual_metric_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let data = data_dir().canonicalize().unwrap();
    let config = dir.path().join("run.json");
    fs::write(
        &config,
        format!(
            r#"{{"manifest": "{}/mini/study.json", "metrics": ["elmo_l2"]}}"#,
            data.display()
        ),
    )
    .unwrap();
    let out = semsim(&["score", "--config", config.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("elmo_l2"), "stderr: {stderr}");
}

#[test]
fn missing_file_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = semsim(
        &[
            "score",
            "--manifest",
            "no-such-study.json",
            "--metrics",
            "bleu",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn random_pairs_reproducible_and_equal_to_library() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), r#""word_overlap""#);
    let args = [
        "random-pairs",
        "--config",
        config.to_str().unwrap(),
        "--dataset",
        "para",
        "--n",
        "5",
        "--seed",
        "11",
    ];
    let out = semsim(&args, dir.path());
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let snippet: serde_json::Value =
        serde_json::from_str(&String::from_utf8_lossy(&out.stdout)).unwrap();
    assert_eq!(snippet["dataset_id"], "para-random");
    assert_eq!(snippet["kind"], "random");
    assert_eq!(snippet["source_dataset_id"], "para");

    let produced = dir.path().join("out/para-random.jsonl");
    let first = fs::read(&produced).unwrap();
    let rerun = semsim(&args, dir.path());
    assert!(rerun.status.success());
    assert_eq!(first, fs::read(&produced).unwrap());

    // The file equals the library-level construction.
    let (study, _) = load_study(&data_dir().join("mini/study.json")).unwrap();
    let expected =
        semsim_core::corpus::generate_random_pairs(study.dataset("para").unwrap(), 5, 11).unwrap();
    let loaded = load_pairs(&produced, &PairFormat::JsonLines).unwrap();
    assert_eq!(loaded.pairs, expected.pairs());
}

#[test]
fn random_pairs_over_capacity_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), r#""word_overlap""#);
    let out = semsim(
        &[
            "random-pairs",
            "--config",
            config.to_str().unwrap(),
            "--dataset",
            "para",
            "--n",
            "100",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("at most"), "stderr: {stderr}");
}

#[test]
fn evaluate_without_human_scores_warns_and_nulls_human_fields() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("a.jsonl"),
        "{\"id\":\"p1\",\"a\":\"one two\",\"b\":\"one three\"}\n{\"id\":\"p2\",\"a\":\"x y\",\"b\":\"x z\"}\n",
    )
    .unwrap();
    fs::write(
        dir.path().join("r.jsonl"),
        "{\"id\":\"q1\",\"a\":\"one two\",\"b\":\"x z\"}\n{\"id\":\"q2\",\"a\":\"x y\",\"b\":\"one three\"}\n",
    )
    .unwrap();
    fs::write(
        dir.path().join("study.json"),
        r#"{"datasets":[
            {"dataset_id":"a","kind":"paraphrase","path":"a.jsonl"},
            {"dataset_id":"r","kind":"random","path":"r.jsonl","source_dataset_id":"a"}
        ]}"#,
    )
    .unwrap();
    let out = semsim(
        &[
            "evaluate",
            "--manifest",
            "study.json",
            "--metrics",
            "word_overlap",
        ],
        dir.path(),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("human"), "stderr: {stderr}");
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("out/report.json")).unwrap())
            .unwrap();
    assert!(report["human_order"].is_null());
    assert!(report["metrics"][0]["pearson_with_human"].is_null());
    assert!(report["metrics"][0]["swap_count"].is_null());
    // The floor check does not need human labels.
    assert_eq!(
        report["metrics"][0]["inequality_violations"],
        serde_json::json!([])
    );
}

#[test]
fn evaluate_without_random_datasets_still_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("a.jsonl"),
        "{\"id\":\"p1\",\"a\":\"one two\",\"b\":\"one three\",\"scores\":[4]}\n{\"id\":\"p2\",\"a\":\"x y\",\"b\":\"x z\",\"scores\":[2]}\n",
    )
    .unwrap();
    fs::write(
        dir.path().join("b.jsonl"),
        "{\"id\":\"q1\",\"a\":\"deep blue sea\",\"b\":\"dark blue water\",\"scores\":[3]}\n",
    )
    .unwrap();
    fs::write(
        dir.path().join("study.json"),
        r#"{"datasets":[
            {"dataset_id":"a","kind":"paraphrase","path":"a.jsonl"},
            {"dataset_id":"b","kind":"style_transfer","path":"b.jsonl"}
        ]}"#,
    )
    .unwrap();
    let out = semsim(
        &[
            "evaluate",
            "--manifest",
            "study.json",
            "--metrics",
            "word_overlap,rouge_l",
        ],
        dir.path(),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("floor check unavailable") || stderr.contains("random"));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("out/report.json")).unwrap())
            .unwrap();
    assert!(report["metrics"][0]["inequality_violations"].is_null());
    assert!(report["metrics"][0]["variability"].is_null());
    // Order machinery against humans still works without random datasets.
    assert!(report["metrics"][0]["order_corr_with_human"].is_number());
    assert!(dir.path().join("out/order_matrix.csv").exists());
}

#[test]
fn sample_matches_library_selection() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), r#""word_overlap""#);
    let out = semsim(
        &[
            "sample",
            "--config",
            config.to_str().unwrap(),
            "--dataset",
            "style",
            "--n",
            "2",
            "--seed",
            "17",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let produced = dir.path().join("out/style-sample.jsonl");
    let loaded = load_pairs(&produced, &PairFormat::JsonLines).unwrap();
    let (study, _) = load_study(&data_dir().join("mini/study.json")).unwrap();
    let expected = sample_pairs(study.dataset("style").unwrap(), 2, 17).unwrap();
    assert_eq!(loaded.pairs, expected.pairs());

    let too_many = semsim(
        &[
            "sample",
            "--config",
            config.to_str().unwrap(),
            "--dataset",
            "style",
            "--n",
            "9",
        ],
        dir.path(),
    );
    assert_eq!(too_many.status.code(), Some(2));
}
