//! Integration over the bundled data files: manifest loading, format round
//! trips, and resource files feeding a full scoring run.

use std::path::{Path, PathBuf};

use semsim_core::corpus::{load_pairs, load_study, save_pairs, PairFormat};
use semsim_core::embeddings::{load_contextual, load_table};
use semsim_core::metrics::{compute_all, default_registry, MetricResources, ScoreOptions};
use semsim_core::textproc::{porter_stem, NounLexicon, SynonymMap};

fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

#[test]
fn bundled_study_loads_cleanly() {
    let (study, warnings) = load_study(&data_dir().join("mini/study.json")).unwrap();
    assert!(warnings.is_empty(), "unexpected warnings: {warnings:?}");
    assert_eq!(study.datasets().len(), 4);
    assert_eq!(study.dataset("para").unwrap().len(), 4);
    assert_eq!(
        study.dataset("rand-para").unwrap().source_dataset_id(),
        Some("para")
    );
    study.validate_for_analysis().unwrap();
}

#[test]
fn bundled_pairs_round_trip() {
    let (study, _) = load_study(&data_dir().join("mini/study.json")).unwrap();
    let dir = tempfile::tempdir().unwrap();
    for dataset in study.datasets() {
        let path = dir.path().join(format!("{}.jsonl", dataset.dataset_id()));
        save_pairs(dataset.pairs(), &path).unwrap();
        let reloaded = load_pairs(&path, &PairFormat::JsonLines).unwrap();
        assert_eq!(reloaded.pairs, dataset.pairs());
    }
}

#[test]
fn porter_idempotent_over_bundled_lexicon() {
    let lexicon = NounLexicon::load(&data_dir().join("lexicon/nouns.txt")).unwrap();
    assert!(lexicon.len() >= 80);
    for word in lexicon.iter() {
        let once = porter_stem(word);
        let twice = porter_stem(&once);
        assert_eq!(once, twice, "stem of {word:?} is not stable");
    }
}

#[test]
fn bundled_resources_support_full_grid() {
    let data = data_dir();
    let (study, _) = load_study(&data.join("mini/study.json")).unwrap();
    let w2v = load_table(&data.join("embeddings/toy_w2v.txt"), "w2v").unwrap();
    let fasttext = load_table(&data.join("embeddings/toy_fasttext.txt"), "fasttext").unwrap();
    assert!(w2v.warnings.is_empty());
    assert_eq!(w2v.table.dim(), 3);
    let contextual = load_contextual(&data.join("contextual/mini_context.jsonl")).unwrap();
    assert_eq!(contextual.len(), 16);
    let lexicon = NounLexicon::load(&data.join("lexicon/nouns.txt")).unwrap();
    let synonyms = SynonymMap::load(&data.join("synonyms/synonyms.jsonl")).unwrap();
    assert!(!synonyms.is_empty());

    let mut res = MetricResources::default();
    res.tables.insert("w2v".into(), &w2v.table);
    res.tables.insert("fasttext".into(), &fasttext.table);
    res.contextual = Some(&contextual);
    res.lexicon = Some(&lexicon);
    res.synonyms = Some(&synonyms);

    let registry = default_registry();
    let grid = compute_all(&study, &registry, &res, ScoreOptions::default()).unwrap();
    assert_eq!(grid.cells.len(), 13 * 4);

    // Every lexical metric scores every pair of the mini corpus.
    for metric in [
        "word_overlap",
        "chrf",
        "bleu",
        "rouge_1",
        "rouge_l",
        "meteor",
    ] {
        for dataset in study.datasets() {
            let scores = grid.scores(metric, dataset.dataset_id()).unwrap();
            assert!(
                scores.iter().all(|s| s.value.is_some()),
                "{metric} missing values on {}",
                dataset.dataset_id()
            );
        }
    }
    // The noun distance is missing exactly where a side has no noun.
    let pos_style = grid.scores("pos_distance", "style").unwrap();
    let missing: Vec<&str> = pos_style
        .iter()
        .filter(|s| s.value.is_none())
        .map(|s| s.pair_id.as_str())
        .collect();
    assert_eq!(missing, ["s2"]);
    // Contextual metrics cover all pairs via the bundled vector file.
    for metric in ["elmo_l2", "bert_score"] {
        for dataset in study.datasets() {
            let scores = grid.scores(metric, dataset.dataset_id()).unwrap();
            assert!(scores.iter().all(|s| s.value.is_some()));
        }
    }
}

#[test]
fn tsv_and_jsonl_agree_on_content() {
    let dir = tempfile::tempdir().unwrap();
    let jsonl = dir.path().join("pairs.jsonl");
    let tsv = dir.path().join("pairs.tsv");
    std::fs::write(
        &jsonl,
        "{\"id\":\"p1\",\"a\":\"left side\",\"b\":\"right side\",\"scores\":[2,4]}\n",
    )
    .unwrap();
    std::fs::write(&tsv, "p1\tleft side\tright side\t2;4\n").unwrap();
    let from_jsonl = load_pairs(&jsonl, &PairFormat::JsonLines).unwrap();
    let from_tsv = load_pairs(
        &tsv,
        &PairFormat::Tsv {
            id_col: 0,
            a_col: 1,
            b_col: 2,
            scores_col: Some(3),
        },
    )
    .unwrap();
    assert_eq!(from_jsonl.pairs, from_tsv.pairs);
}
