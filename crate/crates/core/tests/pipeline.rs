mod common;

use std::fs;
use std::path::Path;

use fsrk_core::experiment::{run_experiment, ExperimentConfig, ExperimentError, Stage};
use fsrk_core::Algorithm;
use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn write_inputs(dir: &Path, data: &Array2<f64>, classes: &[&str]) {
    let mut text = String::from("gene_id");
    for j in 0..data.ncols() {
        text.push_str(&format!("\tS{j}"));
    }
    text.push('\n');
    for (i, row) in data.rows().into_iter().enumerate() {
        text.push_str(&format!("G{i}"));
        for v in row {
            text.push_str(&format!("\t{v}"));
        }
        text.push('\n');
    }
    fs::write(dir.join("matrix.tsv"), text).unwrap();
    let labels: String = classes
        .iter()
        .enumerate()
        .map(|(j, c)| format!("S{j}\t{c}\n"))
        .collect();
    fs::write(dir.join("labels.tsv"), labels).unwrap();
}

fn config(dir: &Path, extra: &[(&str, &str)]) -> ExperimentConfig {
    let mut pairs = vec![
        (
            "matrix".to_string(),
            dir.join("matrix.tsv").display().to_string(),
        ),
        (
            "labels".to_string(),
            dir.join("labels.tsv").display().to_string(),
        ),
        ("out".to_string(), dir.join("out").display().to_string()),
    ];
    pairs.extend(extra.iter().map(|(k, v)| (k.to_string(), v.to_string())));
    ExperimentConfig::from_pairs(pairs).unwrap()
}

fn small_inputs(dir: &Path) {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let data = common::random_matrix(&mut rng, 30, 6, 0.0, 10.0);
    write_inputs(dir, &data, &["a", "b", "a", "b", "a", "b"]);
}

#[test]
fn stages_run_in_order_and_skip_fuzzify_without_fsrk() {
    let dir = tempfile::tempdir().unwrap();
    small_inputs(dir.path());

    let all = run_experiment(&config(dir.path(), &[])).unwrap();
    use Stage::*;
    assert_eq!(
        all.stages,
        vec![Ingest, Filter, Fuzzify, Cluster, Validate, Write]
    );

    let crisp = run_experiment(&config(dir.path(), &[("algorithm", "kmeans,rough")])).unwrap();
    assert_eq!(crisp.stages, vec![Ingest, Filter, Cluster, Validate, Write]);
    assert_eq!(crisp.reports.len(), 2);
}

#[test]
fn outputs_are_written_with_expected_headers() {
    let dir = tempfile::tempdir().unwrap();
    small_inputs(dir.path());
    let cfg = config(
        dir.path(),
        &[
            ("export_fuzzified", "true"),
            ("top_genes", "20"),
            ("k", "3"),
        ],
    );
    let outcome = run_experiment(&cfg).unwrap();
    let out = dir.path().join("out");
    for name in [
        "report.csv",
        "report.json",
        "ranking.csv",
        "assignments-kmeans.csv",
        "assignments-rough.csv",
        "assignments-fsrk.csv",
        "fuzzified.tsv",
    ] {
        assert!(out.join(name).is_file(), "{name} missing");
        assert!(outcome.written.contains(&out.join(name)));
    }
    let report = fs::read_to_string(out.join("report.csv")).unwrap();
    assert!(report.starts_with("dataset,algorithm,db,xb,sse,iterations,converged,best,"));
    assert_eq!(report.lines().count(), 4);
    let best_flags: Vec<&str> = report
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(7).unwrap())
        .collect();
    assert_eq!(best_flags, vec!["true", "false", "false"]);

    let ranking = fs::read_to_string(out.join("ranking.csv")).unwrap();
    assert!(ranking.starts_with("gene_id,ig_bits,rank\n"));
    assert_eq!(ranking.lines().count(), 31);

    let assignments = fs::read_to_string(out.join("assignments-kmeans.csv")).unwrap();
    assert!(assignments.starts_with("gene_id,cluster,membership_kind\n"));
    assert_eq!(assignments.lines().count(), 21);

    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(json.as_array().unwrap().len(), 3);
    assert_eq!(json[0]["dataset"], "matrix");

    let fuzzified = fs::read_to_string(out.join("fuzzified.tsv")).unwrap();
    assert_eq!(fuzzified.lines().count(), 21);
    assert!(!out.read_dir().unwrap().any(|e| e
        .unwrap()
        .file_name()
        .to_string_lossy()
        .ends_with(".tmp")));
}

#[test]
fn missing_labels_file_fails_before_writing_anything() {
    let dir = tempfile::tempdir().unwrap();
    small_inputs(dir.path());
    fs::remove_file(dir.path().join("labels.tsv")).unwrap();
    let err = run_experiment(&config(dir.path(), &[])).unwrap_err();
    assert!(matches!(err, ExperimentError::Config(_)), "{err}");
    assert!(err.to_string().contains("labels.tsv"));
    assert!(!dir.path().join("out").exists());
}

#[test]
fn oversized_top_genes_is_a_filter_error() {
    let dir = tempfile::tempdir().unwrap();
    small_inputs(dir.path());
    let err = run_experiment(&config(dir.path(), &[("top_genes", "31")])).unwrap_err();
    assert_eq!(err.stage(), Some(Stage::Filter), "{err}");
    assert!(err.to_string().starts_with("[filter]"));
    assert!(!dir.path().join("out").exists());
}

#[test]
fn unknown_sample_in_labels_is_an_ingest_error() {
    let dir = tempfile::tempdir().unwrap();
    small_inputs(dir.path());
    fs::write(
        dir.path().join("labels.tsv"),
        "S0\ta\nS1\tb\nS2\ta\nS3\tb\nS4\ta\nS9\tb\n",
    )
    .unwrap();
    let err = run_experiment(&config(dir.path(), &[])).unwrap_err();
    assert_eq!(err.stage(), Some(Stage::Ingest), "{err}");
}

#[test]
fn leukemia_shaped_run_reports_all_three_methods() {
    // 47 vs 25 samples, a block of informative genes among noise
    let mut rng = ChaCha8Rng::seed_from_u64(72);
    let (n, m) = (400, 72);
    let mut data = common::random_matrix(&mut rng, n, m, 0.0, 1000.0);
    let classes: Vec<&str> = (0..m).map(|j| if j < 47 { "ALL" } else { "AML" }).collect();
    for i in 0..40 {
        for j in 47..m {
            data[[i, j]] += 3000.0;
        }
    }
    let dir = tempfile::tempdir().unwrap();
    write_inputs(dir.path(), &data, &classes);
    let cfg = config(
        dir.path(),
        &[
            ("dataset", "leukemia"),
            ("top_genes", "100"),
            ("k", "4"),
            ("restarts", "3"),
            ("seed", "7"),
        ],
    );
    let outcome = run_experiment(&cfg).unwrap();
    assert_eq!(outcome.reports.len(), 3);
    assert_eq!(outcome.gene_ids.len(), 100);
    let rows = outcome.comparison.rows();
    assert!(rows.windows(2).all(|w| w[0].report.db <= w[1].report.db));
    assert!(rows[0].best && rows.iter().filter(|r| r.best).count() == 1);
    let mut algs: Vec<Algorithm> = rows.iter().map(|r| r.report.algorithm).collect();
    algs.sort();
    assert_eq!(algs, Algorithm::ALL.to_vec());
    // informative genes rank first
    let top: Vec<usize> = outcome.ranking.order()[..40].to_vec();
    assert!(top.iter().all(|&i| i < 40), "{top:?}");
    for r in rows {
        assert!(r.report.db.is_finite() && r.report.db > 0.0);
        assert!(r.report.xb.is_finite() && r.report.xb > 0.0);
    }
}
