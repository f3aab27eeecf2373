//! End-to-end pipeline: ingest → filter → fuzzify (only for FSRK) → cluster →
//! validate, with restarts and a per-dataset comparison of the algorithms.
//!
//! Configuration is a flat `key = value` file whose keys mirror the CLI
//! flags. Later values override earlier ones, so flags appended after the
//! file contents win. A key prefixed with an algorithm name
//! (`fsrk.epsilon = 0.9`) applies to that algorithm only and takes precedence
//! over the plain key.

use std::collections::BTreeMap;
use std::fmt;
use std::fs::{self, File};
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use log::{info, warn};
use ndarray::{Array2, ArrayView2};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::clustering::{
    fsrk_kmeans, kmeans, rough_kmeans, Algorithm, GeneMembership, RoughParams, RoughSets,
};
use crate::fuzzysoft::{fuzzify, MembershipKind};
use crate::genefilter::{rank_and_select, DiscretizationSpec, GeneRanking};
use crate::ingest::{parse_labels, parse_matrix, write_matrix, ParseOptions};
use crate::validity::{crispify, score, Proximity, ValidityReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Ingest,
    Filter,
    Fuzzify,
    Cluster,
    Validate,
    Write,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Ingest => "ingest",
            Stage::Filter => "filter",
            Stage::Fuzzify => "fuzzify",
            Stage::Cluster => "cluster",
            Stage::Validate => "validate",
            Stage::Write => "write",
        })
    }
}

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("config: {0}")]
    Config(String),
    #[error("[{stage}] {source}")]
    Stage {
        stage: Stage,
        #[source]
        source: Box<dyn std::error::Error + Send + Sync>,
    },
}

impl ExperimentError {
    fn at(stage: Stage, source: impl Into<Box<dyn std::error::Error + Send + Sync>>) -> Self {
        ExperimentError::Stage {
            stage,
            source: source.into(),
        }
    }

    /// Pipeline stage that failed, `None` for configuration errors.
    pub fn stage(&self) -> Option<Stage> {
        match self {
            ExperimentError::Config(_) => None,
            ExperimentError::Stage { stage, .. } => Some(*stage),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub matrix: PathBuf,
    pub labels: PathBuf,
    /// Dataset tag in reports; defaults to the matrix file stem.
    pub dataset: String,
    /// Genes kept by the filter; `None` keeps all of them.
    pub top_genes: Option<usize>,
    /// Discretization bins; `None` uses Sturges' rule on the sample count.
    pub bins: Option<usize>,
    pub fuzzify: MembershipKind,
    pub algorithms: Vec<Algorithm>,
    pub params: BTreeMap<Algorithm, RoughParams>,
    pub restarts: usize,
    pub out_dir: PathBuf,
    /// Also write the fuzzified matrix when FSRK runs.
    pub export_fuzzified: bool,
    /// Whether the label file starts with a header line.
    pub labels_header: bool,
}

const PARAM_KEYS: [&str; 7] = [
    "k", "w_lower", "w_upper", "epsilon", "max_iter", "tol", "seed",
];

fn normalize_key(key: &str) -> String {
    key.trim().to_ascii_lowercase().replace('-', "_")
}

/// `key = value` pairs of a config file. `#` starts a comment.
pub fn parse_config_text(text: &str) -> Result<Vec<(String, String)>, ExperimentError> {
    let mut pairs = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or_default().trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            ExperimentError::Config(format!("line {}: expected key = value", n + 1))
        })?;
        pairs.push((normalize_key(key), value.trim().to_string()));
    }
    Ok(pairs)
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ExperimentError>
where
    T::Err: fmt::Display,
{
    value
        .parse()
        .map_err(|e| ExperimentError::Config(format!("{key} = {value:?}: {e}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool, ExperimentError> {
    match value.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(ExperimentError::Config(format!(
            "{key} = {value:?}: expected true or false"
        ))),
    }
}

fn apply_param(params: &mut RoughParams, key: &str, value: &str) -> Result<(), ExperimentError> {
    match key {
        "k" => params.k = parse_value(key, value)?,
        "w_lower" => params.w_lower = parse_value(key, value)?,
        "w_upper" => params.w_upper = parse_value(key, value)?,
        "epsilon" => params.epsilon = parse_value(key, value)?,
        "max_iter" => params.max_iter = parse_value(key, value)?,
        "tol" => params.tol = parse_value(key, value)?,
        "seed" => params.seed = parse_value(key, value)?,
        _ => unreachable!("caller checks PARAM_KEYS"),
    }
    Ok(())
}

impl ExperimentConfig {
    /// Builds a config from `key = value` pairs; later pairs win.
    pub fn from_pairs<I, K, V>(pairs: I) -> Result<Self, ExperimentError>
    where
        I: IntoIterator<Item = (K, V)>,
        K: AsRef<str>,
        V: AsRef<str>,
    {
        let mut plain: BTreeMap<String, String> = BTreeMap::new();
        let mut scoped: BTreeMap<(Algorithm, String), String> = BTreeMap::new();
        for (key, value) in pairs {
            let key = normalize_key(key.as_ref());
            let value = value.as_ref().trim().to_string();
            match key.split_once('.') {
                Some((alg, param)) => {
                    let alg: Algorithm = parse_value(&key, alg)?;
                    if !PARAM_KEYS.contains(&param) {
                        return Err(ExperimentError::Config(format!("unknown key {key:?}")));
                    }
                    scoped.insert((alg, param.to_string()), value);
                }
                None => {
                    plain.insert(key, value);
                }
            }
        }

        let take = |key: &str| plain.get(key).map(String::as_str);
        let required = |key: &str| {
            take(key)
                .ok_or_else(|| ExperimentError::Config(format!("missing required key {key:?}")))
        };

        let matrix = PathBuf::from(required("matrix")?);
        let labels = PathBuf::from(required("labels")?);
        let dataset = match take("dataset") {
            Some(d) => d.to_string(),
            None => matrix
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "dataset".into()),
        };
        let algorithms = match take("algorithm").or(take("algorithms")) {
            Some(list) => {
                let mut algs = Vec::new();
                for name in list.split(',').filter(|s| !s.trim().is_empty()) {
                    let alg: Algorithm = parse_value("algorithm", name)?;
                    if !algs.contains(&alg) {
                        algs.push(alg);
                    }
                }
                algs
            }
            None => Algorithm::ALL.to_vec(),
        };
        if algorithms.is_empty() {
            return Err(ExperimentError::Config("no algorithm selected".into()));
        }

        let mut params = BTreeMap::new();
        for &alg in &algorithms {
            let mut p = RoughParams::defaults(alg, 2);
            for key in PARAM_KEYS {
                if let Some(v) = scoped
                    .get(&(alg, key.to_string()))
                    .map(String::as_str)
                    .or(take(key))
                {
                    apply_param(&mut p, key, v)?;
                }
            }
            params.insert(alg, p);
        }

        let known = [
            "matrix",
            "labels",
            "dataset",
            "top_genes",
            "bins",
            "fuzzify",
            "algorithm",
            "algorithms",
            "restarts",
            "out",
            "export_fuzzified",
            "labels_header",
        ];
        if let Some(unknown) = plain
            .keys()
            .find(|k| !known.contains(&k.as_str()) && !PARAM_KEYS.contains(&k.as_str()))
        {
            return Err(ExperimentError::Config(format!("unknown key {unknown:?}")));
        }

        let config = ExperimentConfig {
            matrix,
            labels,
            dataset,
            top_genes: take("top_genes")
                .map(|v| parse_value("top_genes", v))
                .transpose()?,
            bins: take("bins").map(|v| parse_value("bins", v)).transpose()?,
            fuzzify: take("fuzzify")
                .map(|v| parse_value("fuzzify", v))
                .transpose()?
                .unwrap_or_default(),
            algorithms,
            params,
            restarts: take("restarts")
                .map(|v| parse_value("restarts", v))
                .transpose()?
                .unwrap_or(1),
            out_dir: PathBuf::from(take("out").unwrap_or("out")),
            export_fuzzified: take("export_fuzzified")
                .map(|v| parse_bool("export_fuzzified", v))
                .transpose()?
                .unwrap_or(false),
            labels_header: take("labels_header")
                .map(|v| parse_bool("labels_header", v))
                .transpose()?
                .unwrap_or(false),
        };
        Ok(config)
    }

    /// Checks the parts of the config that do not depend on the data.
    pub fn validate(&self) -> Result<(), ExperimentError> {
        for path in [&self.matrix, &self.labels] {
            if !path.is_file() {
                return Err(ExperimentError::Config(format!(
                    "input file {} does not exist",
                    path.display()
                )));
            }
        }
        if self.restarts == 0 {
            return Err(ExperimentError::Config(
                "restarts must be at least 1".into(),
            ));
        }
        if self.top_genes == Some(0) {
            return Err(ExperimentError::Config(
                "top_genes must be at least 1".into(),
            ));
        }
        if self.bins == Some(0) {
            return Err(ExperimentError::Config("bins must be at least 1".into()));
        }
        if self.algorithms.is_empty() {
            return Err(ExperimentError::Config("no algorithm selected".into()));
        }
        Ok(())
    }

    pub fn params_for(&self, algorithm: Algorithm) -> RoughParams {
        self.params
            .get(&algorithm)
            .copied()
            .unwrap_or_else(|| RoughParams::defaults(algorithm, 2))
    }
}

/// One finished clustering run, reduced to what the reports need.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub algorithm: Algorithm,
    pub restart: usize,
    pub params: RoughParams,
    pub memberships: Vec<GeneMembership>,
    /// Crisp cluster per gene (boundary genes resolved by proximity).
    pub assignment: Vec<usize>,
    pub centroids: Array2<f64>,
    pub iterations: usize,
    pub converged: bool,
}

fn cluster_once(
    algorithm: Algorithm,
    restart: usize,
    base: RoughParams,
    raw: ArrayView2<'_, f64>,
    fuzzy: Option<ArrayView2<'_, f64>>,
) -> Result<RunResult, ExperimentError> {
    let params = RoughParams {
        seed: base.seed.wrapping_add(restart as u64),
        ..base
    };
    let fail = |e| ExperimentError::at(Stage::Cluster, format!("{algorithm}: {e}"));
    let lift = |sets: RoughSets| sets.memberships().to_vec();
    let (memberships, assignment, centroids, iterations, converged) = match algorithm {
        Algorithm::KMeans => {
            let r = kmeans(raw, &params).map_err(fail)?;
            let members = r
                .assignment
                .iter()
                .map(|&h| GeneMembership::Lower(h))
                .collect();
            (
                members,
                r.assignment,
                r.centroids,
                r.iterations,
                r.converged,
            )
        }
        Algorithm::Rough | Algorithm::Fsrk => {
            let data = if algorithm == Algorithm::Fsrk {
                fuzzy.expect("fuzzified matrix is built when fsrk runs")
            } else {
                raw
            };
            let r = if algorithm == Algorithm::Fsrk {
                fsrk_kmeans(data, &params)
            } else {
                rough_kmeans(data, &params)
            }
            .map_err(fail)?;
            let crisp = crispify(&r, data, Proximity::for_algorithm(algorithm));
            (lift(r.sets), crisp, r.centroids, r.iterations, r.converged)
        }
    };
    Ok(RunResult {
        algorithm,
        restart,
        params,
        memberships,
        assignment,
        centroids,
        iterations,
        converged,
    })
}

/// Everything a finished experiment produced.
#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    /// Best run per algorithm, in the order the algorithms were requested.
    pub reports: Vec<ValidityReport>,
    pub comparison: Comparison,
    pub best_runs: Vec<RunResult>,
    /// Gene ids of the filtered matrix, aligned with run assignments.
    pub gene_ids: Vec<String>,
    pub ranking: GeneRanking,
    /// Stages in the order they ran.
    pub stages: Vec<Stage>,
    pub written: Vec<PathBuf>,
}

/// Runs the pipeline and writes report.csv, report.json, ranking.csv and one
/// assignments-<algorithm>.csv per algorithm into `config.out_dir`. Nothing
/// is written unless every stage succeeded.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome, ExperimentError> {
    config.validate()?;
    let mut stages = Vec::new();
    let mut enter = |stage: Stage| {
        info!("stage: {stage}");
        stages.push(stage);
    };

    enter(Stage::Ingest);
    let open = |path: &Path| {
        File::open(path)
            .map(BufReader::new)
            .map_err(|e| ExperimentError::at(Stage::Ingest, format!("{}: {e}", path.display())))
    };
    let matrix = parse_matrix(open(&config.matrix)?, ParseOptions::default()).map_err(|e| {
        ExperimentError::at(Stage::Ingest, format!("{}: {e}", config.matrix.display()))
    })?;
    let label_opts = ParseOptions {
        header: config.labels_header,
        ..ParseOptions::default()
    };
    let labels = parse_labels(open(&config.labels)?, &matrix, label_opts).map_err(|e| {
        ExperimentError::at(Stage::Ingest, format!("{}: {e}", config.labels.display()))
    })?;
    info!(
        "read {} genes x {} samples, classes {:?}",
        matrix.n_genes(),
        matrix.n_samples(),
        labels.classes()
    );

    enter(Stage::Filter);
    let spec = match config.bins {
        Some(b) => DiscretizationSpec::new(b).map_err(|e| ExperimentError::at(Stage::Filter, e))?,
        None => DiscretizationSpec::sturges(matrix.n_samples()),
    };
    let top_n = config.top_genes.unwrap_or(matrix.n_genes());
    let (ranking, filtered) = rank_and_select(&matrix, &labels, spec, top_n)
        .map_err(|e| ExperimentError::at(Stage::Filter, e))?;
    info!(
        "kept {} of {} genes ({} bins)",
        filtered.n_genes(),
        matrix.n_genes(),
        spec.bin_count()
    );

    let fuzzified = if config.algorithms.contains(&Algorithm::Fsrk) {
        enter(Stage::Fuzzify);
        Some(fuzzify(&filtered, config.fuzzify))
    } else {
        None
    };

    enter(Stage::Cluster);
    let n = filtered.n_genes();
    for &alg in &config.algorithms {
        config
            .params_for(alg)
            .validate(alg, n)
            .map_err(|e| ExperimentError::at(Stage::Cluster, format!("{alg}: {e}")))?;
    }
    let jobs: Vec<(Algorithm, usize)> = config
        .algorithms
        .iter()
        .flat_map(|&a| (0..config.restarts).map(move |r| (a, r)))
        .collect();
    let raw = filtered.values();
    let fuzzy = fuzzified.as_ref().map(|f| f.values());
    let runs = jobs
        .par_iter()
        .map(|&(alg, r)| cluster_once(alg, r, config.params_for(alg), raw, fuzzy))
        .collect::<Result<Vec<_>, _>>()?;

    enter(Stage::Validate);
    let scored: Vec<_> = runs
        .par_iter()
        .map(|run| {
            let data = if run.algorithm == Algorithm::Fsrk {
                fuzzy.expect("fuzzified")
            } else {
                raw
            };
            score(data, &run.assignment, run.centroids.view())
        })
        .collect();
    let mut reports = Vec::new();
    let mut best_runs = Vec::new();
    for &alg in &config.algorithms {
        let mut best: Option<(usize, crate::validity::Scores)> = None;
        let mut last_err = None;
        for (i, (run, s)) in runs
            .iter()
            .zip(&scored)
            .enumerate()
            .filter(|(_, (r, _))| r.algorithm == alg)
        {
            match s {
                Ok(s) => {
                    if best.as_ref().is_none_or(|(_, b)| s.db < b.db) {
                        best = Some((i, *s));
                    }
                }
                Err(e) => {
                    warn!("{alg} restart {} not scorable: {e}", run.restart);
                    last_err = Some(e.clone());
                }
            }
        }
        let (i, s) = best.ok_or_else(|| {
            let e = last_err.expect("at least one restart ran");
            ExperimentError::at(
                Stage::Validate,
                format!("{alg}: no restart produced a scorable clustering: {e}"),
            )
        })?;
        let run = &runs[i];
        reports.push(ValidityReport {
            dataset: config.dataset.clone(),
            algorithm: alg,
            db: s.db,
            xb: s.xb,
            sse: s.sse,
            iterations: run.iterations,
            converged: run.converged,
            restart: run.restart,
            params: run.params,
        });
        best_runs.push(run.clone());
    }
    let comparison = compare(&reports);

    enter(Stage::Write);
    let gene_ids = filtered.gene_ids().to_vec();
    let mut files: Vec<(String, Vec<u8>)> = Vec::new();
    files.push(("report.csv".into(), comparison.to_csv().into_bytes()));
    let json = serde_json::to_vec_pretty(comparison.rows())
        .map_err(|e| ExperimentError::at(Stage::Write, e))?;
    files.push(("report.json".into(), json));
    let mut ranking_csv = Vec::new();
    ranking
        .write_csv(matrix.gene_ids(), &mut ranking_csv)
        .map_err(|e| ExperimentError::at(Stage::Write, e))?;
    files.push(("ranking.csv".into(), ranking_csv));
    for run in &best_runs {
        files.push((
            format!("assignments-{}.csv", run.algorithm),
            assignments_csv(&gene_ids, &run.memberships).into_bytes(),
        ));
    }
    if let (true, Some(f)) = (config.export_fuzzified, &fuzzified) {
        let mut buf = Vec::new();
        write_matrix(&f.to_expression_matrix(), &mut buf, '\t')
            .map_err(|e| ExperimentError::at(Stage::Write, e))?;
        files.push(("fuzzified.tsv".into(), buf));
    }
    let written = write_all_atomic(&config.out_dir, &files)
        .map_err(|e| ExperimentError::at(Stage::Write, e))?;

    Ok(ExperimentOutcome {
        reports,
        comparison,
        best_runs,
        gene_ids,
        ranking,
        stages,
        written,
    })
}

/// `gene_id,cluster,membership_kind` with one row per (gene, upper cluster).
pub fn assignments_csv(gene_ids: &[String], memberships: &[GeneMembership]) -> String {
    let mut out = String::from("gene_id,cluster,membership_kind\n");
    for (gene, m) in gene_ids.iter().zip(memberships) {
        match m {
            GeneMembership::Lower(h) => out.push_str(&format!("{gene},{h},lower\n")),
            GeneMembership::Boundary(hs) => {
                for h in hs {
                    out.push_str(&format!("{gene},{h},boundary\n"));
                }
            }
        }
    }
    out
}

fn write_all_atomic(dir: &Path, files: &[(String, Vec<u8>)]) -> std::io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut staged = Vec::new();
    for (name, bytes) in files {
        let tmp = dir.join(format!(".{name}.tmp"));
        let mut f = File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        staged.push((tmp, dir.join(name)));
    }
    let mut written = Vec::new();
    for (tmp, dest) in staged {
        fs::rename(&tmp, &dest)?;
        written.push(dest);
    }
    Ok(written)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    #[serde(flatten)]
    pub report: ValidityReport,
    /// Lowest DB index within its dataset.
    pub best: bool,
}

/// Report rows sorted by dataset, then DB ascending (ties in canonical
/// algorithm order), with the DB-minimal row of every dataset flagged.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    rows: Vec<ComparisonRow>,
}

pub fn compare(reports: &[ValidityReport]) -> Comparison {
    let mut sorted = reports.to_vec();
    sorted.sort_by(|a, b| {
        a.dataset
            .cmp(&b.dataset)
            .then(a.db.total_cmp(&b.db))
            .then(a.algorithm.cmp(&b.algorithm))
    });
    let mut rows: Vec<ComparisonRow> = Vec::with_capacity(sorted.len());
    for report in sorted {
        let best = rows
            .last()
            .is_none_or(|prev| prev.report.dataset != report.dataset);
        rows.push(ComparisonRow { report, best });
    }
    Comparison { rows }
}

impl Comparison {
    pub fn rows(&self) -> &[ComparisonRow] {
        &self.rows
    }

    pub fn best(&self, dataset: &str) -> Option<&ValidityReport> {
        self.rows
            .iter()
            .find(|r| r.best && r.report.dataset == dataset)
            .map(|r| &r.report)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "dataset,algorithm,db,xb,sse,iterations,converged,best,restart,k,w_lower,w_upper,epsilon,max_iter,tol,seed\n",
        );
        for ComparisonRow { report: r, best } in &self.rows {
            let p = &r.params;
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                r.dataset,
                r.algorithm,
                r.db,
                r.xb,
                r.sse,
                r.iterations,
                r.converged,
                best,
                r.restart,
                p.k,
                p.w_lower,
                p.w_upper,
                p.epsilon,
                p.max_iter,
                p.tol,
                p.seed
            ));
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{:<16} {:<8} {:>10} {:>10} {:>14} {:>6}\n",
            "dataset", "method", "DB", "XB", "SSE", "iter"
        );
        for ComparisonRow { report: r, best } in &self.rows {
            out.push_str(&format!(
                "{:<16} {:<8} {:>10.4} {:>10.4} {:>14.4} {:>6}{}\n",
                r.dataset,
                r.algorithm.as_str(),
                r.db,
                r.xb,
                r.sse,
                r.iterations,
                if *best { "  *" } else { "" }
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(dataset: &str, algorithm: Algorithm, db: f64) -> ValidityReport {
        ValidityReport {
            dataset: dataset.into(),
            algorithm,
            db,
            xb: 0.35,
            sse: 1.0,
            iterations: 5,
            converged: true,
            restart: 0,
            params: RoughParams::defaults(algorithm, 2),
        }
    }

    #[test]
    fn compare_flags_lowest_db() {
        let c = compare(&[
            report("leukemia", Algorithm::KMeans, 0.1656),
            report("leukemia", Algorithm::Rough, 0.0801),
            report("leukemia", Algorithm::Fsrk, 0.0673),
        ]);
        assert_eq!(c.best("leukemia").unwrap().algorithm, Algorithm::Fsrk);
        let order: Vec<_> = c.rows().iter().map(|r| r.report.algorithm).collect();
        assert_eq!(
            order,
            [Algorithm::Fsrk, Algorithm::Rough, Algorithm::KMeans]
        );
        assert_eq!(c.rows().iter().filter(|r| r.best).count(), 1);
    }

    #[test]
    fn compare_singleton_and_ties() {
        let c = compare(&[report("lung", Algorithm::Rough, 0.2)]);
        assert!(c.rows()[0].best);

        let c = compare(&[
            report("lung", Algorithm::Fsrk, 0.2),
            report("lung", Algorithm::Rough, 0.2),
            report("lung", Algorithm::KMeans, 0.2),
        ]);
        assert_eq!(c.best("lung").unwrap().algorithm, Algorithm::KMeans);
    }

    #[test]
    fn compare_groups_by_dataset() {
        let c = compare(&[
            report("b", Algorithm::KMeans, 0.1),
            report("a", Algorithm::KMeans, 0.3),
            report("a", Algorithm::Fsrk, 0.2),
        ]);
        let flags: Vec<_> = c
            .rows()
            .iter()
            .map(|r| (r.report.dataset.as_str(), r.best))
            .collect();
        assert_eq!(flags, [("a", true), ("a", false), ("b", true)]);
        assert!(c.to_text().lines().count() == 4);
        assert!(c
            .to_csv()
            .starts_with("dataset,algorithm,db,xb,sse,iterations"));
    }

    #[test]
    fn config_pairs_and_overrides() {
        let text = "# leukemia run\nmatrix = m.tsv\nlabels = l.tsv\ntop-genes = 562\nalgorithm = kmeans, fsrk\nepsilon = 0.9\nk = 3\n";
        let mut pairs = parse_config_text(text).unwrap();
        pairs.push(("k".into(), "4".into()));
        pairs.push(("kmeans.seed".into(), "11".into()));
        let c = ExperimentConfig::from_pairs(pairs).unwrap();
        assert_eq!(c.top_genes, Some(562));
        assert_eq!(c.algorithms, [Algorithm::KMeans, Algorithm::Fsrk]);
        assert_eq!(c.params_for(Algorithm::Fsrk).k, 4);
        assert_eq!(c.params_for(Algorithm::Fsrk).epsilon, 0.9);
        assert_eq!(c.params_for(Algorithm::KMeans).seed, 11);
        assert_eq!(c.params_for(Algorithm::Fsrk).seed, 0);
        assert_eq!(c.dataset, "m");
        assert_eq!(c.restarts, 1);
    }

    #[test]
    fn config_errors() {
        assert!(ExperimentConfig::from_pairs([("labels", "l")]).is_err());
        assert!(ExperimentConfig::from_pairs([
            ("matrix", "m"),
            ("labels", "l"),
            ("colour", "red")
        ])
        .is_err());
        assert!(
            ExperimentConfig::from_pairs([("matrix", "m"), ("labels", "l"), ("k", "two")]).is_err()
        );
        assert!(ExperimentConfig::from_pairs([
            ("matrix", "m"),
            ("labels", "l"),
            ("algorithm", "dbscan")
        ])
        .is_err());
        assert!(ExperimentConfig::from_pairs([
            ("matrix", "m"),
            ("labels", "l"),
            ("rough.colour", "1")
        ])
        .is_err());
        assert!(parse_config_text("just words").is_err());
        let c = ExperimentConfig::from_pairs([
            ("matrix", "/nonexistent/m.tsv"),
            ("labels", "/nonexistent/l.tsv"),
        ])
        .unwrap();
        assert!(
            matches!(c.validate(), Err(ExperimentError::Config(msg)) if msg.contains("/nonexistent/m.tsv"))
        );
    }

    #[test]
    fn assignment_rows() {
        let csv = assignments_csv(
            &["g1".into(), "g2".into()],
            &[
                GeneMembership::Lower(1),
                GeneMembership::Boundary(vec![0, 1]),
            ],
        );
        assert_eq!(
            csv,
            "gene_id,cluster,membership_kind\ng1,1,lower\ng2,0,boundary\ng2,1,boundary\n"
        );
    }
}
