use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use fsrk_core::experiment::{parse_config_text, run_experiment, ExperimentConfig, ExperimentError};

/// Cluster genes of an expression matrix with K-means, rough K-means and
/// fuzzy soft rough K-means, and compare the runs by DB and Xie-Beni index.
#[derive(Debug, Parser)]
#[command(name = "fsrk", version)]
struct Cli {
    /// Flat `key = value` config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Expression matrix (genes as rows, samples as columns; tab or comma).
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// Two-column `sample_id<delim>class` label file.
    #[arg(long)]
    labels: Option<PathBuf>,
    /// Skip the first line of the label file.
    #[arg(long)]
    labels_header: bool,
    /// Dataset name used in reports (default: matrix file stem).
    #[arg(long)]
    dataset: Option<String>,
    /// Keep this many genes with the highest information gain.
    #[arg(long)]
    top_genes: Option<usize>,
    /// Equal-width bins per gene for information gain (default: Sturges).
    #[arg(long)]
    bins: Option<usize>,
    /// Membership function for fsrk: s or z.
    #[arg(long)]
    fuzzify: Option<String>,
    /// kmeans, rough or fsrk; repeat for several (default: all three).
    #[arg(long)]
    algorithm: Vec<String>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    w_lower: Option<f64>,
    #[arg(long)]
    w_upper: Option<f64>,
    /// Ratio threshold: >= 1 for rough (distance), in (0, 1] for fsrk (similarity).
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Runs per algorithm; the one with the lowest DB index is reported.
    #[arg(long)]
    restarts: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the fuzzified matrix (fuzzified.tsv).
    #[arg(long)]
    export_fuzzified: bool,
}

impl Cli {
    fn flag_pairs(&self) -> Vec<(String, String)> {
        let mut pairs = Vec::new();
        let mut put = |key: &str, value: Option<String>| {
            if let Some(v) = value {
                pairs.push((key.to_string(), v));
            }
        };
        let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string());
        put("matrix", path(&self.matrix));
        put("labels", path(&self.labels));
        put("labels_header", self.labels_header.then(|| "true".into()));
        put("dataset", self.dataset.clone());
        put("top_genes", self.top_genes.map(|v| v.to_string()));
        put("bins", self.bins.map(|v| v.to_string()));
        put("fuzzify", self.fuzzify.clone());
        put(
            "algorithm",
            (!self.algorithm.is_empty()).then(|| self.algorithm.join(",")),
        );
        put("k", self.k.map(|v| v.to_string()));
        put("w_lower", self.w_lower.map(|v| v.to_string()));
        put("w_upper", self.w_upper.map(|v| v.to_string()));
        put("epsilon", self.epsilon.map(|v| v.to_string()));
        put("max_iter", self.max_iter.map(|v| v.to_string()));
        put("tol", self.tol.map(|v| v.to_string()));
        put("seed", self.seed.map(|v| v.to_string()));
        put("restarts", self.restarts.map(|v| v.to_string()));
        put("out", path(&self.out));
        put(
            "export_fuzzified",
            self.export_fuzzified.then(|| "true".into()),
        );
        pairs
    }
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig, ExperimentError> {
    let mut pairs = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| ExperimentError::Config(format!("{}: {e}", path.display())))?;
            parse_config_text(&text)?
        }
        None => Vec::new(),
    };
    pairs.extend(cli.flag_pairs());
    ExperimentConfig::from_pairs(pairs)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let outcome = load_config(&cli).and_then(|config| run_experiment(&config));
    match outcome {
        Ok(outcome) => {
            print!("{}", outcome.comparison.to_text());
            for path in &outcome.written {
                log::info!("wrote {}", path.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
