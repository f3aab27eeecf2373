//! Entropy and information-gain gene filtering.
//!
//! Each gene row is discretized into equal-width bins over its own observed
//! range, the joint histogram with the sample class variable is built, and
//! genes are ranked by `IG(X, Y) = H(X) + H(Y) - H(X, Y)` in bits.

use std::io::Write;

use ndarray::ArrayView1;
use rayon::prelude::*;
use thiserror::Error;

use crate::ingest::{ClassLabels, ExpressionMatrix};

/// Tolerance on the total mass of a probability vector.
pub const DISTRIBUTION_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum FilterError {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("degenerate labels: need at least 2 classes, found {found}")]
    DegenerateLabels { found: usize },
    #[error("gene row has {got} values but there are {expected} labelled samples")]
    LengthMismatch { expected: usize, got: usize },
    #[error("parameter error: {0}")]
    Parameter(String),
}

/// Shannon entropy in bits. `0 · log2(0)` counts as 0.
pub fn entropy(distribution: &[f64]) -> Result<f64, FilterError> {
    let mut total = 0.0;
    for &p in distribution {
        if !p.is_finite() || p < 0.0 {
            return Err(FilterError::InvalidDistribution(format!(
                "entry {p} is not a probability"
            )));
        }
        total += p;
    }
    if (total - 1.0).abs() > DISTRIBUTION_TOLERANCE {
        return Err(FilterError::InvalidDistribution(format!(
            "entries sum to {total}"
        )));
    }
    Ok(entropy_unchecked(distribution))
}

fn entropy_unchecked(distribution: &[f64]) -> f64 {
    let h: f64 = distribution
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum();
    // -0.0 for a point mass
    h.max(0.0)
}

/// Equal-width binning over a gene's observed `[min, max]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiscretizationSpec {
    bin_count: usize,
}

impl DiscretizationSpec {
    pub fn new(bin_count: usize) -> Result<Self, FilterError> {
        if bin_count == 0 {
            return Err(FilterError::Parameter(
                "bin count must be at least 1".into(),
            ));
        }
        Ok(DiscretizationSpec { bin_count })
    }

    /// Sturges' rule, `ceil(log2(m)) + 1`, for `m` samples.
    pub fn sturges(samples: usize) -> Self {
        let m = samples.max(1) as f64;
        DiscretizationSpec {
            bin_count: m.log2().ceil() as usize + 1,
        }
    }

    pub fn bin_count(&self) -> usize {
        self.bin_count
    }

    /// Bin index of every value. A constant row lands entirely in bin 0; the
    /// maximum falls in the last bin.
    pub fn discretize(&self, row: ArrayView1<'_, f64>) -> Vec<usize> {
        let (lo, hi) = row
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            });
        let width = hi - lo;
        let b = self.bin_count;
        row.iter()
            .map(|&v| {
                if width > 0.0 {
                    (((v - lo) / width * b as f64) as usize).min(b - 1)
                } else {
                    0
                }
            })
            .collect()
    }
}

/// Mutual information of a joint count table (rows: X outcomes, columns: Y
/// outcomes), in bits. Clamped at zero against rounding.
pub fn information_gain_from_counts(table: &[Vec<usize>]) -> f64 {
    let total: usize = table.iter().flatten().sum();
    if total == 0 {
        return 0.0;
    }
    let n = total as f64;
    let cols = table.iter().map(Vec::len).max().unwrap_or(0);
    let px: Vec<f64> = table
        .iter()
        .map(|r| r.iter().sum::<usize>() as f64 / n)
        .collect();
    let py: Vec<f64> = (0..cols)
        .map(|j| {
            table
                .iter()
                .map(|r| r.get(j).copied().unwrap_or(0))
                .sum::<usize>() as f64
                / n
        })
        .collect();
    let pxy: Vec<f64> = table.iter().flatten().map(|&c| c as f64 / n).collect();
    let ig = entropy_unchecked(&px) + entropy_unchecked(&py) - entropy_unchecked(&pxy);
    ig.max(0.0)
}

/// Information gain of one gene row against the class labels, in bits.
pub fn information_gain(
    gene_row: ArrayView1<'_, f64>,
    labels: &ClassLabels,
    spec: DiscretizationSpec,
) -> Result<f64, FilterError> {
    if labels.n_classes() < 2 {
        return Err(FilterError::DegenerateLabels {
            found: labels.n_classes(),
        });
    }
    let codes = labels.codes();
    if gene_row.len() != codes.len() {
        return Err(FilterError::LengthMismatch {
            expected: codes.len(),
            got: gene_row.len(),
        });
    }
    let bins = spec.discretize(gene_row);
    let mut table = vec![vec![0usize; labels.n_classes()]; spec.bin_count()];
    for (&bin, &class) in bins.iter().zip(codes) {
        table[bin][class] += 1;
    }
    Ok(information_gain_from_counts(&table))
}

/// Information-gain score of every gene and the gene order by descending
/// score (ties by ascending gene index).
#[derive(Debug, Clone, PartialEq)]
pub struct GeneRanking {
    scores: Vec<f64>,
    order: Vec<usize>,
}

impl GeneRanking {
    pub fn from_scores(scores: Vec<f64>) -> Self {
        let mut order: Vec<usize> = (0..scores.len()).collect();
        // stable sort keeps ascending index among equal scores
        order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
        GeneRanking { scores, order }
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// `gene_id,ig_bits,rank` rows in rank order, rank starting at 1.
    pub fn write_csv<W: Write>(&self, gene_ids: &[String], mut out: W) -> std::io::Result<()> {
        writeln!(out, "gene_id,ig_bits,rank")?;
        for (rank, &i) in self.order.iter().enumerate() {
            writeln!(out, "{},{},{}", gene_ids[i], self.scores[i], rank + 1)?;
        }
        Ok(())
    }
}

pub fn rank_genes(
    matrix: &ExpressionMatrix,
    labels: &ClassLabels,
    spec: DiscretizationSpec,
) -> Result<GeneRanking, FilterError> {
    let scores = (0..matrix.n_genes())
        .into_par_iter()
        .map(|i| information_gain(matrix.gene_row(i), labels, spec))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(GeneRanking::from_scores(scores))
}

/// Ranks all genes and keeps the `top_n` best, in their original relative
/// order. The sample axis is untouched.
pub fn rank_and_select(
    matrix: &ExpressionMatrix,
    labels: &ClassLabels,
    spec: DiscretizationSpec,
    top_n: usize,
) -> Result<(GeneRanking, ExpressionMatrix), FilterError> {
    if top_n == 0 || top_n > matrix.n_genes() {
        return Err(FilterError::Parameter(format!(
            "top_n must be in 1..={}, got {top_n}",
            matrix.n_genes()
        )));
    }
    let ranking = rank_genes(matrix, labels, spec)?;
    let mut keep = ranking.order()[..top_n].to_vec();
    keep.sort_unstable();
    let filtered = matrix.select_genes(&keep);
    Ok((ranking, filtered))
}
