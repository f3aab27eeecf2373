//! Cluster validity: Davies–Bouldin index, Xie–Beni index and SSE over crisp
//! assignments, plus the boundary resolution that turns a rough clustering
//! into a crisp one for scoring.

use ndarray::ArrayView2;
use serde::Serialize;
use thiserror::Error;

use crate::clustering::{
    euclidean, squared_euclidean, sse, Algorithm, GeneMembership, RoughClustering, RoughParams,
};
use crate::fuzzysoft::similarity_unchecked;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ValidityError {
    #[error("validity indices need at least 2 clusters, got {0}")]
    TooFewClusters(usize),
    #[error("cluster {0} has no members")]
    EmptyCluster(usize),
    #[error("degenerate clustering: centroids {0} and {1} coincide")]
    CoincidentCentroids(usize, usize),
    #[error("shape error: {0}")]
    Shape(String),
}

pub type Result<T> = std::result::Result<T, ValidityError>;

fn check(
    data: ArrayView2<'_, f64>,
    assignment: &[usize],
    centroids: ArrayView2<'_, f64>,
) -> Result<Vec<usize>> {
    let k = centroids.nrows();
    if k < 2 {
        return Err(ValidityError::TooFewClusters(k));
    }
    if assignment.len() != data.nrows() || centroids.ncols() != data.ncols() {
        return Err(ValidityError::Shape(format!(
            "{} assignments for {} rows; centroid width {} vs data width {}",
            assignment.len(),
            data.nrows(),
            centroids.ncols(),
            data.ncols()
        )));
    }
    let mut sizes = vec![0usize; k];
    for &h in assignment {
        if h >= k {
            return Err(ValidityError::Shape(format!(
                "cluster index {h} out of range for k = {k}"
            )));
        }
        sizes[h] += 1;
    }
    if let Some(h) = sizes.iter().position(|&s| s == 0) {
        return Err(ValidityError::EmptyCluster(h));
    }
    for h in 0..k {
        for g in h + 1..k {
            if centroids.row(h) == centroids.row(g) {
                return Err(ValidityError::CoincidentCentroids(h, g));
            }
        }
    }
    Ok(sizes)
}

/// `(1/k) Σ_h max_{g≠h} (σ_h + σ_g) / d(z_h, z_g)` where `σ_h` is the mean
/// distance of cluster `h`'s members to its centroid.
pub fn db_index(
    data: ArrayView2<'_, f64>,
    assignment: &[usize],
    centroids: ArrayView2<'_, f64>,
) -> Result<f64> {
    let sizes = check(data, assignment, centroids)?;
    let k = centroids.nrows();
    let mut scatter = vec![0.0; k];
    for (x, &h) in data.rows().into_iter().zip(assignment) {
        scatter[h] += euclidean(x, centroids.row(h));
    }
    for (s, &size) in scatter.iter_mut().zip(&sizes) {
        *s /= size as f64;
    }
    let total: f64 = (0..k)
        .map(|h| {
            (0..k)
                .filter(|&g| g != h)
                .map(|g| (scatter[h] + scatter[g]) / euclidean(centroids.row(h), centroids.row(g)))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .sum();
    Ok(total / k as f64)
}

/// Crisp Xie–Beni index: SSE over `n · min_{h≠g} ‖z_h − z_g‖²`.
pub fn xb_index(
    data: ArrayView2<'_, f64>,
    assignment: &[usize],
    centroids: ArrayView2<'_, f64>,
) -> Result<f64> {
    check(data, assignment, centroids)?;
    let k = centroids.nrows();
    let mut separation = f64::INFINITY;
    for h in 0..k {
        for g in h + 1..k {
            separation = separation.min(squared_euclidean(centroids.row(h), centroids.row(g)));
        }
    }
    Ok(sse(data, assignment, centroids) / (data.nrows() as f64 * separation))
}

/// How boundary genes are resolved to one of their upper clusters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Proximity {
    /// Nearest centroid by Euclidean distance.
    Distance,
    /// Most similar centroid by fuzzy soft set similarity.
    Similarity,
}

impl Proximity {
    pub fn for_algorithm(algorithm: Algorithm) -> Self {
        match algorithm {
            Algorithm::Fsrk => Proximity::Similarity,
            Algorithm::KMeans | Algorithm::Rough => Proximity::Distance,
        }
    }
}

/// Crisp cluster per gene: lower members keep their cluster, boundary genes
/// go to the closest of their upper clusters (lowest index on ties). `data`
/// is the matrix the clustering ran on.
pub fn crispify(
    rough: &RoughClustering,
    data: ArrayView2<'_, f64>,
    proximity: Proximity,
) -> Vec<usize> {
    rough
        .sets
        .memberships()
        .iter()
        .enumerate()
        .map(|(i, m)| match m {
            GeneMembership::Lower(h) => *h,
            GeneMembership::Boundary(candidates) => {
                let x = data.row(i);
                // lower is closer for both rules
                let remoteness = |h: usize| {
                    let z = rough.centroids.row(h);
                    match proximity {
                        Proximity::Distance => euclidean(x, z),
                        Proximity::Similarity => -similarity_unchecked(x, z),
                    }
                };
                candidates
                    .iter()
                    .copied()
                    .min_by(|&a, &b| remoteness(a).total_cmp(&remoteness(b)))
                    .expect("boundary genes have at least two candidate clusters")
            }
        })
        .collect()
}

/// One scored clustering run, the row shape of the comparison tables.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidityReport {
    pub dataset: String,
    pub algorithm: Algorithm,
    pub db: f64,
    pub xb: f64,
    pub sse: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Restart that produced this run (0-based).
    pub restart: usize,
    pub params: RoughParams,
}

/// DB, XB and SSE of one crisp assignment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scores {
    pub db: f64,
    pub xb: f64,
    pub sse: f64,
}

pub fn score(
    data: ArrayView2<'_, f64>,
    assignment: &[usize],
    centroids: ArrayView2<'_, f64>,
) -> Result<Scores> {
    Ok(Scores {
        db: db_index(data, assignment, centroids)?,
        xb: xb_index(data, assignment, centroids)?,
        sse: sse(data, assignment, centroids),
    })
}
