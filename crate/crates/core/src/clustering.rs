//! Partitional clustering of gene rows: K-means, rough K-means and fuzzy
//! soft rough K-means (FSRK).
//!
//! The rough engines keep, for every cluster, a lower approximation (genes
//! that certainly belong) and an upper approximation (genes that possibly
//! belong). A gene is either in exactly one lower approximation, or in the
//! boundary of two or more clusters. Centroids of clusters with a non-empty
//! boundary are the weighted sum `w_lower · mean(lower) + w_upper ·
//! mean(boundary)`.
//!
//! Rough K-means decides membership by the distance ratio
//! `d(x, z_h) / d(x, z_best) <= epsilon` (`epsilon >= 1`); FSRK runs on
//! fuzzified rows and uses the similarity ratio `S_h / S_best >= epsilon`
//! (`epsilon` in `(0, 1]`). Ties always resolve to the lowest cluster index.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::fuzzysoft::{check_unit_range, similarity_unchecked, FuzzyError};

#[derive(Debug, Error, PartialEq)]
pub enum ClusterError {
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("shape error: {0}")]
    Shape(String),
    #[error("domain error: {0}")]
    Domain(#[from] FuzzyError),
}

pub type Result<T> = std::result::Result<T, ClusterError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    #[serde(rename = "kmeans")]
    KMeans,
    Rough,
    Fsrk,
}

impl Algorithm {
    /// Canonical order, also used to break ties in comparisons.
    pub const ALL: [Algorithm; 3] = [Algorithm::KMeans, Algorithm::Rough, Algorithm::Fsrk];

    pub fn as_str(&self) -> &'static str {
        match self {
            Algorithm::KMeans => "kmeans",
            Algorithm::Rough => "rough",
            Algorithm::Fsrk => "fsrk",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = ClusterError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "kmeans" | "k-means" => Ok(Algorithm::KMeans),
            "rough" | "rough-kmeans" => Ok(Algorithm::Rough),
            "fsrk" => Ok(Algorithm::Fsrk),
            other => Err(ClusterError::Parameter(format!(
                "unknown algorithm {other:?} (expected kmeans, rough or fsrk)"
            ))),
        }
    }
}

/// Run parameters shared by all three engines. K-means ignores the weights
/// and `epsilon`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RoughParams {
    pub k: usize,
    pub w_lower: f64,
    pub w_upper: f64,
    pub epsilon: f64,
    pub max_iter: usize,
    pub tol: f64,
    pub seed: u64,
}

pub const DEFAULT_W_LOWER: f64 = 0.7;
pub const DEFAULT_W_UPPER: f64 = 0.3;
pub const DEFAULT_ROUGH_EPSILON: f64 = 1.2;
pub const DEFAULT_FSRK_EPSILON: f64 = 0.95;
pub const DEFAULT_MAX_ITER: usize = 100;
pub const DEFAULT_TOL: f64 = 1e-6;

impl RoughParams {
    pub fn defaults(algorithm: Algorithm, k: usize) -> Self {
        let epsilon = match algorithm {
            Algorithm::Fsrk => DEFAULT_FSRK_EPSILON,
            Algorithm::KMeans | Algorithm::Rough => DEFAULT_ROUGH_EPSILON,
        };
        RoughParams {
            k,
            w_lower: DEFAULT_W_LOWER,
            w_upper: DEFAULT_W_UPPER,
            epsilon,
            max_iter: DEFAULT_MAX_ITER,
            tol: DEFAULT_TOL,
            seed: 0,
        }
    }

    /// Checks the parameters against `n` objects for the given engine.
    pub fn validate(&self, algorithm: Algorithm, n: usize) -> Result<()> {
        let fail = |msg: String| Err(ClusterError::Parameter(msg));
        if self.k == 0 || self.k > n {
            return fail(format!("k must be in 1..={n}, got {}", self.k));
        }
        if self.max_iter == 0 {
            return fail("max_iter must be positive".into());
        }
        if self.tol.is_nan() || self.tol < 0.0 {
            return fail(format!("tol must be non-negative, got {}", self.tol));
        }
        if algorithm == Algorithm::KMeans {
            return Ok(());
        }
        let unit = 0.0..=1.0;
        if !unit.contains(&self.w_lower) || !unit.contains(&self.w_upper) {
            return fail(format!(
                "weights must lie in [0, 1], got w_lower={} w_upper={}",
                self.w_lower, self.w_upper
            ));
        }
        if (self.w_lower + self.w_upper - 1.0).abs() > 1e-9 {
            return fail(format!(
                "weights must sum to 1, got {} + {}",
                self.w_lower, self.w_upper
            ));
        }
        match algorithm {
            Algorithm::Rough => check_distance_epsilon(self.epsilon),
            Algorithm::Fsrk => check_similarity_epsilon(self.epsilon),
            Algorithm::KMeans => unreachable!(),
        }
    }
}

fn check_distance_epsilon(epsilon: f64) -> Result<()> {
    if epsilon >= 1.0 && epsilon.is_finite() {
        Ok(())
    } else {
        Err(ClusterError::Parameter(format!(
            "distance-ratio epsilon must be >= 1, got {epsilon}"
        )))
    }
}

fn check_similarity_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon <= 1.0 {
        Ok(())
    } else {
        Err(ClusterError::Parameter(format!(
            "similarity-ratio epsilon must be in (0, 1], got {epsilon}"
        )))
    }
}

/// Indices of `k` distinct rows drawn uniformly without replacement.
pub fn init_indices(n: usize, k: usize, seed: u64) -> Result<Vec<usize>> {
    if k > n {
        return Err(ClusterError::Parameter(format!(
            "cannot pick {k} initial centroids from {n} rows"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(rand::seq::index::sample(&mut rng, n, k).into_vec())
}

/// `k` distinct data rows chosen at random; deterministic for a fixed seed.
pub fn init_centroids(data: ArrayView2<'_, f64>, k: usize, seed: u64) -> Result<Array2<f64>> {
    let rows = init_indices(data.nrows(), k, seed)?;
    Ok(data.select(Axis(0), &rows))
}

pub fn euclidean(a: ArrayView1<'_, f64>, b: ArrayView1<'_, f64>) -> f64 {
    squared_euclidean(a, b).sqrt()
}

pub fn squared_euclidean(a: ArrayView1<'_, f64>, b: ArrayView1<'_, f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Index of the smallest value; the first one wins ties.
fn argmin(values: &[f64]) -> usize {
    let mut best = 0;
    for (h, &v) in values.iter().enumerate().skip(1) {
        if v < values[best] {
            best = h;
        }
    }
    best
}

/// Index of the largest value; the first one wins ties.
fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (h, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = h;
        }
    }
    best
}

fn distances_to(row: ArrayView1<'_, f64>, centroids: ArrayView2<'_, f64>) -> Vec<f64> {
    centroids
        .rows()
        .into_iter()
        .map(|c| euclidean(row, c))
        .collect()
}

fn mean_of(data: ArrayView2<'_, f64>, rows: &[usize]) -> Array1<f64> {
    let mut acc = Array1::<f64>::zeros(data.ncols());
    for &i in rows {
        acc += &data.row(i);
    }
    acc / rows.len() as f64
}

fn max_displacement(a: ArrayView2<'_, f64>, b: ArrayView2<'_, f64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn check_centroid_shape(data: ArrayView2<'_, f64>, centroids: ArrayView2<'_, f64>) -> Result<()> {
    if centroids.ncols() != data.ncols() || centroids.nrows() == 0 {
        return Err(ClusterError::Shape(format!(
            "{} centroids of width {} against data of width {}",
            centroids.nrows(),
            centroids.ncols(),
            data.ncols()
        )));
    }
    Ok(())
}

/// Result of a K-means run.
#[derive(Debug, Clone, PartialEq)]
pub struct CrispClustering {
    pub assignment: Vec<usize>,
    pub centroids: Array2<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub sse: f64,
    /// SSE of the initial assignment, then after every centroid update.
    pub sse_trace: Vec<f64>,
    /// Clusters that lost all members at some iteration and kept their
    /// previous centroid.
    pub empty_clusters: Vec<usize>,
}

pub fn sse(data: ArrayView2<'_, f64>, assignment: &[usize], centroids: ArrayView2<'_, f64>) -> f64 {
    data.rows()
        .into_iter()
        .zip(assignment)
        .map(|(x, &h)| squared_euclidean(x, centroids.row(h)))
        .sum()
}

/// Nearest centroid of each row.
pub fn nearest_centroids(data: ArrayView2<'_, f64>, centroids: ArrayView2<'_, f64>) -> Vec<usize> {
    data.rows()
        .into_iter()
        .map(|x| argmin(&distances_to(x, centroids)))
        .collect()
}

fn members_by_cluster(assignment: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut members = vec![Vec::new(); k];
    for (i, &h) in assignment.iter().enumerate() {
        members[h].push(i);
    }
    members
}

pub fn kmeans(data: ArrayView2<'_, f64>, params: &RoughParams) -> Result<CrispClustering> {
    params.validate(Algorithm::KMeans, data.nrows())?;
    let init = init_centroids(data, params.k, params.seed)?;
    kmeans_from(data, init, params)
}

/// K-means from explicit initial centroids (`params.k` and `params.seed`
/// are not consulted).
pub fn kmeans_from(
    data: ArrayView2<'_, f64>,
    init: Array2<f64>,
    params: &RoughParams,
) -> Result<CrispClustering> {
    check_centroid_shape(data, init.view())?;
    let k = init.nrows();
    let mut centroids = init;
    let mut trace = Vec::new();
    let mut empty = BTreeSet::new();
    let mut assignment = Vec::new();
    let mut iterations = 0;
    let mut converged = false;
    while iterations < params.max_iter {
        iterations += 1;
        assignment = nearest_centroids(data, centroids.view());
        if trace.is_empty() {
            trace.push(sse(data, &assignment, centroids.view()));
        }
        let mut next = centroids.clone();
        for (h, rows) in members_by_cluster(&assignment, k).iter().enumerate() {
            if rows.is_empty() {
                empty.insert(h);
            } else {
                next.row_mut(h).assign(&mean_of(data, rows));
            }
        }
        let shift = max_displacement(centroids.view(), next.view());
        centroids = next;
        trace.push(sse(data, &assignment, centroids.view()));
        if shift <= params.tol {
            converged = true;
            break;
        }
    }
    Ok(CrispClustering {
        sse: *trace.last().unwrap_or(&0.0),
        assignment,
        centroids,
        iterations,
        converged,
        sse_trace: trace,
        empty_clusters: empty.into_iter().collect(),
    })
}

/// Where one gene sits in a rough clustering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GeneMembership {
    /// In the lower (and upper) approximation of exactly this cluster.
    Lower(usize),
    /// In the upper approximations of these clusters (ascending, at least
    /// two) and in no lower approximation.
    Boundary(Vec<usize>),
}

impl GeneMembership {
    pub fn clusters(&self) -> &[usize] {
        match self {
            GeneMembership::Lower(h) => std::slice::from_ref(h),
            GeneMembership::Boundary(hs) => hs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AxiomViolation {
    #[error("lower[{cluster}] is not a subset of upper[{cluster}]")]
    LowerNotInUpper { cluster: usize },
    #[error("gene {gene} is in {count} lower approximations")]
    MultipleLower { gene: usize, count: usize },
    #[error("gene {gene} is in lower[{lower}] and also in upper[{other}]")]
    LowerLeaks {
        gene: usize,
        lower: usize,
        other: usize,
    },
    #[error("gene {gene} is in no lower approximation and only {count} upper approximations")]
    LoneBoundary { gene: usize, count: usize },
}

/// Lower and upper approximations of `k` clusters over `n` genes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoughSets {
    members: Vec<GeneMembership>,
    lower: Vec<Vec<usize>>,
    upper: Vec<Vec<usize>>,
}

impl RoughSets {
    pub fn from_memberships(members: Vec<GeneMembership>, k: usize) -> Self {
        let mut lower = vec![Vec::new(); k];
        let mut upper = vec![Vec::new(); k];
        for (i, m) in members.iter().enumerate() {
            if let GeneMembership::Lower(h) = m {
                lower[*h].push(i);
            }
            for &h in m.clusters() {
                upper[h].push(i);
            }
        }
        RoughSets {
            members,
            lower,
            upper,
        }
    }

    pub fn k(&self) -> usize {
        self.lower.len()
    }

    pub fn n(&self) -> usize {
        self.members.len()
    }

    /// Ascending gene indices in the lower approximation of cluster `h`.
    pub fn lower(&self, h: usize) -> &[usize] {
        &self.lower[h]
    }

    pub fn upper(&self, h: usize) -> &[usize] {
        &self.upper[h]
    }

    /// Upper minus lower approximation.
    pub fn boundary(&self, h: usize) -> Vec<usize> {
        self.upper[h]
            .iter()
            .copied()
            .filter(|i| matches!(self.members[*i], GeneMembership::Boundary(_)))
            .collect()
    }

    pub fn membership(&self, gene: usize) -> &GeneMembership {
        &self.members[gene]
    }

    pub fn memberships(&self) -> &[GeneMembership] {
        &self.members
    }

    /// Checks the rough-set membership axioms directly on the lower/upper
    /// sets.
    pub fn check_axioms(&self) -> std::result::Result<(), AxiomViolation> {
        let n = self.n();
        let k = self.k();
        let mut in_lower = vec![Vec::new(); n];
        let mut in_upper = vec![BTreeSet::new(); n];
        for h in 0..k {
            for &i in &self.lower[h] {
                in_lower[i].push(h);
            }
            for &i in &self.upper[h] {
                in_upper[i].insert(h);
            }
        }
        for h in 0..k {
            if self.lower[h].iter().any(|i| !in_upper[*i].contains(&h)) {
                return Err(AxiomViolation::LowerNotInUpper { cluster: h });
            }
        }
        for gene in 0..n {
            match in_lower[gene].as_slice() {
                [] => {
                    if in_upper[gene].len() < 2 {
                        return Err(AxiomViolation::LoneBoundary {
                            gene,
                            count: in_upper[gene].len(),
                        });
                    }
                }
                [h] => {
                    if let Some(&other) = in_upper[gene].iter().find(|&&g| g != *h) {
                        return Err(AxiomViolation::LowerLeaks {
                            gene,
                            lower: *h,
                            other,
                        });
                    }
                }
                many => {
                    return Err(AxiomViolation::MultipleLower {
                        gene,
                        count: many.len(),
                    })
                }
            }
        }
        Ok(())
    }
}

/// Membership of one gene from its per-cluster scores. `within(h)` is the
/// ratio test against the best cluster; a perfect score or a ratio threshold
/// of exactly 1 keeps only the best cluster.
fn decide(
    best: usize,
    k: usize,
    exact_or_crisp: bool,
    within: impl Fn(usize) -> bool,
) -> GeneMembership {
    if exact_or_crisp {
        return GeneMembership::Lower(best);
    }
    let close: Vec<usize> = (0..k).filter(|&h| h == best || within(h)).collect();
    if close.len() == 1 {
        GeneMembership::Lower(best)
    } else {
        GeneMembership::Boundary(close)
    }
}

/// Distance-ratio assignment: cluster `h` is admitted for a gene when
/// `d(x, z_h) / d(x, z_best) <= epsilon`.
pub fn rough_assign(
    data: ArrayView2<'_, f64>,
    centroids: ArrayView2<'_, f64>,
    epsilon: f64,
) -> Result<RoughSets> {
    check_distance_epsilon(epsilon)?;
    check_centroid_shape(data, centroids)?;
    let k = centroids.nrows();
    let members = data
        .rows()
        .into_iter()
        .map(|x| {
            let d = distances_to(x, centroids);
            let best = argmin(&d);
            let d_best = d[best];
            decide(best, k, d_best == 0.0 || epsilon == 1.0, |h| {
                d[h] / d_best <= epsilon
            })
        })
        .collect();
    Ok(RoughSets::from_memberships(members, k))
}

/// Similarity-ratio assignment on membership rows: cluster `h` is admitted
/// when `S_h / S_best >= epsilon`. A gene identical to its best centroid
/// (`S_best = 1`) goes to that lower approximation alone.
pub fn fsrk_assign(
    memberships: ArrayView2<'_, f64>,
    centroids: ArrayView2<'_, f64>,
    epsilon: f64,
) -> Result<RoughSets> {
    check_similarity_epsilon(epsilon)?;
    check_centroid_shape(memberships, centroids)?;
    check_unit_range(centroids)?;
    let k = centroids.nrows();
    let members = memberships
        .rows()
        .into_iter()
        .map(|x| {
            let s: Vec<f64> = centroids
                .rows()
                .into_iter()
                .map(|c| similarity_unchecked(x, c))
                .collect();
            let best = argmax(&s);
            let s_best = s[best];
            decide(
                best,
                k,
                s_best == 0.0 || s_best == 1.0 || epsilon == 1.0,
                |h| s[h] / s_best >= epsilon,
            )
        })
        .collect();
    Ok(RoughSets::from_memberships(members, k))
}

/// Centroid update from rough sets. Returns the new centroids and the
/// clusters that had neither lower nor boundary members (those keep their
/// `previous` centroid).
pub fn rough_centroids(
    data: ArrayView2<'_, f64>,
    sets: &RoughSets,
    w_lower: f64,
    w_upper: f64,
    previous: ArrayView2<'_, f64>,
) -> (Array2<f64>, Vec<usize>) {
    let mut next = previous.to_owned();
    let mut retained = Vec::new();
    for h in 0..sets.k() {
        let lower = sets.lower(h);
        let boundary = sets.boundary(h);
        let centroid = match (lower.is_empty(), boundary.is_empty()) {
            (true, true) => {
                retained.push(h);
                continue;
            }
            (false, true) => mean_of(data, lower),
            (true, false) => mean_of(data, &boundary),
            (false, false) => mean_of(data, lower) * w_lower + mean_of(data, &boundary) * w_upper,
        };
        next.row_mut(h).assign(&centroid);
    }
    (next, retained)
}

/// Result of a rough or FSRK run.
#[derive(Debug, Clone, PartialEq)]
pub struct RoughClustering {
    pub sets: RoughSets,
    pub centroids: Array2<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Clusters that had no members at some iteration and kept their
    /// previous centroid.
    pub empty_clusters: Vec<usize>,
}

impl RoughClustering {
    pub fn lower(&self, h: usize) -> &[usize] {
        self.sets.lower(h)
    }

    pub fn upper(&self, h: usize) -> &[usize] {
        self.sets.upper(h)
    }

    pub fn k(&self) -> usize {
        self.sets.k()
    }
}

/// State handed to iteration observers: the assignment made in iteration
/// `iteration` (1-based) and the centroids it was made against.
pub struct IterationState<'a> {
    pub iteration: usize,
    pub sets: &'a RoughSets,
    pub centroids: ArrayView2<'a, f64>,
}

fn rough_loop(
    data: ArrayView2<'_, f64>,
    init: Array2<f64>,
    params: &RoughParams,
    assign: impl Fn(ArrayView2<'_, f64>) -> Result<RoughSets>,
    mut observe: impl FnMut(&IterationState<'_>),
) -> Result<RoughClustering> {
    let mut centroids = init;
    let mut empty = BTreeSet::new();
    let mut sets = None;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < params.max_iter {
        iterations += 1;
        let current = assign(centroids.view())?;
        debug_assert_eq!(current.check_axioms(), Ok(()));
        observe(&IterationState {
            iteration: iterations,
            sets: &current,
            centroids: centroids.view(),
        });
        let (next, retained) = rough_centroids(
            data,
            &current,
            params.w_lower,
            params.w_upper,
            centroids.view(),
        );
        empty.extend(retained);
        let shift = max_displacement(centroids.view(), next.view());
        centroids = next;
        sets = Some(current);
        if shift <= params.tol {
            converged = true;
            break;
        }
    }
    Ok(RoughClustering {
        sets: sets.expect("max_iter >= 1"),
        centroids,
        iterations,
        converged,
        empty_clusters: empty.into_iter().collect(),
    })
}

pub fn rough_kmeans(data: ArrayView2<'_, f64>, params: &RoughParams) -> Result<RoughClustering> {
    params.validate(Algorithm::Rough, data.nrows())?;
    let init = init_centroids(data, params.k, params.seed)?;
    rough_kmeans_from(data, init, params, |_| {})
}

/// Rough K-means from explicit initial centroids, reporting every
/// assignment to `observe`.
pub fn rough_kmeans_from(
    data: ArrayView2<'_, f64>,
    init: Array2<f64>,
    params: &RoughParams,
    observe: impl FnMut(&IterationState<'_>),
) -> Result<RoughClustering> {
    check_distance_epsilon(params.epsilon)?;
    check_centroid_shape(data, init.view())?;
    rough_loop(
        data,
        init,
        params,
        |c| rough_assign(data, c, params.epsilon),
        observe,
    )
}

pub fn fsrk_kmeans(
    memberships: ArrayView2<'_, f64>,
    params: &RoughParams,
) -> Result<RoughClustering> {
    params.validate(Algorithm::Fsrk, memberships.nrows())?;
    check_unit_range(memberships)?;
    let init = init_centroids(memberships, params.k, params.seed)?;
    fsrk_kmeans_from(memberships, init, params, |_| {})
}

/// FSRK from explicit initial centroids, reporting every assignment to
/// `observe`.
pub fn fsrk_kmeans_from(
    memberships: ArrayView2<'_, f64>,
    init: Array2<f64>,
    params: &RoughParams,
    observe: impl FnMut(&IterationState<'_>),
) -> Result<RoughClustering> {
    check_similarity_epsilon(params.epsilon)?;
    check_unit_range(memberships)?;
    check_centroid_shape(memberships, init.view())?;
    rough_loop(
        memberships,
        init,
        params,
        |c| fsrk_assign(memberships, c, params.epsilon),
        observe,
    )
}
