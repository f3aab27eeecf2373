//! Gene-expression clustering toolkit.
//!
//! The pipeline reads a genes × samples expression matrix and per-sample
//! class labels ([`ingest`]), keeps the genes with the highest information
//! gain against the classes ([`genefilter`]), optionally maps expression
//! values to membership degrees ([`fuzzysoft`]), clusters genes with
//! K-means, rough K-means or fuzzy soft rough K-means ([`clustering`]) and
//! scores the result with the Davies–Bouldin and Xie–Beni indices
//! ([`validity`]). [`experiment`] wires the stages together.

pub mod clustering;
pub mod experiment;
pub mod fuzzysoft;
pub mod genefilter;
pub mod ingest;
pub mod validity;

pub use clustering::{Algorithm, CrispClustering, RoughClustering, RoughParams};
pub use experiment::{
    compare, run_experiment, ExperimentConfig, ExperimentError, ExperimentOutcome,
};
pub use fuzzysoft::{MembershipKind, MembershipMatrix};
pub use genefilter::{DiscretizationSpec, GeneRanking};
pub use ingest::{ClassLabels, ExpressionMatrix};
pub use validity::ValidityReport;
