//! Clustering, classification and stability scores for learned coordinates.

mod classify;
mod kmeans;
mod mutual_info;
mod stability;
mod sweep;

pub use classify::{
    classify, classify_splits, f1_scores, mean_scores, stratified_split, ClassificationReport, OneVsRest,
    DEFAULT_L2,
};
pub use kmeans::{kmeans, KMeansResult};
pub use mutual_info::mutual_info_scores;
pub use stability::{align_columns, permutations, stability_relative_change};
pub use sweep::{epsilon_sensitivity_sweep, EpsilonRow, SplitProtocol};

use serde::Serialize;

use crate::error::Result;
use crate::linalg::Matrix;

/// k-means restarts used by [`cluster_report`].
pub const DEFAULT_RESTARTS: usize = 10;

/// k-means on coordinates scored against ground truth.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClusteringReport {
    pub assignments: Vec<usize>,
    pub ami: f64,
    pub nmi: f64,
}

pub fn cluster_report(
    coordinates: &Matrix,
    truth: &[usize],
    k: usize,
    seed: u64,
) -> Result<ClusteringReport> {
    let km = kmeans(coordinates, k, seed, DEFAULT_RESTARTS)?;
    let (ami, nmi) = mutual_info_scores(&km.assignments, truth)?;
    Ok(ClusteringReport {
        assignments: km.assignments,
        ami,
        nmi,
    })
}
