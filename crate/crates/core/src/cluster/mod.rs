//! TF-IDF weighting, k-means with elbow selection of k, and cluster summaries.

mod elbow;
mod kmeans;
mod matrix;
mod tfidf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::textprep::Vocabulary;

pub use elbow::{elbow_curve, select_elbow, ElbowCurve};
pub use kmeans::{kmeans, ClusterModel, KMeansOptions};
pub use matrix::{FeatureMatrix, WeightedMatrix};
pub use tfidf::tfidf;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ClusterError {
    #[error("matrix has no rows")]
    EmptyMatrix,
    #[error("k = {k} but only {rows} non-empty rows")]
    KTooLarge { k: usize, rows: usize },
    #[error("invalid k range {k_min}..={k_max}")]
    InvalidKRange { k_min: usize, k_max: usize },
    #[error("malformed elbow CSV at line {line}")]
    Csv { line: usize },
}

/// The `n` heaviest centroid terms of every cluster, heaviest first, equal
/// weights in vocabulary (lexicographic) order.
pub fn cluster_top_terms(model: &ClusterModel, vocab: &Vocabulary, n: usize) -> Vec<Vec<(String, f64)>> {
    model
        .centroids
        .iter()
        .map(|c| {
            let mut ids: Vec<usize> = (0..c.len()).collect();
            ids.sort_by(|&a, &b| c[b].total_cmp(&c[a]).then(a.cmp(&b)));
            ids.into_iter()
                .take(n)
                .map(|t| (vocab.term(t).to_owned(), c[t]))
                .collect()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterSummary {
    pub cluster: usize,
    pub size: usize,
    pub top_terms: Vec<(String, f64)>,
    pub inertia_share: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterReport {
    pub k: usize,
    pub seed: u64,
    pub inertia: f64,
    pub iterations_run: usize,
    pub clusters: Vec<ClusterSummary>,
}

impl ClusterReport {
    pub fn new(model: &ClusterModel, matrix: &FeatureMatrix, vocab: &Vocabulary, n_terms: usize) -> Self {
        let sizes = model.cluster_sizes();
        let per = model.cluster_inertia(matrix);
        let total: f64 = per.iter().sum();
        let tops = cluster_top_terms(model, vocab, n_terms);
        let clusters = tops
            .into_iter()
            .enumerate()
            .map(|(c, top_terms)| ClusterSummary {
                cluster: c,
                size: sizes[c],
                top_terms,
                inertia_share: if total > 0.0 { per[c] / total } else { 0.0 },
            })
            .collect();
        ClusterReport {
            k: model.k,
            seed: model.seed,
            inertia: model.inertia,
            iterations_run: model.iterations_run,
            clusters,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
