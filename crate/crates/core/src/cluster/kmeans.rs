use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ClusterError, FeatureMatrix};

/// Restart and iteration budget shared by [`kmeans`] and
/// [`super::elbow_curve`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KMeansOptions {
    pub restarts: usize,
    pub max_iter: usize,
}

impl Default for KMeansOptions {
    fn default() -> Self {
        KMeansOptions {
            restarts: 10,
            max_iter: 300,
        }
    }
}

/// Result of the best restart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterModel {
    pub k: usize,
    pub centroids: Vec<Vec<f64>>,
    pub assignment: Vec<usize>,
    pub inertia: f64,
    pub seed: u64,
    pub iterations_run: usize,
    /// Inertia after the assignment step of every Lloyd iteration.
    pub inertia_trace: Vec<f64>,
}

impl ClusterModel {
    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &a in &self.assignment {
            sizes[a] += 1;
        }
        sizes
    }

    /// Within-cluster sum of squares of each cluster, recomputed.
    pub fn cluster_inertia(&self, matrix: &FeatureMatrix) -> Vec<f64> {
        let norms: Vec<f64> = self.centroids.iter().map(|c| dot(c, c)).collect();
        let mut out = vec![0.0; self.k];
        for (d, &a) in self.assignment.iter().enumerate() {
            out[a] += sq_dist(matrix, d, &self.centroids[a], norms[a]);
        }
        out
    }

    /// Nearest centroid of row `d`, ties to the lowest id.
    pub fn nearest(&self, matrix: &FeatureMatrix, d: usize) -> usize {
        let norms: Vec<f64> = self.centroids.iter().map(|c| dot(c, c)).collect();
        nearest(matrix, d, &self.centroids, &norms).0
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Squared distance between sparse row `d` and a dense centroid whose
/// squared norm is `c_norm`.
fn sq_dist(m: &FeatureMatrix, d: usize, c: &[f64], c_norm: f64) -> f64 {
    let mut acc = c_norm;
    for (j, x) in m.row(d) {
        acc += x * x - 2.0 * x * c[j];
    }
    acc.max(0.0)
}

fn nearest(m: &FeatureMatrix, d: usize, centroids: &[Vec<f64>], norms: &[f64]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (k, c) in centroids.iter().enumerate() {
        let dist = sq_dist(m, d, c, norms[k]);
        if dist < best.1 {
            best = (k, dist);
        }
    }
    best
}

fn dense_row(m: &FeatureMatrix, d: usize) -> Vec<f64> {
    let mut r = vec![0.0; m.n_cols()];
    for (j, x) in m.row(d) {
        r[j] = x;
    }
    r
}

/// k-means++ seeding: first centre uniform, then each next centre drawn with
/// probability proportional to the squared distance to the nearest chosen one.
fn plus_plus_init(m: &FeatureMatrix, k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n = m.n_rows();
    let mut centroids = vec![dense_row(m, rng.random_range(0..n))];
    let mut d2: Vec<f64> = (0..n)
        .map(|d| sq_dist(m, d, &centroids[0], dot(&centroids[0], &centroids[0])))
        .collect();
    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut chosen = None;
            for (d, &w) in d2.iter().enumerate() {
                acc += w;
                if w > 0.0 && acc > target {
                    chosen = Some(d);
                    break;
                }
            }
            // rounding can leave `target` just above the final sum
            chosen.unwrap_or_else(|| d2.iter().rposition(|&w| w > 0.0).expect("positive total"))
        } else {
            rng.random_range(0..n)
        };
        let c = dense_row(m, pick);
        let norm = dot(&c, &c);
        for (d, slot) in d2.iter_mut().enumerate() {
            *slot = slot.min(sq_dist(m, d, &c, norm));
        }
        centroids.push(c);
    }
    centroids
}

fn lloyd(m: &FeatureMatrix, k: usize, seed: u64, stream: u64, max_iter: usize) -> ClusterModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut centroids = plus_plus_init(m, k, &mut rng);
    let n = m.n_rows();
    let mut assignment = vec![usize::MAX; n];
    let mut trace = Vec::new();
    let mut iterations = 0;
    loop {
        let norms: Vec<f64> = centroids.iter().map(|c| dot(c, c)).collect();
        let assigned: Vec<(usize, f64)> = (0..n).map(|d| nearest(m, d, &centroids, &norms)).collect();
        let inertia = assigned.iter().map(|a| a.1).sum::<f64>();
        let changed = assigned.iter().zip(&assignment).any(|(a, &old)| a.0 != old);
        if let Some(&prev) = trace.last() {
            debug_assert!(inertia <= prev + 1e-9 * (1.0 + prev), "inertia rose: {prev} -> {inertia}");
        }
        trace.push(inertia);
        for (slot, a) in assignment.iter_mut().zip(&assigned) {
            *slot = a.0;
        }
        iterations += 1;
        if !changed || iterations >= max_iter {
            return ClusterModel {
                k,
                centroids,
                assignment,
                inertia,
                seed,
                iterations_run: iterations,
                inertia_trace: trace,
            };
        }
        centroids = update_centroids(m, k, &assignment);
    }
}

/// Means of the assigned rows. A cluster left empty is moved onto the row
/// farthest from its own new centroid.
fn update_centroids(m: &FeatureMatrix, k: usize, assignment: &[usize]) -> Vec<Vec<f64>> {
    let mut sums = vec![vec![0.0; m.n_cols()]; k];
    let mut counts = vec![0usize; k];
    for (d, &a) in assignment.iter().enumerate() {
        counts[a] += 1;
        for (j, x) in m.row(d) {
            sums[a][j] += x;
        }
    }
    for (s, &c) in sums.iter_mut().zip(&counts) {
        if c > 0 {
            let inv = 1.0 / c as f64;
            s.iter_mut().for_each(|v| *v *= inv);
        }
    }
    if counts.contains(&0) {
        let norms: Vec<f64> = sums.iter().map(|c| dot(c, c)).collect();
        let mut far: Vec<(usize, f64)> = assignment
            .iter()
            .enumerate()
            .map(|(d, &a)| (d, sq_dist(m, d, &sums[a], norms[a])))
            .collect();
        far.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        let mut far = far.into_iter();
        for c in 0..k {
            if counts[c] == 0 {
                if let Some((d, _)) = far.next() {
                    sums[c] = dense_row(m, d);
                }
            }
        }
    }
    sums
}

/// Lloyd's algorithm with k-means++ seeding, best of `opts.restarts` runs.
///
/// Restart `r` draws from a ChaCha8 stream `r` keyed by `seed`, so each
/// restart is reproducible on its own and the restarts can run in parallel.
/// The lowest inertia wins, ties going to the lower restart index.
pub fn kmeans(matrix: &FeatureMatrix, k: usize, seed: u64, opts: KMeansOptions) -> Result<ClusterModel, ClusterError> {
    if matrix.n_rows() == 0 {
        return Err(ClusterError::EmptyMatrix);
    }
    let available = matrix.nonzero_rows();
    if k == 0 || k > available {
        return Err(ClusterError::KTooLarge { k, rows: available });
    }
    let restarts = opts.restarts.max(1);
    let runs: Vec<ClusterModel> = (0..restarts as u64)
        .into_par_iter()
        .map(|r| lloyd(matrix, k, seed, r, opts.max_iter.max(1)))
        .collect();
    let best = runs
        .into_iter()
        .enumerate()
        .min_by(|a, b| a.1.inertia.total_cmp(&b.1.inertia).then(a.0.cmp(&b.0)))
        .map(|(_, m)| m)
        .expect("at least one restart");
    Ok(best)
}
