use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

use super::{kmeans, ClusterError, ClusterModel, FeatureMatrix, KMeansOptions};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElbowCurve {
    /// `(k, inertia)` with k strictly increasing.
    pub points: Vec<(usize, f64)>,
    pub selected_k: usize,
}

impl ElbowCurve {
    pub fn inertia_at(&self, k: usize) -> Option<f64> {
        self.points.iter().find(|p| p.0 == k).map(|p| p.1)
    }

    /// `k,inertia,selected` with `selected` 1 on the chosen row, 0 elsewhere.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,inertia,selected\n");
        for &(k, inertia) in &self.points {
            let _ = writeln!(out, "{k},{inertia},{}", u8::from(k == self.selected_k));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self, ClusterError> {
        let mut reader = csv::ReaderBuilder::new().from_reader(text.as_bytes());
        let mut points = Vec::new();
        let mut selected = None;
        for (i, row) in reader.records().enumerate() {
            let bad = || ClusterError::Csv { line: i + 2 };
            let row = row.map_err(|_| bad())?;
            let k: usize = row.get(0).and_then(|s| s.parse().ok()).ok_or_else(bad)?;
            let inertia: f64 = row.get(1).and_then(|s| s.parse().ok()).ok_or_else(bad)?;
            if row.get(2) == Some("1") {
                selected = Some(k);
            }
            points.push((k, inertia));
        }
        Ok(ElbowCurve {
            points,
            selected_k: selected.ok_or(ClusterError::Csv { line: 0 })?,
        })
    }
}

/// Picks the point farthest from the chord joining the first and last
/// points. Distances within `1e-9` of the best (relative to the curve's
/// scale) count as ties and go to the smaller k.
///
/// ```
/// use scitrend::cluster::select_elbow;
/// let curve = [(1, 100.0), (2, 30.0), (3, 20.0), (4, 15.0), (5, 12.0)];
/// assert_eq!(select_elbow(&curve), 2);
/// ```
pub fn select_elbow(points: &[(usize, f64)]) -> usize {
    let (Some(&(x0, y0)), Some(&(x1, y1))) = (points.first(), points.last()) else {
        panic!("elbow selection needs at least one point");
    };
    let (x0, x1) = (x0 as f64, x1 as f64);
    let (dx, dy) = (x1 - x0, y1 - y0);
    let len = (dx * dx + dy * dy).sqrt();
    if len == 0.0 {
        return points[0].0;
    }
    let dist = |&(k, y): &(usize, f64)| ((dx * (y - y0) - (k as f64 - x0) * dy) / len).abs();
    let scale = points.iter().map(|p| p.1.abs()).fold(dx.abs(), f64::max);
    let best = points.iter().map(dist).fold(0.0, f64::max);
    points
        .iter()
        .find(|p| dist(p) >= best - 1e-9 * scale)
        .map(|p| p.0)
        .expect("the maximum is attained")
}

/// Runs [`kmeans`] for every k in `k_min..=k_max` (in parallel) and selects
/// the elbow. All runs share `seed`.
pub fn elbow_curve(
    matrix: &FeatureMatrix,
    k_min: usize,
    k_max: usize,
    seed: u64,
    opts: KMeansOptions,
) -> Result<(ElbowCurve, Vec<ClusterModel>), ClusterError> {
    if k_min == 0 || k_min >= k_max {
        return Err(ClusterError::InvalidKRange { k_min, k_max });
    }
    let models = (k_min..=k_max)
        .into_par_iter()
        .map(|k| kmeans(matrix, k, seed, opts))
        .collect::<Result<Vec<_>, _>>()?;
    let points: Vec<(usize, f64)> = models.iter().map(|m| (m.k, m.inertia)).collect();
    let selected_k = select_elbow(&points);
    Ok((ElbowCurve { points, selected_k }, models))
}
