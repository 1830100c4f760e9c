use std::ops::Deref;

/// Real-valued sparse rows in compressed-row form. This is the input space
/// of k-means: TF-IDF document vectors, or any dense points converted with
/// [`FeatureMatrix::from_dense`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FeatureMatrix {
    row_offsets: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
    n_cols: usize,
}

impl FeatureMatrix {
    /// Rows of `(column, value)` pairs. Zero values are dropped; columns must
    /// be strictly ascending within a row.
    pub fn from_sparse_rows(rows: Vec<Vec<(usize, f64)>>, n_cols: usize) -> Self {
        let mut m = FeatureMatrix {
            row_offsets: vec![0],
            n_cols,
            ..Default::default()
        };
        for row in rows {
            let mut prev = None;
            for (c, v) in row {
                assert!(c < n_cols, "column {c} out of range {n_cols}");
                assert!(prev.is_none_or(|p| p < c), "columns must ascend");
                prev = Some(c);
                if v != 0.0 {
                    m.cols.push(c);
                    m.vals.push(v);
                }
            }
            m.row_offsets.push(m.cols.len());
        }
        m
    }

    pub fn from_dense(rows: &[Vec<f64>]) -> Self {
        let n_cols = rows.first().map_or(0, Vec::len);
        let sparse = rows
            .iter()
            .map(|r| {
                assert_eq!(r.len(), n_cols, "ragged dense rows");
                r.iter().copied().enumerate().collect()
            })
            .collect();
        Self::from_sparse_rows(sparse, n_cols)
    }

    pub fn n_rows(&self) -> usize {
        self.row_offsets.len() - 1
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_offsets[i]..self.row_offsets[i + 1];
        self.cols[span.clone()].iter().copied().zip(self.vals[span].iter().copied())
    }

    pub fn row_norm_sq(&self, i: usize) -> f64 {
        self.row(i).map(|(_, v)| v * v).sum()
    }

    pub fn is_zero_row(&self, i: usize) -> bool {
        self.row_offsets[i] == self.row_offsets[i + 1]
    }

    pub fn nonzero_rows(&self) -> usize {
        (0..self.n_rows()).filter(|&i| !self.is_zero_row(i)).count()
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        (0..self.n_rows())
            .map(|i| {
                let mut r = vec![0.0; self.n_cols];
                for (c, v) in self.row(i) {
                    r[c] = v;
                }
                r
            })
            .collect()
    }

    /// Every entry multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        for v in &mut out.vals {
            *v *= factor;
        }
        out
    }
}

/// A [`FeatureMatrix`] whose nonzero rows have unit Euclidean norm and whose
/// entries are non-negative. Only [`super::tfidf`] constructs one.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedMatrix(pub(super) FeatureMatrix);

impl Deref for WeightedMatrix {
    type Target = FeatureMatrix;

    fn deref(&self) -> &FeatureMatrix {
        &self.0
    }
}

impl WeightedMatrix {
    pub fn into_inner(self) -> FeatureMatrix {
        self.0
    }
}
