use super::{ClusterError, FeatureMatrix, WeightedMatrix};
use crate::textprep::DocumentTermMatrix;

/// TF-IDF weights with L2-normalized rows.
///
/// `w(d,t) = count(d,t) * (1 + ln(N / df(t)))`, where `N` is the number of
/// documents and `df(t)` the number of documents containing `t`. A term
/// present in every document keeps its raw count before normalization.
/// Documents without terms stay all-zero.
pub fn tfidf(dtm: &DocumentTermMatrix) -> Result<WeightedMatrix, ClusterError> {
    if dtm.n_docs() == 0 {
        return Err(ClusterError::EmptyMatrix);
    }
    let n = dtm.n_docs() as f64;
    let idf: Vec<f64> = dtm
        .document_frequencies()
        .into_iter()
        .map(|df| if df == 0 { 0.0 } else { 1.0 + (n / df as f64).ln() })
        .collect();
    let rows = (0..dtm.n_docs())
        .map(|d| {
            let mut row: Vec<(usize, f64)> = dtm.row(d).map(|(t, c)| (t, c as f64 * idf[t])).collect();
            let norm = row.iter().map(|(_, w)| w * w).sum::<f64>().sqrt();
            if norm > 0.0 {
                for (_, w) in &mut row {
                    *w /= norm;
                }
            }
            row
        })
        .collect();
    Ok(WeightedMatrix(FeatureMatrix::from_sparse_rows(rows, dtm.n_terms())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dtm(rows: &[&[(usize, u32)]], n_terms: usize) -> DocumentTermMatrix {
        DocumentTermMatrix::from_rows(rows.iter().map(|r| (2000, r.to_vec())).collect(), n_terms)
    }

    #[test]
    fn single_entry_normalizes_to_one() {
        let w = tfidf(&dtm(&[&[(0, 5)]], 1)).unwrap();
        assert_eq!(w.to_dense(), vec![vec![1.0]]);
    }

    #[test]
    fn ubiquitous_term_is_pure_tf() {
        // term 0 in both docs (idf 1), term 1 in one (idf 1 + ln 2)
        let w = tfidf(&dtm(&[&[(0, 3), (1, 1)], &[(0, 2)]], 2)).unwrap();
        let raw = [3.0, 1.0 + 2f64.ln()];
        let norm = (raw[0] * raw[0] + raw[1] * raw[1]).sqrt();
        let row = &w.to_dense()[0];
        assert!((row[0] - raw[0] / norm).abs() < 1e-15);
        assert!((row[1] - raw[1] / norm).abs() < 1e-15);
        assert_eq!(w.to_dense()[1], vec![1.0, 0.0]);
    }

    #[test]
    fn empty_row_stays_zero() {
        let w = tfidf(&dtm(&[&[], &[(0, 1)]], 1)).unwrap();
        assert!(w.is_zero_row(0));
        assert_eq!(w.nonzero_rows(), 1);
    }

    #[test]
    fn empty_matrix_rejected() {
        assert!(matches!(tfidf(&dtm(&[], 0)), Err(ClusterError::EmptyMatrix)));
    }
}
