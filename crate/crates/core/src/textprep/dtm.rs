use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use super::TokenDoc;

/// Sorted, deduplicated stems with a reverse index.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    terms: Vec<String>,
    index: HashMap<String, usize>,
}

impl Vocabulary {
    /// Builds a vocabulary from any stems; order is lexicographic.
    pub fn from_terms<I, S>(terms: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let sorted: BTreeSet<String> = terms.into_iter().map(Into::into).collect();
        let terms: Vec<String> = sorted.into_iter().collect();
        let index = terms.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        Vocabulary { terms, index }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term(&self, id: usize) -> &str {
        &self.terms[id]
    }

    pub fn id(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    /// Sidecar text: one term per line, line `i` (1-based) is column `i`
    /// of the MatrixMarket export.
    pub fn to_text(&self) -> String {
        self.terms.iter().map(|t| format!("{t}\n")).collect()
    }
}

/// Sparse document-by-term count matrix in compressed-row form.
///
/// Rows are documents in input order; columns are vocabulary ids. Only
/// positive counts are stored, with column ids ascending inside each row.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DocumentTermMatrix {
    row_offsets: Vec<usize>,
    cols: Vec<usize>,
    counts: Vec<u32>,
    row_year: Vec<i32>,
    n_terms: usize,
}

impl DocumentTermMatrix {
    /// Assembles a matrix from per-row `(term, count)` lists. Zero counts are
    /// dropped and duplicate columns summed.
    pub fn from_rows(rows: Vec<(i32, Vec<(usize, u32)>)>, n_terms: usize) -> Self {
        let mut m = DocumentTermMatrix {
            row_offsets: vec![0],
            n_terms,
            ..Default::default()
        };
        for (year, entries) in rows {
            let mut merged: BTreeMap<usize, u32> = BTreeMap::new();
            for (t, c) in entries {
                assert!(t < n_terms, "column {t} out of range {n_terms}");
                *merged.entry(t).or_default() += c;
            }
            for (t, c) in merged.into_iter().filter(|&(_, c)| c > 0) {
                m.cols.push(t);
                m.counts.push(c);
            }
            m.row_offsets.push(m.cols.len());
            m.row_year.push(year);
        }
        m
    }

    pub fn n_docs(&self) -> usize {
        self.row_year.len()
    }

    pub fn n_terms(&self) -> usize {
        self.n_terms
    }

    pub fn nnz(&self) -> usize {
        self.cols.len()
    }

    pub fn row_year(&self, doc: usize) -> i32 {
        self.row_year[doc]
    }

    pub fn years(&self) -> &[i32] {
        &self.row_year
    }

    /// `(term, count)` pairs of one document, term ids ascending.
    pub fn row(&self, doc: usize) -> impl Iterator<Item = (usize, u32)> + '_ {
        let span = self.row_offsets[doc]..self.row_offsets[doc + 1];
        self.cols[span.clone()].iter().copied().zip(self.counts[span].iter().copied())
    }

    pub fn get(&self, doc: usize, term: usize) -> u32 {
        let span = self.row_offsets[doc]..self.row_offsets[doc + 1];
        match self.cols[span.clone()].binary_search(&term) {
            Ok(i) => self.counts[span.start + i],
            Err(_) => 0,
        }
    }

    /// Token count of one document.
    pub fn row_sum(&self, doc: usize) -> u64 {
        self.row(doc).map(|(_, c)| c as u64).sum()
    }

    /// Corpus frequency of every term.
    pub fn column_sums(&self) -> Vec<u64> {
        let mut sums = vec![0u64; self.n_terms];
        for (&t, &c) in self.cols.iter().zip(&self.counts) {
            sums[t] += c as u64;
        }
        sums
    }

    /// Number of documents containing every term.
    pub fn document_frequencies(&self) -> Vec<usize> {
        let mut df = vec![0usize; self.n_terms];
        for &t in &self.cols {
            df[t] += 1;
        }
        df
    }

    pub fn total_count(&self) -> u64 {
        self.counts.iter().map(|&c| c as u64).sum()
    }

    pub fn nonzero_rows(&self) -> usize {
        (0..self.n_docs()).filter(|&d| self.row_offsets[d + 1] > self.row_offsets[d]).count()
    }

    pub fn to_dense(&self) -> Vec<Vec<u32>> {
        (0..self.n_docs())
            .map(|d| {
                let mut row = vec![0; self.n_terms];
                for (t, c) in self.row(d) {
                    row[t] = c;
                }
                row
            })
            .collect()
    }

    /// MatrixMarket coordinate export. Indices are 1-based as the format
    /// requires; each data line reads `doc_id term_id count`.
    pub fn to_matrix_market(&self) -> String {
        let mut out = String::new();
        out.push_str("%%MatrixMarket matrix coordinate integer general\n");
        out.push_str("% rows: documents, columns: vocabulary terms (see vocabulary sidecar)\n");
        let _ = writeln!(out, "{} {} {}", self.n_docs(), self.n_terms, self.nnz());
        for d in 0..self.n_docs() {
            for (t, c) in self.row(d) {
                let _ = writeln!(out, "{} {} {}", d + 1, t + 1, c);
            }
        }
        out
    }
}

/// Counts stems per document over a lexicographic vocabulary of every stem
/// that occurs at least once.
pub fn build_dtm(docs: &[TokenDoc]) -> (Vocabulary, DocumentTermMatrix) {
    let vocab = Vocabulary::from_terms(docs.iter().flat_map(|d| d.stems.iter().cloned()));
    let rows = docs
        .iter()
        .map(|d| {
            let entries = d
                .stems
                .iter()
                .map(|s| (vocab.id(s).expect("stem is in vocabulary"), 1u32))
                .collect();
            (d.year, entries)
        })
        .collect();
    let dtm = DocumentTermMatrix::from_rows(rows, vocab.len());
    (vocab, dtm)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(id: usize, text: &str) -> TokenDoc {
        TokenDoc {
            doc_id: id,
            year: 2000,
            stems: text.split_whitespace().map(String::from).collect(),
        }
    }

    #[test]
    fn two_document_example() {
        let (vocab, dtm) = build_dtm(&[doc(0, "a b a"), doc(1, "b c")]);
        assert_eq!(vocab.terms(), ["a", "b", "c"]);
        assert_eq!(dtm.to_dense(), vec![vec![2, 1, 0], vec![0, 1, 1]]);
        assert_eq!(dtm.nnz(), 4);
        assert_eq!(dtm.get(0, 2), 0);
        assert_eq!(dtm.column_sums(), vec![2, 2, 1]);
        assert_eq!(dtm.document_frequencies(), vec![1, 2, 1]);
    }

    #[test]
    fn empty_input() {
        let (vocab, dtm) = build_dtm(&[]);
        assert!(vocab.is_empty());
        assert_eq!((dtm.n_docs(), dtm.n_terms()), (0, 0));
    }

    #[test]
    fn empty_document_keeps_row() {
        let (_, dtm) = build_dtm(&[doc(0, ""), doc(1, "x")]);
        assert_eq!(dtm.n_docs(), 2);
        assert_eq!(dtm.row_sum(0), 0);
        assert_eq!(dtm.nonzero_rows(), 1);
    }

    #[test]
    fn matrix_market_layout() {
        let (vocab, dtm) = build_dtm(&[doc(0, "a b a"), doc(1, "b c")]);
        let mm = dtm.to_matrix_market();
        let lines: Vec<&str> = mm.lines().collect();
        assert_eq!(lines[0], "%%MatrixMarket matrix coordinate integer general");
        assert_eq!(lines[2], "2 3 4");
        assert_eq!(&lines[3..], ["1 1 2", "1 2 1", "2 2 1", "2 3 1"]);
        assert_eq!(vocab.to_text(), "a\nb\nc\n");
    }
}
