//! Year histograms, corpus term-frequency tables and per-group year series.

use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use thiserror::Error;

use crate::ingest::{YearRange, YearSlice};
use crate::textprep::{DocumentTermMatrix, Vocabulary};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TrendError {
    #[error("{assignments} group assignments for {docs} documents")]
    MissingAssignment { assignments: usize, docs: usize },
    #[error("malformed CSV at line {line}: {reason}")]
    Csv { line: usize, reason: String },
}

/// A labelled series over consecutive years.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YearSeries {
    pub label: String,
    pub points: Vec<(i32, f64)>,
}

impl YearSeries {
    pub fn total(&self) -> f64 {
        self.points.iter().map(|p| p.1).sum()
    }

    pub fn max_point(&self) -> Option<(i32, f64)> {
        self.points
            .iter()
            .copied()
            .fold(None, |best, p| match best {
                Some((_, v)) if v >= p.1 => best,
                _ => Some(p),
            })
    }

    /// `year,value` lines under a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("year,value\n");
        for (y, v) in &self.points {
            let _ = writeln!(out, "{y},{v}");
        }
        out
    }

    pub fn from_csv(label: &str, text: &str) -> Result<Self, TrendError> {
        let mut reader = csv::ReaderBuilder::new().from_reader(text.as_bytes());
        let mut points = Vec::new();
        for (i, row) in reader.records().enumerate() {
            let line = i + 2;
            let row = row.map_err(|e| TrendError::Csv { line, reason: e.to_string() })?;
            let parse_err = |what: &str| TrendError::Csv {
                line,
                reason: format!("bad {what}"),
            };
            let year = row.get(0).and_then(|s| s.parse().ok()).ok_or_else(|| parse_err("year"))?;
            let value = row.get(1).and_then(|s| s.parse().ok()).ok_or_else(|| parse_err("value"))?;
            points.push((year, value));
        }
        Ok(YearSeries {
            label: label.to_owned(),
            points,
        })
    }
}

/// Documents per year over the slice's full range, zero-filled.
pub fn year_histogram(slice: &YearSlice) -> YearSeries {
    let years: Vec<i32> = slice.records.iter().map(|r| r.year).collect();
    histogram_over(&slice.label, &years, slice.range)
}

fn histogram_over(label: &str, years: &[i32], range: YearRange) -> YearSeries {
    let mut counts = vec![0u64; range.len()];
    for &y in years {
        if range.contains(y) {
            counts[(y - range.start) as usize] += 1;
        }
    }
    YearSeries {
        label: label.to_owned(),
        points: counts
            .into_iter()
            .enumerate()
            .map(|(i, c)| (range.start + i as i32, c as f64))
            .collect(),
    }
}

/// Stems ranked by corpus frequency, descending, ties lexicographic.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermFrequencyTable {
    pub rows: Vec<(String, u64)>,
}

impl TermFrequencyTable {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// `rank,stem,count` with 1-based ranks.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("rank,stem,count\n");
        for (i, (s, c)) in self.rows.iter().enumerate() {
            let _ = writeln!(out, "{},{s},{c}", i + 1);
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self, TrendError> {
        let mut reader = csv::ReaderBuilder::new().from_reader(text.as_bytes());
        let mut rows = Vec::new();
        for (i, row) in reader.records().enumerate() {
            let line = i + 2;
            let row = row.map_err(|e| TrendError::Csv { line, reason: e.to_string() })?;
            let stem = row.get(1).ok_or(TrendError::Csv { line, reason: "missing stem".into() })?;
            let count = row
                .get(2)
                .and_then(|s| s.parse().ok())
                .ok_or(TrendError::Csv { line, reason: "bad count".into() })?;
            rows.push((stem.to_owned(), count));
        }
        Ok(TermFrequencyTable { rows })
    }
}

/// The `n` most frequent stems. Returns the whole table when `n` exceeds the
/// vocabulary.
pub fn top_terms(dtm: &DocumentTermMatrix, vocab: &Vocabulary, n: usize) -> TermFrequencyTable {
    ranked(dtm.column_sums(), vocab, n)
}

/// [`top_terms`] restricted to the documents in `docs`.
pub fn top_terms_in(dtm: &DocumentTermMatrix, vocab: &Vocabulary, docs: &[usize], n: usize) -> TermFrequencyTable {
    let mut sums = vec![0u64; dtm.n_terms()];
    for &d in docs {
        for (t, c) in dtm.row(d) {
            sums[t] += u64::from(c);
        }
    }
    ranked(sums, vocab, n)
}

fn ranked(sums: Vec<u64>, vocab: &Vocabulary, n: usize) -> TermFrequencyTable {
    let mut rows: Vec<(String, u64)> = sums
        .into_iter()
        .enumerate()
        .filter(|&(_, c)| c > 0)
        .map(|(t, c)| (vocab.term(t).to_owned(), c))
        .collect();
    // vocabulary ids are lexicographic, so a stable sort on count alone
    // already breaks ties by stem
    rows.sort_by(|a, b| b.1.cmp(&a.1));
    rows.truncate(n);
    TermFrequencyTable { rows }
}

/// One series per group: the number of documents of that group published in
/// each year of `range`. Groups are `0..=max(assignments)`; documents outside
/// the range are not counted.
pub fn group_year_trend(
    assignments: &[usize],
    years: &[i32],
    range: YearRange,
) -> Result<Vec<YearSeries>, TrendError> {
    if assignments.len() != years.len() {
        return Err(TrendError::MissingAssignment {
            assignments: assignments.len(),
            docs: years.len(),
        });
    }
    let n_groups = assignments.iter().max().map_or(0, |&g| g + 1);
    let mut per_group: Vec<Vec<i32>> = vec![Vec::new(); n_groups];
    for (&g, &y) in assignments.iter().zip(years) {
        per_group[g].push(y);
    }
    Ok(per_group
        .iter()
        .enumerate()
        .map(|(g, ys)| histogram_over(&format!("group{g}"), ys, range))
        .collect())
}

/// Several series sharing one year axis as a wide CSV: `year,<label>...`.
pub fn series_table_csv(series: &[YearSeries]) -> String {
    let mut out = String::from("year");
    for s in series {
        out.push(',');
        out.push_str(&s.label);
    }
    out.push('\n');
    let len = series.iter().map(|s| s.points.len()).max().unwrap_or(0);
    for i in 0..len {
        let year = series.iter().find_map(|s| s.points.get(i).map(|p| p.0));
        let Some(year) = year else { continue };
        let _ = write!(out, "{year}");
        for s in series {
            let v = s.points.get(i).map_or(0.0, |p| p.1);
            let _ = write!(out, ",{v}");
        }
        out.push('\n');
    }
    out
}
