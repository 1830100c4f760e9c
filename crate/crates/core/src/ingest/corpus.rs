use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use super::{BibRecord, IngestError};

/// Records parsed from one exported file.
#[derive(Debug, Clone, Default)]
pub struct Shard {
    pub name: String,
    pub records: Vec<BibRecord>,
}

impl Shard {
    pub fn new(name: impl Into<String>, records: Vec<BibRecord>) -> Self {
        Shard {
            name: name.into(),
            records,
        }
    }
}

/// The merged, deduplicated record set.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    pub records: Vec<BibRecord>,
    pub provenance: Vec<String>,
    pub dedup_count: usize,
}

/// Concatenates shards in order, dropping any record whose
/// (normalized title, year) was already seen. The first occurrence wins.
pub fn merge_and_dedup(shards: Vec<Shard>) -> Corpus {
    let mut seen = HashSet::new();
    let mut corpus = Corpus::default();
    for shard in shards {
        corpus.provenance.push(shard.name);
        for rec in shard.records {
            if seen.insert((rec.normalized_title(), rec.year)) {
                corpus.records.push(rec);
            } else {
                corpus.dedup_count += 1;
            }
        }
    }
    corpus
}

/// An inclusive range of publication years.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct YearRange {
    pub start: i32,
    pub end: i32,
}

impl YearRange {
    pub const fn new(start: i32, end: i32) -> Self {
        YearRange { start, end }
    }

    pub fn contains(&self, year: i32) -> bool {
        self.start <= year && year <= self.end
    }

    pub fn label(&self) -> String {
        self.to_string()
    }

    /// Number of calendar years covered.
    pub fn len(&self) -> usize {
        (self.end - self.start + 1).max(0) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.end < self.start
    }

    /// The three year slots used for the journal study this crate was built for.
    pub fn default_slots() -> Vec<YearRange> {
        vec![
            YearRange::new(1961, 1990),
            YearRange::new(1991, 2010),
            YearRange::new(2011, 2017),
        ]
    }
}

impl fmt::Display for YearRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.start, self.end)
    }
}

impl FromStr for YearRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s
            .split_once('-')
            .ok_or_else(|| format!("expected START-END, got '{s}'"))?;
        let start = a.trim().parse().map_err(|_| format!("bad start year in '{s}'"))?;
        let end = b.trim().parse().map_err(|_| format!("bad end year in '{s}'"))?;
        Ok(YearRange { start, end })
    }
}

/// Records whose year falls inside one range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct YearSlice {
    pub label: String,
    pub range: YearRange,
    pub records: Vec<BibRecord>,
}

impl YearSlice {
    pub fn new(range: YearRange, records: Vec<BibRecord>) -> Self {
        YearSlice {
            label: range.label(),
            range,
            records,
        }
    }

    pub fn start_year(&self) -> i32 {
        self.range.start
    }

    pub fn end_year(&self) -> i32 {
        self.range.end
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub slices: Vec<YearSlice>,
    /// Records outside every range.
    pub unsliced: Vec<BibRecord>,
}

impl Partition {
    pub fn unsliced_count(&self) -> usize {
        self.unsliced.len()
    }
}

/// Splits the corpus into year slices. Boundaries must be sorted and
/// non-overlapping; record order within a slice follows corpus order.
pub fn partition_by_year(corpus: &Corpus, boundaries: &[YearRange]) -> Result<Partition, IngestError> {
    for r in boundaries {
        if r.start > r.end {
            return Err(IngestError::InvalidRange(*r));
        }
    }
    for pair in boundaries.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if b.start <= a.end && a.start <= b.end {
            return Err(IngestError::OverlappingBoundaries { first: a, second: b });
        }
        if b.start < a.start {
            return Err(IngestError::UnsortedBoundaries { first: a, second: b });
        }
    }
    let mut buckets: Vec<Vec<BibRecord>> = vec![Vec::new(); boundaries.len()];
    let mut unsliced = Vec::new();
    for rec in &corpus.records {
        // sorted, disjoint ranges: binary search on the start year
        let idx = boundaries.partition_point(|r| r.start <= rec.year);
        match idx.checked_sub(1) {
            Some(i) if boundaries[i].contains(rec.year) => buckets[i].push(rec.clone()),
            _ => unsliced.push(rec.clone()),
        }
    }
    Ok(Partition {
        slices: boundaries
            .iter()
            .zip(buckets)
            .map(|(range, records)| YearSlice::new(*range, records))
            .collect(),
        unsliced,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(key: &str, title: &str, year: i32) -> BibRecord {
        BibRecord {
            key: key.into(),
            authors: vec![],
            title: title.into(),
            abstract_text: String::new(),
            year,
            affiliations: vec![],
            source_shard: "s".into(),
        }
    }

    #[test]
    fn shared_record_is_removed_once() {
        let a = Shard::new("a.bib", vec![rec("1", "Lean  Production", 1990), rec("2", "Other", 1991)]);
        let b = Shard::new("b.bib", vec![rec("3", "lean production", 1990), rec("4", "Third", 1992)]);
        let corpus = merge_and_dedup(vec![a, b]);
        assert_eq!(corpus.records.len(), 3);
        assert_eq!(corpus.dedup_count, 1);
        assert_eq!(corpus.records[0].key, "1");
        assert_eq!(corpus.provenance, vec!["a.bib", "b.bib"]);
    }

    #[test]
    fn same_title_different_year_is_kept() {
        let corpus = merge_and_dedup(vec![Shard::new("a", vec![rec("1", "Editorial", 1990), rec("2", "Editorial", 1991)])]);
        assert_eq!(corpus.records.len(), 2);
    }

    #[test]
    fn empty_shard_list() {
        let corpus = merge_and_dedup(vec![]);
        assert!(corpus.records.is_empty());
        assert_eq!(corpus.dedup_count, 0);
    }

    #[test]
    fn journal_slot_sizes_merge_to_full_corpus() {
        let sizes = [1657usize, 4754, 3169];
        let shards = sizes
            .iter()
            .enumerate()
            .map(|(s, &n)| {
                let range = YearRange::default_slots()[s];
                let recs = (0..n)
                    .map(|i| rec(&format!("{s}-{i}"), &format!("paper {s} {i}"), range.start + (i % range.len()) as i32))
                    .collect();
                Shard::new(format!("slot{s}.bib"), recs)
            })
            .collect();
        let corpus = merge_and_dedup(shards);
        assert_eq!(corpus.records.len(), 9580);
        let part = partition_by_year(&corpus, &YearRange::default_slots()).unwrap();
        let got: Vec<usize> = part.slices.iter().map(|s| s.records.len()).collect();
        assert_eq!(got, sizes);
        assert_eq!(part.unsliced_count(), 0);
    }

    #[test]
    fn boundary_years_are_inclusive() {
        let corpus = merge_and_dedup(vec![Shard::new("a", vec![rec("1", "t", 1990)])]);
        let part = partition_by_year(&corpus, &[YearRange::new(1961, 1990)]).unwrap();
        assert_eq!(part.slices[0].records.len(), 1);
        assert!(part.unsliced.is_empty());
    }

    #[test]
    fn out_of_range_goes_to_unsliced() {
        let corpus = merge_and_dedup(vec![Shard::new("a", vec![rec("1", "t", 1955), rec("2", "u", 2000)])]);
        let part = partition_by_year(&corpus, &[YearRange::new(1961, 1990), YearRange::new(2001, 2010)]).unwrap();
        assert_eq!(part.unsliced.len(), 2);
    }

    #[test]
    fn overlapping_boundaries_rejected() {
        let err = partition_by_year(&Corpus::default(), &[YearRange::new(1961, 1991), YearRange::new(1991, 2010)]);
        assert!(matches!(err, Err(IngestError::OverlappingBoundaries { .. })));
        let err = partition_by_year(&Corpus::default(), &[YearRange::new(1991, 2010), YearRange::new(1961, 1990)]);
        assert!(matches!(err, Err(IngestError::UnsortedBoundaries { .. })));
        let err = partition_by_year(&Corpus::default(), &[YearRange::new(1991, 1980)]);
        assert!(matches!(err, Err(IngestError::InvalidRange(_))));
    }

    #[test]
    fn year_range_parses_from_label() {
        let r: YearRange = "1961-1990".parse().unwrap();
        assert_eq!(r, YearRange::new(1961, 1990));
        assert_eq!(r.to_string(), "1961-1990");
        assert!("1961".parse::<YearRange>().is_err());
    }
}
