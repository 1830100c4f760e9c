//! Citation-export ingestion: BibTeX shards in, a deduplicated corpus and
//! year slices out.

mod bibtex;
mod corpus;
mod country;
pub mod latex;
mod record;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use bibtex::{decode_text, parse_bibtex, parse_str, to_bibtex, ParseOutcome};
pub use corpus::{merge_and_dedup, partition_by_year, Corpus, Partition, Shard, YearRange, YearSlice};
pub use country::{extract_countries, CountryExtraction, CountryTable};
pub use record::{AuthorName, BibRecord};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{source_name}: input is not decodable text ({reason})")]
    UnreadableInput { source_name: String, reason: String },
    #[error("year boundaries {first} and {second} overlap")]
    OverlappingBoundaries { first: YearRange, second: YearRange },
    #[error("year boundaries are not sorted: {first} comes before {second}")]
    UnsortedBoundaries { first: YearRange, second: YearRange },
    #[error("invalid year range {0}: start is after end")]
    InvalidRange(YearRange),
    #[error("country table line {line}: {reason}")]
    CountryTable { line: usize, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    /// The entry was withheld from the corpus.
    Quarantine,
    /// The entry was kept; something in it was ignored.
    Warning,
}

/// An entry-level problem found while reading a shard.
///
/// Serialized as one JSON object per line in quarantine files.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub file: String,
    pub line: usize,
    pub severity: Severity,
    pub reason: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub key: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub field: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub entry_line: Option<usize>,
}

impl Diagnostic {
    pub fn new(file: &str, line: usize, severity: Severity, reason: impl Into<String>) -> Self {
        Diagnostic {
            file: file.to_owned(),
            line,
            severity,
            reason: reason.into(),
            key: None,
            field: None,
            entry_line: None,
        }
    }

    pub fn with_key(mut self, key: &str) -> Self {
        if !key.is_empty() {
            self.key = Some(key.to_owned());
        }
        self
    }

    pub fn with_field(mut self, field: &str) -> Self {
        self.field = Some(field.to_owned());
        self
    }

    pub fn with_entry_line(mut self, line: usize) -> Self {
        if line != self.line {
            self.entry_line = Some(line);
        }
        self
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("diagnostic serializes")
    }
}

/// Writes diagnostics as JSON lines.
pub fn diagnostics_to_jsonl(diagnostics: &[Diagnostic]) -> String {
    diagnostics
        .iter()
        .map(|d| d.to_json_line() + "\n")
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagnostics_round_trip_as_json_lines() {
        let diags = vec![
            Diagnostic::new("a.bib", 3, Severity::Quarantine, "missing required field 'year'")
                .with_key("k1")
                .with_field("year"),
            Diagnostic::new("a.bib", 9, Severity::Warning, "unsupported @string block ignored"),
        ];
        let text = diagnostics_to_jsonl(&diags);
        assert_eq!(text.lines().count(), 2);
        assert!(text.starts_with(r#"{"file":"a.bib","line":3,"severity":"quarantine""#));
        let back: Vec<Diagnostic> = text
            .lines()
            .map(|l| serde_json::from_str(l).unwrap())
            .collect();
        assert_eq!(back, diags);
    }
}
