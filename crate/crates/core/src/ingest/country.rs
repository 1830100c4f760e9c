use std::collections::{BTreeSet, HashMap};
use std::path::Path;

use super::{BibRecord, IngestError};

const DEFAULT_TABLE: &str = include_str!("../../data/countries.txt");

/// Maps casefolded country aliases to canonical names.
///
/// Text form: one `alias = canonical` per line, `#` comments. Every canonical
/// name also matches itself.
#[derive(Debug, Clone, Default)]
pub struct CountryTable {
    aliases: HashMap<String, String>,
}

fn fold(s: &str) -> String {
    s.trim().trim_end_matches('.').trim().to_lowercase()
}

impl CountryTable {
    pub fn parse(text: &str) -> Result<Self, IngestError> {
        let mut aliases = HashMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (alias, canonical) = line.split_once('=').ok_or_else(|| IngestError::CountryTable {
                line: i + 1,
                reason: format!("expected 'alias = canonical', got '{line}'"),
            })?;
            let (alias, canonical) = (alias.trim(), canonical.trim());
            if alias.is_empty() || canonical.is_empty() {
                return Err(IngestError::CountryTable {
                    line: i + 1,
                    reason: "empty alias or canonical name".into(),
                });
            }
            aliases.insert(fold(alias), canonical.to_owned());
            aliases.entry(fold(canonical)).or_insert_with(|| canonical.to_owned());
        }
        Ok(CountryTable { aliases })
    }

    pub fn load(path: &Path) -> Result<Self, IngestError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn lookup(&self, segment: &str) -> Option<&str> {
        self.aliases.get(&fold(segment)).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.aliases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.aliases.is_empty()
    }
}

impl CountryTable {
    /// The bundled table covering common Scopus country spellings.
    pub fn bundled() -> Self {
        Self::parse(DEFAULT_TABLE).expect("bundled country table is valid")
    }
}

/// Countries found in one record's affiliations.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CountryExtraction {
    /// Canonical names, sorted, each once.
    pub countries: Vec<String>,
    /// Final affiliation segments that matched no table entry.
    pub unmatched: Vec<String>,
}

/// Takes the last comma-separated segment of every affiliation and resolves it
/// through the table.
pub fn extract_countries(record: &BibRecord, table: &CountryTable) -> CountryExtraction {
    let mut countries = BTreeSet::new();
    let mut unmatched = BTreeSet::new();
    for aff in &record.affiliations {
        let segment = aff.rsplit(',').next().unwrap_or("").trim();
        if segment.is_empty() {
            continue;
        }
        match table.lookup(segment) {
            Some(c) => {
                countries.insert(c.to_owned());
            }
            None => {
                unmatched.insert(segment.to_owned());
            }
        }
    }
    CountryExtraction {
        countries: countries.into_iter().collect(),
        unmatched: unmatched.into_iter().collect(),
    }
}
