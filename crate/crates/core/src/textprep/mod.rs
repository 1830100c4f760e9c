//! Record text to stemmed token documents and a document-term matrix.
//!
//! Per record: concatenate the configured fields, split into lowercase letter
//! runs, drop stop/unwanted/short tokens, stem, then filter again because a
//! stem can land on a stop word (`being` → `be`).

mod dtm;
pub mod porter;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::path::Path;
use thiserror::Error;

use crate::ingest::BibRecord;

pub use dtm::{build_dtm, DocumentTermMatrix, Vocabulary};
pub use porter::stem;

const DEFAULT_STOPWORDS: &str = include_str!("../../data/stopwords_en.txt");

#[derive(Debug, Error)]
pub enum PrepError {
    #[error("min_token_len must be at least 1")]
    InvalidMinTokenLen,
    #[error("unknown stemmer '{0}'")]
    UnknownStemmer(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Which record fields feed the text of a document.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TextFields {
    pub title: bool,
    #[serde(rename = "abstract")]
    pub abstract_text: bool,
}

impl Default for TextFields {
    fn default() -> Self {
        TextFields {
            title: true,
            abstract_text: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StemmerKind {
    #[default]
    Porter,
}

impl std::str::FromStr for StemmerKind {
    type Err = PrepError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "porter" => Ok(StemmerKind::Porter),
            _ => Err(PrepError::UnknownStemmer(s.to_owned())),
        }
    }
}

impl StemmerKind {
    pub fn stem(self, token: &str) -> String {
        match self {
            StemmerKind::Porter => porter::stem(token),
        }
    }
}

/// Parses a word list: one word per line, `#` comments, casefolded.
pub fn parse_word_list(text: &str) -> BTreeSet<String> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|w| !w.is_empty())
        .map(str::to_lowercase)
        .collect()
}

pub fn load_word_list(path: &Path) -> Result<BTreeSet<String>, PrepError> {
    Ok(parse_word_list(&std::fs::read_to_string(path)?))
}

/// The bundled English stopword list.
pub fn default_stopwords() -> BTreeSet<String> {
    parse_word_list(DEFAULT_STOPWORDS)
}

/// Cleaning configuration. Word sets are always stored casefolded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrepConfig {
    min_token_len: usize,
    stopwords: BTreeSet<String>,
    unwanted: BTreeSet<String>,
    pub fields: TextFields,
    pub stemmer: StemmerKind,
}

impl Default for PrepConfig {
    fn default() -> Self {
        PrepConfig {
            min_token_len: 3,
            stopwords: default_stopwords(),
            unwanted: BTreeSet::new(),
            fields: TextFields::default(),
            stemmer: StemmerKind::Porter,
        }
    }
}

impl PrepConfig {
    pub fn with_min_token_len(mut self, n: usize) -> Result<Self, PrepError> {
        if n == 0 {
            return Err(PrepError::InvalidMinTokenLen);
        }
        self.min_token_len = n;
        Ok(self)
    }

    pub fn with_stopwords<I, S>(mut self, words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        self.stopwords = words.into_iter().map(|w| w.as_ref().to_lowercase()).collect();
        self
    }

    pub fn with_unwanted<I, S>(mut self, words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        self.unwanted = words.into_iter().map(|w| w.as_ref().to_lowercase()).collect();
        self
    }

    pub fn with_fields(mut self, fields: TextFields) -> Self {
        self.fields = fields;
        self
    }

    pub fn min_token_len(&self) -> usize {
        self.min_token_len
    }

    pub fn stopwords(&self) -> &BTreeSet<String> {
        &self.stopwords
    }

    pub fn unwanted(&self) -> &BTreeSet<String> {
        &self.unwanted
    }

    fn keeps(&self, token: &str) -> bool {
        token.chars().count() >= self.min_token_len
            && !self.stopwords.contains(token)
            && !self.unwanted.contains(token)
    }
}

/// One document after cleaning.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenDoc {
    pub doc_id: usize,
    pub year: i32,
    pub stems: Vec<String>,
}

/// Casefolded maximal runs of letters. Everything that is not a letter
/// (digits, punctuation, hyphens, whitespace) separates tokens.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphabetic())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

/// Drops stop words, unwanted words and short tokens, keeping order.
pub fn filter_tokens(tokens: &[String], config: &PrepConfig) -> Vec<String> {
    tokens.iter().filter(|t| config.keeps(t)).cloned().collect()
}

/// The text a record contributes under `fields`.
pub fn record_text(record: &BibRecord, fields: TextFields) -> String {
    let mut parts = Vec::with_capacity(2);
    if fields.title {
        parts.push(record.title.as_str());
    }
    if fields.abstract_text && !record.abstract_text.is_empty() {
        parts.push(record.abstract_text.as_str());
    }
    parts.join(" ")
}

/// A record's tokens before cleaning, tagged with its year.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawTokens {
    pub year: i32,
    pub tokens: Vec<String>,
}

/// The tokenization half of [`preprocess`].
pub fn tokenize_records(records: &[BibRecord], config: &PrepConfig) -> Vec<RawTokens> {
    records
        .par_iter()
        .map(|r| RawTokens {
            year: r.year,
            tokens: tokenize(&record_text(r, config.fields)),
        })
        .collect()
}

/// The cleaning half of [`preprocess`]: filter, stem, filter again.
/// Document ids are positions in `raw`.
pub fn clean_tokens(raw: &[RawTokens], config: &PrepConfig) -> Vec<TokenDoc> {
    raw.par_iter()
        .enumerate()
        .map(|(doc_id, r)| {
            let stems = filter_tokens(&r.tokens, config)
                .iter()
                .map(|t| config.stemmer.stem(t))
                .filter(|s| config.keeps(s))
                .collect();
            TokenDoc {
                doc_id,
                year: r.year,
                stems,
            }
        })
        .collect()
}

/// One [`TokenDoc`] per record, in record order. Records whose text is all
/// stop words still produce a document, with no stems.
pub fn preprocess(records: &[BibRecord], config: &PrepConfig) -> Vec<TokenDoc> {
    clean_tokens(&tokenize_records(records, config), config)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(words: &[&str]) -> Vec<String> {
        words.iter().map(|s| s.to_string()).collect()
    }

    fn record(title: &str, abstract_text: &str) -> BibRecord {
        BibRecord {
            key: "k".into(),
            authors: vec![],
            title: title.into(),
            abstract_text: abstract_text.into(),
            year: 1990,
            affiliations: vec![],
            source_shard: "s".into(),
        }
    }

    #[test]
    fn tokenize_splits_on_non_letters() {
        assert_eq!(tokenize("Supply-chain management."), toks(&["supply", "chain", "management"]));
        assert!(tokenize("").is_empty());
        assert_eq!(tokenize("IJPR 1961–2017 trends"), toks(&["ijpr", "trends"]));
        assert_eq!(tokenize("Just-in-time (JIT) systems' costs"), toks(&["just", "in", "time", "jit", "systems", "costs"]));
    }

    #[test]
    fn stopwords_from_the_cleaning_step_are_listed() {
        let stop = default_stopwords();
        for w in ["are", "were", "they", "that"] {
            assert!(stop.contains(w), "{w}");
        }
        assert!((170..=320).contains(&stop.len()), "{}", stop.len());
    }

    #[test]
    fn filter_examples() {
        let cfg = PrepConfig::default();
        assert_eq!(filter_tokens(&toks(&["they", "are", "robust"]), &cfg), toks(&["robust"]));
        assert!(filter_tokens(&[], &cfg).is_empty());
        let cfg = PrepConfig::default().with_stopwords(Vec::<String>::new());
        assert_eq!(filter_tokens(&toks(&["ab", "abc"]), &cfg), toks(&["abc"]));
    }

    #[test]
    fn unwanted_words_are_removed() {
        let cfg = PrepConfig::default().with_unwanted(["Paper", "STUDY"]);
        assert_eq!(filter_tokens(&toks(&["paper", "study", "robust"]), &cfg), toks(&["robust"]));
    }

    #[test]
    fn zero_min_len_rejected() {
        assert!(matches!(PrepConfig::default().with_min_token_len(0), Err(PrepError::InvalidMinTokenLen)));
    }

    #[test]
    fn preprocess_title_only_record() {
        let docs = preprocess(&[record("Scheduling of jobs", "")], &PrepConfig::default());
        assert_eq!(docs[0].stems, toks(&["schedul", "job"]));
    }

    #[test]
    fn all_stopword_record_keeps_its_row() {
        let docs = preprocess(
            &[record("Of the and", ""), record("Robust control", "")],
            &PrepConfig::default(),
        );
        assert_eq!(docs.len(), 2);
        assert!(docs[0].stems.is_empty());
        assert_eq!(docs[1].doc_id, 1);
    }

    #[test]
    fn stems_are_refiltered() {
        // "being" survives the first pass only if "being" is not itself a stop
        // word; its stem "be" must then be dropped.
        let cfg = PrepConfig::default().with_stopwords(["be"]).with_min_token_len(1).unwrap();
        let docs = preprocess(&[record("being", "")], &cfg);
        assert!(docs[0].stems.is_empty());
    }

    #[test]
    fn fields_are_configurable() {
        let rec = record("Lean", "Inventory");
        let only_title = PrepConfig::default().with_fields(TextFields {
            title: true,
            abstract_text: false,
        });
        assert_eq!(preprocess(std::slice::from_ref(&rec), &only_title)[0].stems, toks(&["lean"]));
        assert_eq!(preprocess(&[rec], &PrepConfig::default())[0].stems, toks(&["lean", "inventori"]));
    }

    #[test]
    fn slice_sized_input_conserves_documents() {
        let recs: Vec<BibRecord> = (0..1657).map(|i| record(&format!("Paper {i} on flow shops"), "")).collect();
        assert_eq!(preprocess(&recs, &PrepConfig::default()).len(), 1657);
    }
}
