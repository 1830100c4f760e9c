//! A tolerant BibTeX reader for citation exports.
//!
//! Supported: `@type{key, field = value, ...}` entries (also with parentheses),
//! brace- and quote-delimited values, bare numbers, `#` concatenation of
//! literals and `@comment`. `@string`/`@preamble` and macro references are
//! reported as diagnostics. A malformed entry never stops the scan: the reader
//! resynchronizes at the next line that starts with `@`.

use std::collections::BTreeMap;

use super::latex;
use super::record::{parse_author_list, BibRecord};
use super::{Diagnostic, IngestError, Severity};

/// Everything recovered from one shard.
#[derive(Debug, Clone, Default)]
pub struct ParseOutcome {
    pub records: Vec<BibRecord>,
    pub diagnostics: Vec<Diagnostic>,
}

/// Decodes shard bytes: UTF-8 (leading BOM dropped), else Latin-1.
///
/// Input containing NUL bytes or other non-text control characters is
/// rejected as [`IngestError::UnreadableInput`].
pub fn decode_text(bytes: &[u8], source: &str) -> Result<String, IngestError> {
    let bytes = bytes.strip_prefix(b"\xEF\xBB\xBF").unwrap_or(bytes);
    let text = match std::str::from_utf8(bytes) {
        Ok(s) => s.to_owned(),
        Err(_) => bytes.iter().map(|&b| b as char).collect(),
    };
    if let Some(bad) = text
        .chars()
        .find(|&c| c.is_control() && !matches!(c, '\n' | '\r' | '\t' | '\u{c}'))
    {
        return Err(IngestError::UnreadableInput {
            source_name: source.to_owned(),
            reason: format!("control character U+{:04X} in input", bad as u32),
        });
    }
    Ok(text)
}

/// Parses one exported shard. `source` names the shard in records and
/// diagnostics.
pub fn parse_bibtex(bytes: &[u8], source: &str) -> Result<ParseOutcome, IngestError> {
    let text = decode_text(bytes, source)?;
    Ok(parse_str(&text, source))
}

pub fn parse_str(text: &str, source: &str) -> ParseOutcome {
    let mut scanner = Scanner::new(text);
    let mut outcome = ParseOutcome::default();
    while let Some(at) = scanner.find_from(scanner.pos, '@') {
        scanner.pos = at;
        let entry_line = scanner.line_of(at);
        match scanner.entry() {
            Ok(Entry::Skipped) => {}
            Ok(Entry::Unsupported(kind)) => outcome.diagnostics.push(Diagnostic::new(
                source,
                entry_line,
                Severity::Warning,
                format!("unsupported @{kind} block ignored"),
            )),
            Ok(Entry::Record(raw)) => {
                match build_record(raw, source, entry_line, &mut outcome.diagnostics) {
                    Some(rec) => outcome.records.push(rec),
                    None => {}
                }
            }
            Err(err) => {
                outcome.diagnostics.push(
                    Diagnostic::new(source, scanner.line_of(err.at), Severity::Quarantine, err.reason)
                        .with_entry_line(entry_line),
                );
                scanner.pos = scanner.next_line_start_at(at + 1).unwrap_or(scanner.chars.len());
            }
        }
    }
    outcome
}

struct RawEntry {
    key: String,
    key_line: usize,
    fields: BTreeMap<String, (String, usize)>,
    notes: Vec<(usize, String)>,
}

enum Entry {
    Skipped,
    Unsupported(String),
    Record(RawEntry),
}

struct ScanError {
    at: usize,
    reason: String,
}

struct Scanner {
    chars: Vec<char>,
    line_starts: Vec<usize>,
    pos: usize,
}

impl Scanner {
    fn new(text: &str) -> Self {
        let chars: Vec<char> = text.chars().collect();
        let mut line_starts = vec![0];
        line_starts.extend(
            chars
                .iter()
                .enumerate()
                .filter(|(_, &c)| c == '\n')
                .map(|(i, _)| i + 1),
        );
        Scanner {
            chars,
            line_starts,
            pos: 0,
        }
    }

    /// 1-based line number of a char offset.
    fn line_of(&self, at: usize) -> usize {
        self.line_starts.partition_point(|&s| s <= at)
    }

    fn find_from(&self, from: usize, needle: char) -> Option<usize> {
        self.chars[from.min(self.chars.len())..]
            .iter()
            .position(|&c| c == needle)
            .map(|i| i + from)
    }

    /// Offset of the next `@` that is the first non-blank char of its line.
    fn next_line_start_at(&self, from: usize) -> Option<usize> {
        let mut line_start = true;
        for i in from..self.chars.len() {
            match self.chars[i] {
                '\n' => line_start = true,
                '@' if line_start => return Some(i),
                c if c.is_whitespace() => {}
                _ => line_start = false,
            }
        }
        None
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn err<T>(&self, reason: impl Into<String>) -> Result<T, ScanError> {
        Err(ScanError {
            at: self.pos.min(self.chars.len().saturating_sub(1)),
            reason: reason.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn ident(&mut self) -> String {
        let start = self.pos;
        while self
            .peek()
            .is_some_and(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | ':' | '.'))
        {
            self.pos += 1;
        }
        self.chars[start..self.pos].iter().collect()
    }

    /// Consumes a balanced `{...}` group starting at `pos` and returns its
    /// inner text.
    fn braced(&mut self) -> Result<String, ScanError> {
        let open = self.pos;
        debug_assert_eq!(self.peek(), Some('{'));
        self.pos += 1;
        let mut depth = 1usize;
        let start = self.pos;
        while let Some(c) = self.peek() {
            match c {
                '\\' => self.pos += 1,
                '{' => depth += 1,
                '}' => {
                    depth -= 1;
                    if depth == 0 {
                        let inner = self.chars[start..self.pos].iter().collect();
                        self.pos += 1;
                        return Ok(inner);
                    }
                }
                _ => {}
            }
            self.pos += 1;
        }
        self.pos = open;
        self.err("unbalanced braces in value")
    }

    fn quoted(&mut self) -> Result<String, ScanError> {
        let open = self.pos;
        self.pos += 1;
        let start = self.pos;
        let mut depth = 0usize;
        while let Some(c) = self.peek() {
            match c {
                '\\' => self.pos += 1,
                '{' => depth += 1,
                '}' => depth = depth.saturating_sub(1),
                '"' if depth == 0 => {
                    let inner = self.chars[start..self.pos].iter().collect();
                    self.pos += 1;
                    return Ok(inner);
                }
                _ => {}
            }
            self.pos += 1;
        }
        self.pos = open;
        self.err("unterminated quoted value")
    }

    /// Skips a balanced block closed by `close`, used for `@comment` and
    /// unsupported entry kinds.
    fn skip_block(&mut self, close: char) -> Result<(), ScanError> {
        let open = self.pos;
        let mut depth = 0usize;
        while let Some(c) = self.peek() {
            self.pos += 1;
            match c {
                '{' | '(' => depth += 1,
                '}' | ')' => {
                    if depth == 0 {
                        if c == close {
                            return Ok(());
                        }
                    } else {
                        depth -= 1;
                    }
                }
                _ => {}
            }
        }
        self.pos = open;
        self.err("unterminated block")
    }

    fn entry(&mut self) -> Result<Entry, ScanError> {
        self.pos += 1; // '@'
        self.skip_ws();
        let kind = self.ident().to_lowercase();
        if kind.is_empty() {
            return Ok(Entry::Skipped);
        }
        self.skip_ws();
        let close = match self.peek() {
            Some('{') => '}',
            Some('(') => ')',
            _ if kind == "comment" => return Ok(Entry::Skipped),
            _ => return self.err(format!("expected '{{' or '(' after @{kind}")),
        };
        self.pos += 1;
        if kind == "comment" {
            self.skip_block(close)?;
            return Ok(Entry::Skipped);
        }
        if kind == "string" || kind == "preamble" {
            self.skip_block(close)?;
            return Ok(Entry::Unsupported(kind));
        }

        self.skip_ws();
        let key_start = self.pos;
        while self
            .peek()
            .is_some_and(|c| c != ',' && c != close && !c.is_whitespace())
        {
            self.pos += 1;
        }
        let key: String = self.chars[key_start..self.pos].iter().collect();
        let mut raw = RawEntry {
            key,
            key_line: self.line_of(key_start),
            fields: BTreeMap::new(),
            notes: Vec::new(),
        };
        loop {
            self.skip_ws();
            match self.peek() {
                Some(',') => {
                    self.pos += 1;
                    continue;
                }
                Some(c) if c == close => {
                    self.pos += 1;
                    return Ok(Entry::Record(raw));
                }
                None => return self.err("unterminated entry"),
                _ => {}
            }
            let field_at = self.pos;
            let name = self.ident().to_lowercase();
            if name.is_empty() {
                return self.err(format!("unexpected character '{}'", self.peek().unwrap_or(' ')));
            }
            self.skip_ws();
            if self.peek() != Some('=') {
                return self.err(format!("expected '=' after field '{name}'"));
            }
            self.pos += 1;
            let value = self.value(&name, &mut raw.notes)?;
            let line = self.line_of(field_at);
            if raw.fields.contains_key(&name) {
                raw.notes.push((line, format!("duplicate field '{name}' ignored")));
            } else {
                raw.fields.insert(name, (value, line));
            }
        }
    }

    /// Parses a field value: pieces joined by `#`.
    fn value(&mut self, field: &str, notes: &mut Vec<(usize, String)>) -> Result<String, ScanError> {
        let mut out = String::new();
        loop {
            self.skip_ws();
            match self.peek() {
                Some('{') => out.push_str(&self.braced()?),
                Some('"') => out.push_str(&self.quoted()?),
                Some(c) if c.is_ascii_digit() => {
                    let start = self.pos;
                    while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                        self.pos += 1;
                    }
                    out.extend(&self.chars[start..self.pos]);
                }
                Some(c) if c.is_alphabetic() => {
                    let at = self.pos;
                    let name = self.ident();
                    notes.push((
                        self.line_of(at),
                        format!("macro reference '{name}' in field '{field}' is unsupported"),
                    ));
                }
                _ => return self.err(format!("missing value for field '{field}'")),
            }
            self.skip_ws();
            if self.peek() == Some('#') {
                self.pos += 1;
            } else {
                return Ok(out);
            }
        }
    }
}

/// Turns raw fields into a record, or quarantines the entry.
fn build_record(
    raw: RawEntry,
    source: &str,
    entry_line: usize,
    diagnostics: &mut Vec<Diagnostic>,
) -> Option<BibRecord> {
    let key = raw.key.trim().to_owned();
    for (line, note) in &raw.notes {
        diagnostics.push(
            Diagnostic::new(source, *line, Severity::Warning, note.clone()).with_key(&key),
        );
    }
    let quarantine = |diagnostics: &mut Vec<Diagnostic>, line: usize, field: &str, reason: String| {
        diagnostics.push(
            Diagnostic::new(source, line, Severity::Quarantine, reason)
                .with_key(&key)
                .with_field(field)
                .with_entry_line(entry_line),
        );
    };
    if key.is_empty() {
        quarantine(diagnostics, raw.key_line, "key", "entry has no citation key".into());
        return None;
    }
    let field = |name: &str| raw.fields.get(name).map(|(v, line)| (v.as_str(), *line));

    let year = match field("year") {
        None => {
            quarantine(diagnostics, entry_line, "year", "missing required field 'year'".into());
            return None;
        }
        Some((value, line)) => {
            let plain = latex::to_plain(value);
            match plain.parse::<i32>() {
                Ok(y) if y > 0 => y,
                _ => {
                    quarantine(diagnostics, line, "year", format!("unparseable year '{plain}'"));
                    return None;
                }
            }
        }
    };
    let title = match field("title") {
        Some((value, _)) => latex::to_plain(value),
        None => {
            quarantine(diagnostics, entry_line, "title", "missing required field 'title'".into());
            return None;
        }
    };
    let authors = field("author").map(|(v, _)| parse_author_list(v)).unwrap_or_default();
    let abstract_text = field("abstract").map(|(v, _)| latex::to_plain(v)).unwrap_or_default();
    let affiliations = field("affiliation")
        .or_else(|| field("affiliations"))
        .map(|(v, _)| {
            v.split(';')
                .map(latex::to_plain)
                .filter(|s| !s.is_empty())
                .collect()
        })
        .unwrap_or_default();

    Some(BibRecord {
        key,
        authors,
        title,
        abstract_text,
        year,
        affiliations,
        source_shard: source.to_owned(),
    })
}

/// Serializes records as BibTeX `@article` entries that [`parse_bibtex`]
/// reads back to the same records.
pub fn to_bibtex(records: &[BibRecord]) -> String {
    let mut out = String::new();
    for rec in records {
        out.push_str(&format!("@article{{{},\n", rec.key));
        if !rec.authors.is_empty() {
            let authors: Vec<String> = rec
                .authors
                .iter()
                .map(|a| format!("{{{}}}, {}", latex::escape(&a.family), latex::escape(&a.given)))
                .collect();
            out.push_str(&format!("  author = {{{}}},\n", authors.join(" and ")));
        }
        out.push_str(&format!("  title = {{{}}},\n", latex::escape(&rec.title)));
        if !rec.abstract_text.is_empty() {
            out.push_str(&format!("  abstract = {{{}}},\n", latex::escape(&rec.abstract_text)));
        }
        out.push_str(&format!("  year = {{{}}},\n", rec.year));
        if !rec.affiliations.is_empty() {
            let affs: Vec<String> = rec.affiliations.iter().map(|a| latex::escape(a)).collect();
            out.push_str(&format!("  affiliation = {{{}}},\n", affs.join("; ")));
        }
        out.push_str("}\n\n");
    }
    out
}
