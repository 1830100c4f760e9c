use serde::{Deserialize, Serialize};
use std::fmt;

use super::latex;

/// An author as written in a citation record, with a normalized identity.
///
/// Two authors are the same person for this crate exactly when their
/// `normalized` forms are equal: the casefolded family name followed by the
/// initials of the given names (`"smith, j.r."`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AuthorName {
    pub family: String,
    pub given: String,
    pub normalized: String,
}

impl AuthorName {
    pub fn new(family: &str, given: &str) -> Self {
        let family = latex::collapse_whitespace(family);
        let given = latex::collapse_whitespace(given);
        let normalized = normalize_author(&family, &given);
        AuthorName {
            family,
            given,
            normalized,
        }
    }
}

impl fmt::Display for AuthorName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.given.is_empty() {
            write!(f, "{}", self.family)
        } else {
            write!(f, "{}, {}", self.family, self.given)
        }
    }
}

fn normalize_author(family: &str, given: &str) -> String {
    let family = family.to_lowercase();
    let initials: String = given
        .split(|c: char| c.is_whitespace() || c == '.' || c == '-')
        .filter_map(|part| part.chars().find(|c| c.is_alphabetic()))
        .flat_map(|c| c.to_lowercase().chain(std::iter::once('.')))
        .collect();
    if initials.is_empty() {
        family
    } else {
        format!("{family}, {initials}")
    }
}

/// One parsed citation entry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BibRecord {
    pub key: String,
    pub authors: Vec<AuthorName>,
    pub title: String,
    /// Empty when the export carried no abstract.
    pub abstract_text: String,
    pub year: i32,
    pub affiliations: Vec<String>,
    pub source_shard: String,
}

impl BibRecord {
    /// Title with case folded and whitespace collapsed; half of the dedup key.
    pub fn normalized_title(&self) -> String {
        latex::collapse_whitespace(&self.title.to_lowercase())
    }
}

/// Splits a raw `author` value on top-level `and` separators and parses each
/// name. Braced groups protect their content, so `{Smith and Sons}` is a
/// single corporate author.
pub(crate) fn parse_author_list(raw: &str) -> Vec<AuthorName> {
    split_top_level_and(raw)
        .into_iter()
        .filter_map(|name| parse_one_author(&name))
        .collect()
}

fn split_top_level_and(raw: &str) -> Vec<String> {
    let mut parts = Vec::new();
    let mut current: Vec<String> = Vec::new();
    for word in split_top_level_words(raw) {
        if word.eq_ignore_ascii_case("and") {
            parts.push(current.join(" "));
            current.clear();
        } else {
            current.push(word);
        }
    }
    parts.push(current.join(" "));
    parts
}

/// Splits on commas that are not inside braces.
fn split_top_level_commas(s: &str) -> Vec<String> {
    let mut parts = vec![String::new()];
    let mut depth = 0usize;
    for c in s.chars() {
        match c {
            '{' => depth += 1,
            '}' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                parts.push(String::new());
                continue;
            }
            _ => {}
        }
        parts.last_mut().expect("non-empty").push(c);
    }
    parts
}

fn parse_one_author(raw: &str) -> Option<AuthorName> {
    let raw = raw.trim();
    if raw.is_empty() || raw.eq_ignore_ascii_case("others") {
        return None;
    }
    let parts = split_top_level_commas(raw);
    let (family, given) = if parts.len() >= 2 {
        // "von Last, First" or "von Last, Jr, First"
        (parts[0].clone(), parts[parts.len() - 1].clone())
    } else {
        // "First von Last": the family name is the last word plus any
        // lowercase particles directly before it.
        let words = split_top_level_words(raw);
        let mut family_start = words.len() - 1;
        while family_start > 0 && starts_lowercase(&words[family_start - 1]) {
            family_start -= 1;
        }
        (words[family_start..].join(" "), words[..family_start].join(" "))
    };
    let family = latex::to_plain(&family);
    let given = latex::to_plain(&given);
    if family.is_empty() && given.is_empty() {
        return None;
    }
    if family.is_empty() {
        return Some(AuthorName::new(&given, ""));
    }
    Some(AuthorName::new(&family, &given))
}

fn split_top_level_words(s: &str) -> Vec<String> {
    let mut words = Vec::new();
    let mut depth = 0usize;
    let mut word = String::new();
    for c in s.chars() {
        match c {
            '{' => depth += 1,
            '}' => depth = depth.saturating_sub(1),
            c if c.is_whitespace() && depth == 0 => {
                if !word.is_empty() {
                    words.push(std::mem::take(&mut word));
                }
                continue;
            }
            _ => {}
        }
        word.push(c);
    }
    if !word.is_empty() {
        words.push(word);
    }
    words
}

fn starts_lowercase(word: &str) -> bool {
    !word.starts_with('{') && word.chars().next().is_some_and(|c| c.is_lowercase())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(raw: &str) -> Vec<(String, String)> {
        parse_author_list(raw)
            .into_iter()
            .map(|a| (a.family, a.given))
            .collect()
    }

    #[test]
    fn comma_and_plain_forms() {
        assert_eq!(
            names("Smith, J. and Jane Doe and van der Berg, Hans"),
            vec![
                ("Smith".into(), "J.".into()),
                ("Doe".into(), "Jane".into()),
                ("van der Berg".into(), "Hans".into()),
            ]
        );
        assert_eq!(names("Ludwig van Beethoven"), vec![("van Beethoven".into(), "Ludwig".into())]);
    }

    #[test]
    fn braces_protect_and() {
        assert_eq!(names("{Smith and Sons} and Lee, K."), vec![
            ("Smith and Sons".into(), "".into()),
            ("Lee".into(), "K.".into()),
        ]);
    }

    #[test]
    fn others_and_empty_names_dropped() {
        assert_eq!(names("Smith, J. and others").len(), 1);
        assert!(names("  ").is_empty());
        assert_eq!(names("A, B. and  and C, D.").len(), 2);
    }

    #[test]
    fn normalized_identity() {
        let a = AuthorName::new("Ben-Arieh", "David");
        let b = AuthorName::new("BEN-ARIEH", "D.");
        assert_eq!(a.normalized, "ben-arieh, d.");
        assert_eq!(a.normalized, b.normalized);
        assert_eq!(AuthorName::new("Smith", "John Robert").normalized, "smith, j.r.");
        assert_eq!(AuthorName::new("Smith", "J.-P.").normalized, "smith, j.p.");
        assert_eq!(AuthorName::new("Unesco", "").normalized, "unesco");
    }

    #[test]
    fn accented_author() {
        assert_eq!(names(r#"M{\"u}ller, J{\"o}rg"#), vec![("Muller".into(), "Jorg".into())]);
    }
}
