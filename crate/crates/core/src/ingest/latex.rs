//! Reduction of BibTeX/LaTeX field text to plain text.

/// Commands that stand for a letter or ligature on their own.
fn special_letter(name: &str) -> Option<&'static str> {
    Some(match name {
        "ss" => "ss",
        "o" => "o",
        "O" => "O",
        "ae" => "ae",
        "AE" => "AE",
        "oe" => "oe",
        "OE" => "OE",
        "aa" => "a",
        "AA" => "A",
        "l" => "l",
        "L" => "L",
        "i" => "i",
        "j" => "j",
        _ => return None,
    })
}

/// Strips LaTeX markup from a field value.
///
/// Accent macros (`\'e`, `\"{o}`, `\c{c}`, `\v s`) are reduced to their base
/// letter, escaped specials (`\&`, `\%`, `\{`) become the literal character,
/// other commands are dropped while their braced arguments are kept, grouping
/// braces are removed, `~` is a space, and whitespace is collapsed.
pub fn to_plain(raw: &str) -> String {
    let chars: Vec<char> = raw.chars().collect();
    let mut out = String::with_capacity(raw.len());
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            '\\' => {
                i += 1;
                let Some(&next) = chars.get(i) else { break };
                if next.is_ascii_alphabetic() {
                    let start = i;
                    while i < chars.len() && chars[i].is_ascii_alphabetic() {
                        i += 1;
                    }
                    let name: String = chars[start..i].iter().collect();
                    if let Some(letter) = special_letter(&name) {
                        out.push_str(letter);
                    }
                    // a control word swallows one following space
                    if i < chars.len() && chars[i] == ' ' {
                        i += 1;
                    }
                } else {
                    match next {
                        '\'' | '"' | '^' | '`' | '~' | '=' | '.' => {}
                        '\\' => out.push(' '),
                        other => out.push(other),
                    }
                    i += 1;
                }
            }
            '{' | '}' => i += 1,
            '~' => {
                out.push(' ');
                i += 1;
            }
            _ => {
                out.push(c);
                i += 1;
            }
        }
    }
    collapse_whitespace(&out)
}

pub fn collapse_whitespace(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Escapes plain text so that [`to_plain`] maps it back to itself.
pub(crate) fn escape(plain: &str) -> String {
    let mut out = String::with_capacity(plain.len());
    for c in plain.chars() {
        match c {
            '{' | '}' | '&' | '%' | '$' | '#' | '_' => {
                out.push('\\');
                out.push(c);
            }
            '~' => out.push(' '),
            '\\' => out.push(' '),
            _ => out.push(c),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accents_reduce_to_base_letters() {
        assert_eq!(to_plain(r#"M{\"u}ller"#), "Muller");
        assert_eq!(to_plain(r"Fran\c{c}ois"), "Francois");
        assert_eq!(to_plain(r"Ar\'{e}valo"), "Arevalo");
        assert_eq!(to_plain(r"\v{S}koda"), "Skoda");
        assert_eq!(to_plain(r"Stra\ss e"), "Strasse");
        assert_eq!(to_plain(r"Ben-Arieh"), "Ben-Arieh");
    }

    #[test]
    fn commands_keep_arguments() {
        assert_eq!(to_plain(r"\textit{Lean} production"), "Lean production");
        assert_eq!(to_plain("Supply  {Chain}\n management"), "Supply Chain management");
        assert_eq!(to_plain(r"R\&D at 50\%"), "R&D at 50%");
        assert_eq!(to_plain("a~b"), "a b");
    }

    #[test]
    fn escape_inverts_plain() {
        for s in ["a {b} c", "R&D", "100% of_x", "plain words"] {
            assert_eq!(to_plain(&escape(s)), collapse_whitespace(s));
        }
    }
}
