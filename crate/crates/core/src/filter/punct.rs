//! Moses-style punctuation normalization, restricted to length-preserving
//! substitutions.
//!
//! Curly and low quotes become straight quotes, guillemets become `"`,
//! non-breaking and other fixed-width spaces become a plain space, carriage
//! returns are dropped and runs of spaces collapse to one. En and em dashes are
//! left alone. The mapping never lengthens a string and is idempotent.

/// Replacement for a single character, `None` when it is dropped.
fn map_char(c: char) -> Option<char> {
    Some(match c {
        '\u{201C}' | '\u{201D}' | '\u{201E}' | '\u{201F}' | '\u{00AB}' | '\u{00BB}' => '"',
        '\u{2018}' | '\u{2019}' | '\u{201A}' | '\u{201B}' | '`' | '\u{00B4}' => '\'',
        '\u{00A0}' | '\u{2007}' | '\u{202F}' | '\u{2009}' | '\u{200A}' => ' ',
        '\r' => return None,
        other => other,
    })
}

pub fn normalize_punctuation(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut prev_space = false;
    for c in text.chars().filter_map(map_char) {
        if c == ' ' {
            if prev_space {
                continue;
            }
            prev_space = true;
        } else {
            prev_space = false;
        }
        out.push(c);
    }
    out
}
