//! Metric-internal tokenization of detokenized text.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Split on runs of whitespace.
    Whitespace,
    /// Whitespace split, then every punctuation character becomes its own token.
    #[default]
    PunctSplit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct TokenizerConfig {
    pub scheme: Scheme,
    pub lowercase: bool,
}

impl TokenizerConfig {
    /// Case-sensitive punctuation splitting, used for BLEU.
    pub const BLEU: TokenizerConfig = TokenizerConfig {
        scheme: Scheme::PunctSplit,
        lowercase: false,
    };

    /// Lowercased punctuation splitting: the normalized TER setting.
    pub const TER_NORMALIZED: TokenizerConfig = TokenizerConfig {
        scheme: Scheme::PunctSplit,
        lowercase: true,
    };

    pub const WHITESPACE: TokenizerConfig = TokenizerConfig {
        scheme: Scheme::Whitespace,
        lowercase: false,
    };

    pub fn tokenize(&self, text: &str) -> Vec<String> {
        tokenize(text, self)
    }
}

/// ASCII punctuation plus the typographic marks common in subtitles.
pub fn is_punctuation(c: char) -> bool {
    c.is_ascii_punctuation()
        || matches!(
            c,
            '\u{00A1}' | '\u{00AB}' | '\u{00B7}' | '\u{00BB}' | '\u{00BF}'
                | '\u{2010}'..='\u{2027}'
                | '\u{2030}'..='\u{205E}'
                | '\u{3001}' | '\u{3002}'
        )
}

pub fn tokenize(text: &str, config: &TokenizerConfig) -> Vec<String> {
    let mut tokens = Vec::new();
    for word in text.split_whitespace() {
        match config.scheme {
            Scheme::Whitespace => tokens.push(word.to_string()),
            Scheme::PunctSplit => {
                let mut current = String::new();
                for c in word.chars() {
                    if is_punctuation(c) {
                        if !current.is_empty() {
                            tokens.push(std::mem::take(&mut current));
                        }
                        tokens.push(c.to_string());
                    } else {
                        current.push(c);
                    }
                }
                if !current.is_empty() {
                    tokens.push(current);
                }
            }
        }
    }
    if config.lowercase {
        for t in &mut tokens {
            *t = t.to_lowercase();
        }
    }
    tokens
}
