//! Word tokenization shared by every metric.
//!
//! A word is a whitespace-delimited run with surrounding punctuation removed,
//! lowercased. Internal hyphens and apostrophes survive (`hba1c-waarde`).

/// Splits `text` into normalized word tokens.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace().filter_map(normalize_word).collect()
}

/// Normalizes a single whitespace-delimited word, returning `None` when
/// nothing but punctuation remains.
pub fn normalize_word(word: &str) -> Option<String> {
    let trimmed = word.trim_matches(|c: char| !c.is_alphanumeric());
    if trimmed.is_empty() {
        None
    } else {
        Some(trimmed.to_lowercase())
    }
}

/// Number of tokens `tokenize` would produce, without allocating them.
pub fn count_tokens(text: &str) -> usize {
    text.split_whitespace()
        .filter(|w| w.chars().any(char::is_alphanumeric))
        .count()
}
