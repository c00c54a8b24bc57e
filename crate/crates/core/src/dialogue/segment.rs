use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::tokenize::tokenize;

/// Abbreviations that end in a period but never end a sentence.
pub const DEFAULT_ABBREVIATIONS: &[&str] = &[
    "dr.", "bijv.", "o.a.", "mevr.", "dhr.", "ca.", "enz.", "etc.", "d.w.z.", "i.v.m.", "m.b.v.",
    "z.s.m.", "evt.", "nr.", "mr.", "prof.", "vs.", "resp.", "incl.", "excl.", "max.", "min.",
];

const TERMINALS: &[char] = &['.', '!', '?', '…'];
const CLOSERS: &[char] = &['"', '\'', '”', '’', ')', '»', ']'];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sentence {
    pub text: String,
    pub tokens: Vec<String>,
}

impl Sentence {
    pub fn word_count(&self) -> usize {
        self.tokens.len()
    }
}

/// Rule-based sentence splitter with a user-extensible abbreviation list.
#[derive(Debug, Clone)]
pub struct SentenceSplitter {
    abbreviations: BTreeSet<String>,
}

impl Default for SentenceSplitter {
    fn default() -> Self {
        Self::with_abbreviations(DEFAULT_ABBREVIATIONS.iter().copied())
    }
}

impl SentenceSplitter {
    pub fn with_abbreviations<I, S>(abbreviations: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let abbreviations = abbreviations
            .into_iter()
            .map(|a| a.as_ref().trim().to_lowercase())
            .filter(|a| !a.is_empty())
            .collect();
        Self { abbreviations }
    }

    pub fn add_abbreviation(&mut self, abbreviation: &str) {
        self.abbreviations.insert(abbreviation.trim().to_lowercase());
    }

    /// Byte ranges of the raw sentence pieces, before tokenless pieces are
    /// merged. Pieces are contiguous: together with the whitespace between
    /// them they cover the whole input.
    pub(crate) fn raw_pieces(&self, text: &str) -> Vec<(usize, usize)> {
        let mut pieces = Vec::new();
        let mut start = 0;
        let mut chars = text.char_indices().peekable();
        while let Some((i, c)) = chars.next() {
            if !TERMINALS.contains(&c) {
                continue;
            }
            let mut end = i + c.len_utf8();
            while let Some(&(j, next)) = chars.peek() {
                if TERMINALS.contains(&next) || CLOSERS.contains(&next) {
                    end = j + next.len_utf8();
                    chars.next();
                } else {
                    break;
                }
            }
            let at_boundary = match chars.peek() {
                None => true,
                Some(&(_, next)) => next.is_whitespace(),
            };
            if !at_boundary || self.ends_with_abbreviation(&text[start..end]) {
                continue;
            }
            pieces.push((start, end));
            start = end;
        }
        if !text[start..].trim().is_empty() {
            pieces.push((start, text.len()));
        }
        pieces
    }

    fn ends_with_abbreviation(&self, piece: &str) -> bool {
        let Some(last) = piece.split_whitespace().last() else {
            return false;
        };
        let word = last.trim_start_matches(|c: char| !c.is_alphanumeric());
        self.abbreviations.contains(&word.to_lowercase())
    }

    /// Splits `raw_text` into sentences. Pieces without any word token
    /// (a stray "..." for instance) are folded into the neighbouring sentence.
    /// Returns an empty list only when the text holds no word tokens at all.
    pub fn split(&self, raw_text: &str) -> Vec<Sentence> {
        let mut sentences: Vec<Sentence> = Vec::new();
        let mut pending = String::new();
        for (s, e) in self.raw_pieces(raw_text) {
            let piece = raw_text[s..e].trim();
            if piece.is_empty() {
                continue;
            }
            let tokens = tokenize(piece);
            if tokens.is_empty() {
                match sentences.last_mut() {
                    Some(prev) => {
                        prev.text.push(' ');
                        prev.text.push_str(piece);
                    }
                    None => {
                        pending.push_str(piece);
                        pending.push(' ');
                    }
                }
                continue;
            }
            let text = if pending.is_empty() {
                piece.to_string()
            } else {
                let joined = format!("{pending}{piece}");
                pending.clear();
                joined
            };
            sentences.push(Sentence { text, tokens });
        }
        sentences
    }
}

/// Splits with the default abbreviation list.
pub fn segment_sentences(raw_text: &str) -> Vec<Sentence> {
    SentenceSplitter::default().split(raw_text)
}
