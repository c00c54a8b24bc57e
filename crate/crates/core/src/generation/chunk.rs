use crate::dialogue::SentenceSplitter;

use super::text::{word_count, word_spans, TokenEstimator};
use super::GenerationError;

/// Byte offsets where a chunk may end: after a sentence (including the
/// whitespace that follows it) and after every line break.
fn unit_boundaries(text: &str) -> Vec<usize> {
    let skip_ws = |mut i: usize| {
        while let Some(c) = text[i..].chars().next() {
            if !c.is_whitespace() {
                break;
            }
            i += c.len_utf8();
        }
        i
    };
    let mut cuts: Vec<usize> = SentenceSplitter::default()
        .raw_pieces(text)
        .into_iter()
        .map(|(_, end)| skip_ws(end))
        .collect();
    cuts.extend(text.match_indices('\n').map(|(i, _)| skip_ws(i)));
    cuts.push(text.len());
    cuts.sort_unstable();
    cuts.dedup();
    cuts.retain(|&c| c > 0);
    cuts
}

/// Splits `text` into consecutive pieces whose estimated token count stays
/// within `budget`. Pieces end on sentence or line boundaries; a unit that
/// alone exceeds the budget is split between words. A single word is never
/// split, even if its own estimate exceeds `budget`.
///
/// The pieces concatenate back to `text` exactly.
pub fn chunk_source(text: &str, budget: usize, estimator: TokenEstimator) -> Result<Vec<String>, GenerationError> {
    if budget == 0 {
        return Err(GenerationError::InvalidConfig("chunk budget must be positive".into()));
    }
    if text.trim().is_empty() {
        return Err(GenerationError::EmptySource);
    }
    let fits = |words: usize| words <= 1 || estimator.tokens_for_words(words) <= budget;

    let mut chunks = Vec::new();
    let mut chunk_start = 0;
    let mut chunk_words = 0;
    let mut unit_start = 0;
    for cut in unit_boundaries(text) {
        let unit = &text[unit_start..cut];
        let words = word_count(unit);
        if fits(chunk_words + words) {
            chunk_words += words;
        } else {
            if chunk_words > 0 {
                chunks.push(text[chunk_start..unit_start].to_string());
                chunk_start = unit_start;
                chunk_words = 0;
            }
            if fits(words) {
                chunk_words = words;
            } else {
                // Oversized unit: pack word by word, keeping trailing
                // whitespace with the preceding word.
                let spans = word_spans(unit);
                for (i, _) in spans.iter().enumerate() {
                    if !fits(chunk_words + 1) {
                        let split_at = unit_start + spans[i].0;
                        chunks.push(text[chunk_start..split_at].to_string());
                        chunk_start = split_at;
                        chunk_words = 0;
                    }
                    chunk_words += 1;
                }
            }
        }
        unit_start = cut;
    }
    if chunk_start < text.len() {
        let rest = &text[chunk_start..];
        if word_count(rest) == 0 && !chunks.is_empty() {
            // trailing whitespace only
            chunks.last_mut().expect("non-empty").push_str(rest);
        } else {
            chunks.push(rest.to_string());
        }
    }
    Ok(chunks)
}
