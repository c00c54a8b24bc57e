//! Word spans and token estimation over raw text.

/// Byte ranges of whitespace-delimited words.
pub fn word_spans(text: &str) -> Vec<(usize, usize)> {
    let mut spans = Vec::new();
    let mut start = None;
    for (i, c) in text.char_indices() {
        match (c.is_whitespace(), start) {
            (true, Some(s)) => {
                spans.push((s, i));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        spans.push((s, text.len()));
    }
    spans
}

pub fn word_count(text: &str) -> usize {
    text.split_whitespace().count()
}

/// The last `n` words of `text`, sliced verbatim (inner whitespace and
/// line breaks preserved). Returns the trimmed text when it is shorter.
pub fn tail_words(text: &str, n: usize) -> &str {
    if n == 0 {
        return "";
    }
    let spans = word_spans(text);
    match spans.len() {
        0 => "",
        len => {
            let first = len.saturating_sub(n);
            &text[spans[first].0..spans[len - 1].1]
        }
    }
}

/// The first `n` words of `text`, sliced verbatim.
pub fn head_words(text: &str, n: usize) -> &str {
    let spans = word_spans(text);
    if n == 0 || spans.is_empty() {
        return "";
    }
    let last = n.min(spans.len()) - 1;
    &text[spans[0].0..spans[last].1]
}

/// Estimates model tokens as `ceil(words * ratio)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TokenEstimator {
    pub ratio: f64,
}

impl Default for TokenEstimator {
    fn default() -> Self {
        Self { ratio: 1.4 }
    }
}

impl TokenEstimator {
    pub fn new(ratio: f64) -> Self {
        Self { ratio }
    }

    pub fn tokens_for_words(&self, words: usize) -> usize {
        // tolerance keeps 285 * 1.4 at 399 rather than 400
        (words as f64 * self.ratio - 1e-9).ceil().max(0.0) as usize
    }

    pub fn estimate(&self, text: &str) -> usize {
        self.tokens_for_words(word_count(text))
    }

    /// Largest word count whose estimate fits in `tokens`.
    pub fn words_within(&self, tokens: usize) -> usize {
        let mut words = (tokens as f64 / self.ratio).floor() as usize;
        while words > 0 && self.tokens_for_words(words) > tokens {
            words -= 1;
        }
        while self.tokens_for_words(words + 1) <= tokens {
            words += 1;
        }
        words
    }

    /// Smallest word index whose token offset is at least `tokens`.
    pub fn words_from(&self, tokens: usize) -> usize {
        let mut words = (tokens as f64 / self.ratio).floor() as usize;
        while self.tokens_for_words(words) < tokens {
            words += 1;
        }
        while words > 0 && self.tokens_for_words(words - 1) >= tokens {
            words -= 1;
        }
        words
    }
}
