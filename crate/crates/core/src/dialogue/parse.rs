use thiserror::Error;

use super::{Dialogue, DialogueSource, SentenceSplitter, Speaker, Turn};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("transcript contains no speaker-labelled line")]
    EmptyTranscript,
    #[error("label map needs at least two distinct labels, got {0}")]
    InvalidLabelMap(usize),
}

/// Non-fatal observations made while parsing. Line numbers are 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseWarning {
    UnknownLabel { line: usize, label: String },
    PreambleIgnored { line: usize },
    EmptyTurnDropped { line: usize },
}

impl std::fmt::Display for ParseWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ParseWarning::UnknownLabel { line, label } => {
                write!(f, "line {line}: unknown speaker label '{label}' kept as-is")
            }
            ParseWarning::PreambleIgnored { line } => write!(f, "line {line}: text before the first label ignored"),
            ParseWarning::EmptyTurnDropped { line } => write!(f, "line {line}: turn without words dropped"),
        }
    }
}

/// Maps line-start labels (matched case-insensitively) to speakers.
#[derive(Debug, Clone)]
pub struct LabelMap {
    // (lowercased label including the colon, speaker), longest label first
    entries: Vec<(String, Speaker)>,
}

impl Default for LabelMap {
    fn default() -> Self {
        Self::new([
            ("Arts:", Speaker::Doctor),
            ("Patiënt:", Speaker::Patient),
            ("Patient:", Speaker::Patient),
        ])
    }
}

impl LabelMap {
    pub fn new<I, S>(entries: I) -> Self
    where
        I: IntoIterator<Item = (S, Speaker)>,
        S: AsRef<str>,
    {
        let mut entries: Vec<(String, Speaker)> = entries
            .into_iter()
            .map(|(label, speaker)| {
                let mut label = label.as_ref().trim().to_lowercase();
                if !label.ends_with(':') {
                    label.push(':');
                }
                (label, speaker)
            })
            .collect();
        entries.sort_by(|a, b| b.0.chars().count().cmp(&a.0.chars().count()).then(a.0.cmp(&b.0)));
        entries.dedup_by(|a, b| a.0 == b.0);
        Self { entries }
    }

    /// Adds (or overrides) one label.
    pub fn with_label(self, label: &str, speaker: Speaker) -> Self {
        Self::new(std::iter::once((label.to_string(), speaker)).chain(self.entries))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Returns the speaker and the remaining text when `line` starts with a
    /// known label.
    fn match_known<'a>(&self, line: &'a str) -> Option<(Speaker, &'a str)> {
        for (label, speaker) in &self.entries {
            let n = label.chars().count();
            let Some((end, _)) = line.char_indices().nth(n - 1) else {
                continue;
            };
            let end = end + line[end..].chars().next().map_or(0, char::len_utf8);
            if line[..end].to_lowercase() == *label {
                return Some((speaker.clone(), &line[end..]));
            }
        }
        None
    }
}

/// A line that looks like `Name: text` with a single-word label.
fn match_unknown(line: &str) -> Option<(&str, &str)> {
    let colon = line.find(':')?;
    let label = &line[..colon];
    let rest = &line[colon + 1..];
    let plausible = !label.is_empty()
        && label.chars().count() <= 32
        && label.chars().next().is_some_and(char::is_alphabetic)
        && label
            .chars()
            .all(|c| c.is_alphanumeric() || matches!(c, '-' | '_' | '.'))
        && (rest.is_empty() || rest.starts_with(char::is_whitespace));
    plausible.then_some((label, rest))
}

#[derive(Debug, Clone, Default)]
pub struct TranscriptParser {
    pub labels: LabelMap,
    pub splitter: SentenceSplitter,
    pub source: DialogueSource,
}

impl TranscriptParser {
    pub fn new(labels: LabelMap) -> Self {
        Self { labels, ..Self::default() }
    }

    pub fn with_source(mut self, source: DialogueSource) -> Self {
        self.source = source;
        self
    }

    pub fn parse(&self, id: &str, text: &str) -> Result<Dialogue, ParseError> {
        self.parse_with_warnings(id, text).map(|(d, _)| d)
    }

    pub fn parse_with_warnings(&self, id: &str, text: &str) -> Result<(Dialogue, Vec<ParseWarning>), ParseError> {
        if self.labels.len() < 2 {
            return Err(ParseError::InvalidLabelMap(self.labels.len()));
        }
        let mut warnings = Vec::new();
        // (first line number, speaker, accumulated text)
        let mut open: Vec<(usize, Speaker, String)> = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            let labelled = self.labels.match_known(trimmed).or_else(|| {
                match_unknown(trimmed).map(|(label, rest)| {
                    warnings.push(ParseWarning::UnknownLabel { line: line_no, label: label.to_string() });
                    (Speaker::Other(label.to_string()), rest)
                })
            });
            match (labelled, open.last_mut()) {
                (Some((speaker, rest)), _) => open.push((line_no, speaker, rest.trim().to_string())),
                (None, Some((_, _, acc))) => {
                    if !acc.is_empty() {
                        acc.push('\n');
                    }
                    acc.push_str(trimmed);
                }
                (None, None) => warnings.push(ParseWarning::PreambleIgnored { line: line_no }),
            }
        }
        let mut turns = Vec::with_capacity(open.len());
        for (line_no, speaker, acc) in open {
            match Turn::new(speaker, acc, &self.splitter) {
                Some(turn) => turns.push(turn),
                None => warnings.push(ParseWarning::EmptyTurnDropped { line: line_no }),
            }
        }
        let dialogue = Dialogue::new(id, self.source, turns)?;
        Ok((dialogue, warnings))
    }
}

/// Parses a labelled transcript with the default splitter.
pub fn parse_transcript(text: &str, label_map: &LabelMap) -> Result<Dialogue, ParseError> {
    TranscriptParser::new(label_map.clone()).parse("", text)
}
