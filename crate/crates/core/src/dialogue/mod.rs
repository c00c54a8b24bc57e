//! Structured dialogue model: turns, sentences and word tokens.
//!
//! Every metric in the crate consumes a [`Dialogue`]. Dialogues are built by
//! [`parse_transcript`] from speaker-labelled plain text ("Arts: ...") or
//! from a JSON document previously exported with serde.

mod parse;
mod segment;
mod tokenize;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use parse::{parse_transcript, LabelMap, ParseError, ParseWarning, TranscriptParser};
pub use segment::{segment_sentences, Sentence, SentenceSplitter, DEFAULT_ABBREVIATIONS};
pub use tokenize::{count_tokens, normalize_word, tokenize};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Speaker {
    Doctor,
    Patient,
    Other(String),
}

impl Speaker {
    /// Label written when a dialogue is serialized back to transcript form.
    pub fn label(&self) -> &str {
        match self {
            Speaker::Doctor => "Arts",
            Speaker::Patient => "Patiënt",
            Speaker::Other(label) => label,
        }
    }
}

impl fmt::Display for Speaker {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DialogueSource {
    RealSample,
    Synthetic,
    #[default]
    Unknown,
}

impl std::str::FromStr for DialogueSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "real-sample" => Ok(Self::RealSample),
            "synthetic" => Ok(Self::Synthetic),
            "unknown" => Ok(Self::Unknown),
            other => Err(format!("unknown dialogue source '{other}'")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Turn {
    pub speaker: Speaker,
    #[serde(rename = "text")]
    pub raw_text: String,
    pub sentences: Vec<Sentence>,
}

impl Turn {
    /// Builds a turn, or `None` when `raw_text` contains no word tokens.
    pub fn new(speaker: Speaker, raw_text: impl Into<String>, splitter: &SentenceSplitter) -> Option<Self> {
        let raw_text = raw_text.into().trim().to_string();
        let sentences = splitter.split(&raw_text);
        if sentences.is_empty() {
            return None;
        }
        Some(Self { speaker, raw_text, sentences })
    }

    pub fn word_count(&self) -> usize {
        self.sentences.iter().map(Sentence::word_count).sum()
    }

    /// All tokens of the turn, in order.
    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.sentences
            .iter()
            .flat_map(|s| s.tokens.iter().map(String::as_str))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dialogue {
    id: String,
    source: DialogueSource,
    turns: Vec<Turn>,
}

impl Dialogue {
    /// Assembles a dialogue from already-built turns.
    pub fn new(id: impl Into<String>, source: DialogueSource, turns: Vec<Turn>) -> Result<Self, ParseError> {
        if turns.is_empty() {
            return Err(ParseError::EmptyTranscript);
        }
        Ok(Self { id: id.into(), source, turns })
    }

    /// Builds turns from `(speaker, text)` pairs, dropping tokenless texts.
    pub fn from_texts<I, S>(
        id: impl Into<String>,
        source: DialogueSource,
        texts: I,
        splitter: &SentenceSplitter,
    ) -> Result<Self, ParseError>
    where
        I: IntoIterator<Item = (Speaker, S)>,
        S: Into<String>,
    {
        let turns = texts
            .into_iter()
            .filter_map(|(speaker, text)| Turn::new(speaker, text, splitter))
            .collect();
        Self::new(id, source, turns)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn source(&self) -> DialogueSource {
        self.source
    }

    pub fn turns(&self) -> &[Turn] {
        &self.turns
    }

    pub fn turn_count(&self) -> usize {
        self.turns.len()
    }

    pub fn word_count(&self) -> usize {
        self.turns.iter().map(Turn::word_count).sum()
    }

    pub fn sentence_count(&self) -> usize {
        self.turns.iter().map(|t| t.sentences.len()).sum()
    }

    pub fn speakers(&self) -> impl Iterator<Item = &Speaker> {
        self.turns.iter().map(|t| &t.speaker)
    }

    /// Every token of the dialogue in document order.
    pub fn tokens(&self) -> Vec<&str> {
        self.turns.iter().flat_map(Turn::tokens).collect()
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }

    /// Renders the dialogue back to labelled-line form. Continuation lines
    /// inside a turn are kept as-is.
    pub fn to_transcript(&self) -> String {
        let mut out = String::new();
        for turn in &self.turns {
            out.push_str(turn.speaker.label());
            out.push_str(": ");
            out.push_str(&turn.raw_text);
            out.push('\n');
        }
        out
    }
}

/// Serialized shape of a dialogue: `{id, source, word_count, turn_count, turns[]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DialogueDocument {
    pub id: String,
    #[serde(default)]
    pub source: DialogueSource,
    #[serde(default)]
    pub word_count: usize,
    #[serde(default)]
    pub turn_count: usize,
    pub turns: Vec<TurnDocument>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TurnDocument {
    pub speaker: Speaker,
    pub text: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sentences: Vec<Sentence>,
}

impl From<&Dialogue> for DialogueDocument {
    fn from(d: &Dialogue) -> Self {
        Self {
            id: d.id.clone(),
            source: d.source,
            word_count: d.word_count(),
            turn_count: d.turn_count(),
            turns: d
                .turns
                .iter()
                .map(|t| TurnDocument {
                    speaker: t.speaker.clone(),
                    text: t.raw_text.clone(),
                    sentences: t.sentences.clone(),
                })
                .collect(),
        }
    }
}

impl DialogueDocument {
    /// Rebuilds a dialogue, re-deriving sentences and tokens from the turn
    /// texts so invariants hold regardless of what the document claimed.
    pub fn into_dialogue(self, splitter: &SentenceSplitter) -> Result<Dialogue, ParseError> {
        Dialogue::from_texts(
            self.id,
            self.source,
            self.turns.into_iter().map(|t| (t.speaker, t.text)),
            splitter,
        )
    }
}

impl Serialize for Dialogue {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        DialogueDocument::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Dialogue {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let doc = DialogueDocument::deserialize(deserializer)?;
        doc.into_dialogue(&SentenceSplitter::default())
            .map_err(serde::de::Error::custom)
    }
}
