//! Turn-structure metrics: alternation rate, greeting/closing detection,
//! average sentence length (ASL) and sentences per turn (SPT).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dialogue::Dialogue;
use crate::lexicon::Lexicon;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StructuralError {
    #[error("alternation rate needs at least 2 turns, dialogue has {0}")]
    TooFewTurns(usize),
    #[error("dialogue has no sentences")]
    NoSentences,
}

/// Fraction of adjacent turn pairs whose speakers differ, over
/// `turn_count - 1` pairs. 1.0 means strict alternation.
pub fn alternation_rate(d: &Dialogue) -> Result<f64, StructuralError> {
    let speakers: Vec<_> = d.speakers().collect();
    alternation_rate_of(&speakers)
}

/// Alternation rate over any speaker sequence.
pub fn alternation_rate_of<T: PartialEq>(speakers: &[T]) -> Result<f64, StructuralError> {
    if speakers.len() < 2 {
        return Err(StructuralError::TooFewTurns(speakers.len()));
    }
    let switches = speakers.windows(2).filter(|w| w[0] != w[1]).count();
    Ok(switches as f64 / (speakers.len() - 1) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhraseScope {
    Greeting,
    Closing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LexiconWarning {
    EmptyLexicon,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhraseDetection {
    pub scope: PhraseScope,
    /// Number of turns containing at least one phrase.
    pub count: usize,
    pub turn_indices: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<LexiconWarning>,
}

/// Counts turns that contain any phrase of `lexicon`, matched on normalized
/// token sequences. Several phrases inside one turn still count once.
pub fn detect_phrases(d: &Dialogue, lexicon: &Lexicon, scope: PhraseScope) -> PhraseDetection {
    if lexicon.is_empty() {
        return PhraseDetection {
            scope,
            count: 0,
            turn_indices: Vec::new(),
            warning: Some(LexiconWarning::EmptyLexicon),
        };
    }
    let turn_indices: Vec<usize> = d
        .turns()
        .iter()
        .enumerate()
        .filter(|(_, turn)| {
            let tokens: Vec<&str> = turn.tokens().collect();
            lexicon.contains_any(&tokens)
        })
        .map(|(i, _)| i)
        .collect();
    PhraseDetection { scope, count: turn_indices.len(), turn_indices, warning: None }
}

/// Mean token count over all sentences of the dialogue.
pub fn average_sentence_length(d: &Dialogue) -> Result<f64, StructuralError> {
    let sentences = d.sentence_count();
    if sentences == 0 {
        return Err(StructuralError::NoSentences);
    }
    Ok(d.word_count() as f64 / sentences as f64)
}

/// Mean sentence count per turn.
pub fn sentences_per_turn(d: &Dialogue) -> f64 {
    // Dialogue guarantees at least one turn.
    d.sentence_count() as f64 / d.turn_count() as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructuralScores {
    pub alternation_rate: Option<f64>,
    pub greeting_count: usize,
    pub closing_count: usize,
    pub asl: f64,
    pub spt: f64,
}

/// All structural scores for one dialogue. Alternation is `None` for a
/// single-turn dialogue.
pub fn structural_scores(d: &Dialogue, greetings: &Lexicon, closings: &Lexicon) -> StructuralScores {
    StructuralScores {
        alternation_rate: alternation_rate(d).ok(),
        greeting_count: detect_phrases(d, greetings, PhraseScope::Greeting).count,
        closing_count: detect_phrases(d, closings, PhraseScope::Closing).count,
        // a parsed dialogue always has at least one sentence
        asl: average_sentence_length(d).unwrap_or(0.0),
        spt: sentences_per_turn(d),
    }
}
