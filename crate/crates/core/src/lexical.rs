//! Lexical diversity (TTR, MSTTR, MATTR) and lexicon overlap metrics
//! (role consistency, topic coverage).

use std::collections::{HashMap, HashSet};
use std::hash::Hash;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dialogue::{Dialogue, Speaker};
use crate::lexicon::{Lexicon, LexiconError};

/// Default MSTTR/MATTR window, in words.
pub const DEFAULT_WINDOW: usize = 50;

/// Heuristic band for role consistency scores.
pub const ROLE_BAND: (f64, f64) = (0.05, 0.35);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LexicalError {
    #[error("token stream is empty")]
    EmptyTokenStream,
    #[error("text has {len} tokens, window needs {window}")]
    TextTooShort { len: usize, window: usize },
    #[error("window must be positive")]
    ZeroWindow,
    #[error("dialogue has no {0} turns")]
    MissingRole(&'static str),
    #[error("lexicon '{0}' has no entries")]
    EmptyLexicon(String),
    #[error("no topic lexicons given")]
    NoTopics,
}

impl From<LexiconError> for LexicalError {
    fn from(e: LexiconError) -> Self {
        match e {
            LexiconError::EmptyLexicon(name) => LexicalError::EmptyLexicon(name),
            other => LexicalError::EmptyLexicon(other.to_string()),
        }
    }
}

/// Unique tokens over total tokens.
pub fn ttr<T: Eq + Hash>(tokens: &[T]) -> Result<f64, LexicalError> {
    if tokens.is_empty() {
        return Err(LexicalError::EmptyTokenStream);
    }
    let types: HashSet<&T> = tokens.iter().collect();
    Ok(types.len() as f64 / tokens.len() as f64)
}

fn check_window(len: usize, window: usize) -> Result<(), LexicalError> {
    if window == 0 {
        return Err(LexicalError::ZeroWindow);
    }
    if len < window {
        return Err(LexicalError::TextTooShort { len, window });
    }
    Ok(())
}

/// TTR of each complete, non-overlapping segment of `window` tokens. The
/// trailing partial segment is discarded.
pub fn segment_ttrs<T: Eq + Hash>(tokens: &[T], window: usize) -> Result<Vec<f64>, LexicalError> {
    check_window(tokens.len(), window)?;
    tokens
        .chunks_exact(window)
        .map(ttr)
        .collect()
}

/// Mean segmental TTR.
pub fn msttr<T: Eq + Hash>(tokens: &[T], window: usize) -> Result<f64, LexicalError> {
    let segments = segment_ttrs(tokens, window)?;
    Ok(segments.iter().sum::<f64>() / segments.len() as f64)
}

/// Moving-average TTR over all `len - window + 1` windows, computed with a
/// sliding type-count map in O(n).
pub fn mattr<T: Eq + Hash>(tokens: &[T], window: usize) -> Result<f64, LexicalError> {
    check_window(tokens.len(), window)?;
    let mut counts: HashMap<&T, usize> = HashMap::with_capacity(window);
    for t in &tokens[..window] {
        *counts.entry(t).or_insert(0) += 1;
    }
    // Sum of type counts stays integral, so the mean is exact up to the
    // final division.
    let mut type_sum = counts.len() as u64;
    for i in window..tokens.len() {
        let outgoing = &tokens[i - window];
        let c = counts.get_mut(outgoing).expect("outgoing token is in the window");
        *c -= 1;
        if *c == 0 {
            counts.remove(outgoing);
        }
        *counts.entry(&tokens[i]).or_insert(0) += 1;
        type_sum += counts.len() as u64;
    }
    let windows = (tokens.len() - window + 1) as u64;
    Ok(type_sum as f64 / (windows * window as u64) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RoleNormalization {
    /// Matched token positions over all tokens of the role.
    #[default]
    PerToken,
    /// Turns with at least one match over all turns of the role.
    PerTurn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BandPosition {
    Below,
    Within,
    Above,
}

impl BandPosition {
    pub fn of(score: f64) -> Self {
        if score < ROLE_BAND.0 {
            BandPosition::Below
        } else if score > ROLE_BAND.1 {
            BandPosition::Above
        } else {
            BandPosition::Within
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoleScore {
    pub score: f64,
    pub matched: usize,
    pub total: usize,
    pub band: BandPosition,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoleConsistency {
    pub doctor: RoleScore,
    pub patient: RoleScore,
    pub mean: f64,
    pub band: BandPosition,
}

fn role_score(d: &Dialogue, speaker: &Speaker, lex: &Lexicon, norm: RoleNormalization) -> Option<RoleScore> {
    let mut matched = 0;
    let mut total = 0;
    let mut turns = 0;
    for turn in d.turns().iter().filter(|t| &t.speaker == speaker) {
        turns += 1;
        let tokens: Vec<&str> = turn.tokens().collect();
        match norm {
            RoleNormalization::PerToken => {
                matched += lex.count_matches(&tokens);
                total += tokens.len();
            }
            RoleNormalization::PerTurn => {
                matched += usize::from(lex.contains_any(&tokens));
                total += 1;
            }
        }
    }
    if turns == 0 {
        return None;
    }
    let score = matched as f64 / total as f64;
    Some(RoleScore { score, matched, total, band: BandPosition::of(score) })
}

/// Share of each role's tokens matched by that role's lexicon. Multi-word
/// entries match contiguous tokens inside one turn; each start position
/// counts once.
pub fn role_consistency(
    d: &Dialogue,
    doctor_lex: &Lexicon,
    patient_lex: &Lexicon,
    norm: RoleNormalization,
) -> Result<RoleConsistency, LexicalError> {
    doctor_lex.require_non_empty()?;
    patient_lex.require_non_empty()?;
    let doctor = role_score(d, &Speaker::Doctor, doctor_lex, norm).ok_or(LexicalError::MissingRole("doctor"))?;
    let patient = role_score(d, &Speaker::Patient, patient_lex, norm).ok_or(LexicalError::MissingRole("patient"))?;
    let mean = (doctor.score + patient.score) / 2.0;
    Ok(RoleConsistency { doctor, patient, mean, band: BandPosition::of(mean) })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicHits {
    pub topic: String,
    pub hits: usize,
    /// Share of this topic among all topic hits of the dialogue (0 when
    /// nothing matched).
    pub proportion: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicCoverage {
    pub per_topic: Vec<TopicHits>,
    pub total_hits: usize,
    /// Topics with at least one hit over the number of topics.
    pub score: f64,
}

/// Counts keyword occurrences per topic across the whole dialogue and the
/// fraction of topics that are evidenced at all.
pub fn topic_coverage(d: &Dialogue, topics: &[Lexicon]) -> Result<TopicCoverage, LexicalError> {
    if topics.is_empty() {
        return Err(LexicalError::NoTopics);
    }
    let turn_tokens: Vec<Vec<&str>> = d.turns().iter().map(|t| t.tokens().collect()).collect();
    let hits: Vec<usize> = topics
        .iter()
        .map(|lex| turn_tokens.iter().map(|tokens| lex.count_matches(tokens)).sum())
        .collect();
    let total_hits: usize = hits.iter().sum();
    let covered = hits.iter().filter(|&&h| h > 0).count();
    let per_topic = topics
        .iter()
        .zip(&hits)
        .map(|(lex, &h)| TopicHits {
            topic: topic_name(lex),
            hits: h,
            proportion: if total_hits == 0 { 0.0 } else { h as f64 / total_hits as f64 },
        })
        .collect();
    Ok(TopicCoverage { per_topic, total_hits, score: covered as f64 / topics.len() as f64 })
}

pub(crate) fn topic_name(lex: &Lexicon) -> String {
    match lex.scope() {
        crate::lexicon::LexiconScope::Topic(name) => name.clone(),
        _ => lex.name().to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dialogue::{parse_transcript, LabelMap};
    use crate::lexicon::LexiconScope;
    use proptest::prelude::*;

    fn dialogue(text: &str) -> Dialogue {
        parse_transcript(text, &LabelMap::default()).unwrap()
    }

    fn naive_ttr(tokens: &[u32]) -> f64 {
        let mut seen: Vec<u32> = Vec::new();
        for t in tokens {
            if !seen.contains(t) {
                seen.push(*t);
            }
        }
        seen.len() as f64 / tokens.len() as f64
    }

    fn naive_mattr(tokens: &[u32], w: usize) -> f64 {
        let n = tokens.len() - w + 1;
        (0..n).map(|i| naive_ttr(&tokens[i..i + w])).sum::<f64>() / n as f64
    }

    #[test]
    fn ttr_examples() {
        assert_eq!(ttr(&["a", "b", "c"]).unwrap(), 1.0);
        assert_eq!(ttr(&["a", "a", "a", "a"]).unwrap(), 0.25);
        assert_eq!(ttr::<&str>(&[]), Err(LexicalError::EmptyTokenStream));
    }

    #[test]
    fn msttr_all_distinct() {
        let tokens: Vec<u32> = (0..50).collect();
        assert_eq!(msttr(&tokens, 50).unwrap(), 1.0);
    }

    #[test]
    fn msttr_two_segments() {
        let mut tokens: Vec<u32> = (0..50).collect();
        tokens.extend((0..50).map(|i| 100 + i % 25));
        assert_eq!(segment_ttrs(&tokens, 50).unwrap(), vec![1.0, 0.5]);
        assert_eq!(msttr(&tokens, 50).unwrap(), 0.75);
    }

    #[test]
    fn msttr_discards_partial_segment() {
        let tokens: Vec<u32> = (0..149).map(|i| if i < 100 { i } else { 7 }).collect();
        assert_eq!(segment_ttrs(&tokens, 50).unwrap().len(), 2);
        assert_eq!(msttr(&tokens, 50).unwrap(), 1.0);
    }

    #[test]
    fn window_errors() {
        let tokens: Vec<u32> = (0..49).collect();
        assert_eq!(msttr(&tokens, 50), Err(LexicalError::TextTooShort { len: 49, window: 50 }));
        assert_eq!(mattr(&tokens, 50), Err(LexicalError::TextTooShort { len: 49, window: 50 }));
        assert_eq!(mattr(&tokens, 0), Err(LexicalError::ZeroWindow));
    }

    #[test]
    fn mattr_constant_and_distinct() {
        assert_eq!(mattr(&[9u32; 120], 50).unwrap(), 1.0 / 50.0);
        let distinct: Vec<u32> = (0..300).collect();
        assert_eq!(mattr(&distinct, 50).unwrap(), 1.0);
    }

    #[test]
    fn role_consistency_half_match() {
        let doc = Lexicon::new("d", LexiconScope::RoleDoctor, ["dialyse"]);
        let pat = Lexicon::new("p", LexiconScope::RolePatient, ["pijn"]);
        let d = dialogue("Arts: dialyse nodig\nPatiënt: Ik ben moe.");
        let rc = role_consistency(&d, &doc, &pat, RoleNormalization::PerToken).unwrap();
        assert_eq!(rc.doctor.score, 0.5);
        assert_eq!(rc.patient.score, 0.0);
        assert_eq!(rc.mean, 0.25);
        assert_eq!(rc.doctor.band, BandPosition::Above);
        assert_eq!(rc.patient.band, BandPosition::Below);
        assert_eq!(rc.band, BandPosition::Within);
    }

    #[test]
    fn role_consistency_per_turn_variant() {
        let doc = Lexicon::new("d", LexiconScope::RoleDoctor, ["dialyse"]);
        let pat = Lexicon::new("p", LexiconScope::RolePatient, ["pijn"]);
        let d = dialogue("Arts: dialyse nodig\nPatiënt: pijn\nArts: goed zo\nPatiënt: ja");
        let rc = role_consistency(&d, &doc, &pat, RoleNormalization::PerTurn).unwrap();
        assert_eq!(rc.doctor.score, 0.5);
        assert_eq!(rc.patient.score, 0.5);
    }

    #[test]
    fn role_consistency_missing_role() {
        let doc = Lexicon::new("d", LexiconScope::RoleDoctor, ["dialyse"]);
        let pat = Lexicon::new("p", LexiconScope::RolePatient, ["pijn"]);
        let d = dialogue("Arts: dialyse nodig\nArts: ja");
        assert_eq!(
            role_consistency(&d, &doc, &pat, RoleNormalization::PerToken),
            Err(LexicalError::MissingRole("patient"))
        );
        let empty = Lexicon::new("leeg", LexiconScope::RolePatient, Vec::<&str>::new());
        assert_eq!(
            role_consistency(&d, &doc, &empty, RoleNormalization::PerToken),
            Err(LexicalError::EmptyLexicon("leeg".into()))
        );
    }

    fn topics() -> Vec<Lexicon> {
        [("a", "pijn"), ("b", "pil"), ("c", "wandelen"), ("d", "kalium")]
            .iter()
            .map(|(t, w)| Lexicon::new(*t, LexiconScope::Topic(t.to_string()), [*w]))
            .collect()
    }

    #[test]
    fn full_coverage() {
        let d = dialogue("Arts: pijn en een pil?\nPatiënt: Ik ga wandelen. Kalium is hoog. Pijn!");
        let tc = topic_coverage(&d, &topics()).unwrap();
        assert_eq!(tc.score, 1.0);
        assert_eq!(tc.total_hits, 5);
        assert_eq!(tc.per_topic[0].hits, 2);
        assert_eq!(tc.per_topic[0].proportion, 0.4);
    }

    #[test]
    fn zero_hits() {
        let d = dialogue("Arts: Hallo.\nPatiënt: Hoi.");
        let tc = topic_coverage(&d, &topics()).unwrap();
        assert_eq!(tc.score, 0.0);
        assert!(tc.per_topic.iter().all(|t| t.proportion == 0.0));
        assert_eq!(topic_coverage(&d, &[]), Err(LexicalError::NoTopics));
    }

    proptest! {
        #[test]
        fn mattr_matches_naive(tokens in prop::collection::vec(0u32..30, 1..400), w in 1usize..60) {
            prop_assume!(tokens.len() >= w);
            let fast = mattr(&tokens, w).unwrap();
            prop_assert!((fast - naive_mattr(&tokens, w)).abs() <= 1e-12);
        }

        #[test]
        fn msttr_is_mean_of_segment_ttrs(tokens in prop::collection::vec(0u32..40, 1..500), w in 1usize..60) {
            prop_assume!(tokens.len() >= w);
            let segments = segment_ttrs(&tokens, w).unwrap();
            prop_assert!(segments.iter().all(|&s| s > 0.0 && s <= 1.0));
            let oracle: Vec<f64> = (0..tokens.len() / w).map(|i| naive_ttr(&tokens[i * w..(i + 1) * w])).collect();
            prop_assert_eq!(&segments, &oracle);
            let mean = oracle.iter().sum::<f64>() / oracle.len() as f64;
            prop_assert!((msttr(&tokens, w).unwrap() - mean).abs() <= 1e-12);
        }

        #[test]
        fn ttr_permutation_invariant(mut tokens in prop::collection::vec(0u32..20, 1..100), seed in any::<u64>()) {
            let before = ttr(&tokens).unwrap();
            prop_assert!(before <= 1.0);
            let n = tokens.len();
            let mut s = seed;
            for i in (1..n).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                tokens.swap(i, (s >> 33) as usize % (i + 1));
            }
            prop_assert_eq!(before, ttr(&tokens).unwrap());
        }

        #[test]
        fn role_scores_bounded_and_set_semantic(words in prop::collection::vec(prop::sample::select(vec!["pijn", "dialyse", "ja", "nee", "eerste", "hulp"]), 1..40)) {
            let text = format!("Arts: {}\nPatiënt: {}", words.join(" "), words.iter().rev().cloned().collect::<Vec<_>>().join(" "));
            let d = dialogue(&text);
            let doc = Lexicon::new("d", LexiconScope::RoleDoctor, ["dialyse", "eerste hulp"]);
            let doc_dup = Lexicon::new("d", LexiconScope::RoleDoctor, ["dialyse", "eerste hulp", "dialyse", "Eerste hulp"]);
            let pat = Lexicon::new("p", LexiconScope::RolePatient, ["pijn"]);
            let a = role_consistency(&d, &doc, &pat, RoleNormalization::PerToken).unwrap();
            let b = role_consistency(&d, &doc_dup, &pat, RoleNormalization::PerToken).unwrap();
            prop_assert_eq!(a, b);
            for s in [a.doctor.score, a.patient.score, a.mean] {
                prop_assert!((0.0..=1.0).contains(&s));
            }
        }

        #[test]
        fn coverage_monotone_under_append(idx in 0usize..4) {
            let base = "Arts: pijn nu\nPatiënt: ja";
            let keywords = ["pijn", "pil", "wandelen", "kalium"];
            let before = topic_coverage(&dialogue(base), &topics()).unwrap().score;
            let after = topic_coverage(&dialogue(&format!("{base} {}", keywords[idx])), &topics()).unwrap().score;
            prop_assert!(after >= before);
        }
    }
}
