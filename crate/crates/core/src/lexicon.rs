//! Keyword lexicons and token-sequence matching.
//!
//! Lexicon files are UTF-8, one phrase per line, `#` starts a comment line.
//! Every entry is normalized with the same tokenizer used for dialogues, so
//! `PET` matches the token `pet` and `eerste hulp` matches the contiguous
//! tokens `eerste`, `hulp`. Matching never looks inside a token, so `dag`
//! does not match `vandaag`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dialogue::tokenize;

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("lexicon directory {0} does not exist")]
    MissingDirectory(PathBuf),
    #[error("required lexicon file {0} is missing")]
    MissingFile(PathBuf),
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("lexicon '{0}' has no entries")]
    EmptyLexicon(String),
    #[error("no topic lexicons (topic-*.txt) found in {0}")]
    NoTopics(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LexiconScope {
    RoleDoctor,
    RolePatient,
    Topic(String),
    Greeting,
    Closing,
}

impl fmt::Display for LexiconScope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LexiconScope::RoleDoctor => f.write_str("role-doctor"),
            LexiconScope::RolePatient => f.write_str("role-patient"),
            LexiconScope::Topic(name) => write!(f, "topic-{name}"),
            LexiconScope::Greeting => f.write_str("greetings"),
            LexiconScope::Closing => f.write_str("closings"),
        }
    }
}

/// A named set of normalized phrases.
///
/// Entries are kept as a set, so duplicates in the source list collapse.
/// A lexicon may be empty; metrics that need entries report
/// [`LexiconError::EmptyLexicon`] or a warning themselves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicon {
    name: String,
    scope: LexiconScope,
    entries: BTreeSet<String>,
    by_first: HashMap<String, Vec<Vec<String>>>,
}

impl Lexicon {
    pub fn new<I, S>(name: impl Into<String>, scope: LexiconScope, phrases: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let entries: BTreeSet<String> = phrases
            .into_iter()
            .map(|p| tokenize(p.as_ref()).join(" "))
            .filter(|p| !p.is_empty())
            .collect();
        let mut by_first: HashMap<String, Vec<Vec<String>>> = HashMap::new();
        for entry in &entries {
            let tokens: Vec<String> = entry.split(' ').map(str::to_string).collect();
            by_first.entry(tokens[0].clone()).or_default().push(tokens);
        }
        Self { name: name.into(), scope, entries, by_first }
    }

    /// Parses lexicon file contents.
    pub fn parse(name: impl Into<String>, scope: LexiconScope, contents: &str) -> Self {
        Self::new(name, scope, phrase_lines(contents))
    }

    pub fn load(path: &Path, scope: LexiconScope) -> Result<Self, LexiconError> {
        let contents = std::fs::read_to_string(path).map_err(|source| LexiconError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        Ok(Self::parse(name, scope, &contents))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn scope(&self) -> &LexiconScope {
        &self.scope
    }

    pub fn entries(&self) -> &BTreeSet<String> {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn require_non_empty(&self) -> Result<&Self, LexiconError> {
        if self.is_empty() {
            Err(LexiconError::EmptyLexicon(self.name.clone()))
        } else {
            Ok(self)
        }
    }

    /// Whether some entry matches `tokens` starting exactly at `pos`.
    pub fn matches_at<S: AsRef<str>>(&self, tokens: &[S], pos: usize) -> bool {
        let Some(candidates) = self.by_first.get(tokens[pos].as_ref()) else {
            return false;
        };
        candidates.iter().any(|entry| {
            entry.len() <= tokens.len() - pos
                && entry
                    .iter()
                    .zip(&tokens[pos..])
                    .all(|(e, t)| e == t.as_ref())
        })
    }

    /// Start positions at which at least one entry matches. Each position is
    /// reported once even when several entries start there.
    pub fn match_positions<S: AsRef<str>>(&self, tokens: &[S]) -> Vec<usize> {
        (0..tokens.len()).filter(|&i| self.matches_at(tokens, i)).collect()
    }

    pub fn count_matches<S: AsRef<str>>(&self, tokens: &[S]) -> usize {
        (0..tokens.len()).filter(|&i| self.matches_at(tokens, i)).count()
    }

    pub fn contains_any<S: AsRef<str>>(&self, tokens: &[S]) -> bool {
        (0..tokens.len()).any(|i| self.matches_at(tokens, i))
    }
}

/// Non-empty, non-comment lines of a lexicon file, trimmed but otherwise
/// verbatim.
pub fn phrase_lines(contents: &str) -> impl Iterator<Item = &str> {
    contents
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
}

/// Built-in lexicon files, by file name.
pub const BUILTIN_FILES: &[(&str, &str)] = &[
    ("role-doctor.txt", include_str!("../data/lexicons/role-doctor.txt")),
    ("role-patient.txt", include_str!("../data/lexicons/role-patient.txt")),
    ("topic-symptomen.txt", include_str!("../data/lexicons/topic-symptomen.txt")),
    ("topic-medicatiegebruik.txt", include_str!("../data/lexicons/topic-medicatiegebruik.txt")),
    ("topic-leefstijl.txt", include_str!("../data/lexicons/topic-leefstijl.txt")),
    ("topic-laboratoriumuitslagen.txt", include_str!("../data/lexicons/topic-laboratoriumuitslagen.txt")),
    ("greetings.txt", include_str!("../data/lexicons/greetings.txt")),
    ("closings.txt", include_str!("../data/lexicons/closings.txt")),
];

/// Topic order used when a directory holds the default topic files.
pub const DEFAULT_TOPICS: &[&str] = &["symptomen", "medicatiegebruik", "leefstijl", "laboratoriumuitslagen"];

/// Every lexicon the evaluation suite needs.
#[derive(Debug, Clone)]
pub struct LexiconSet {
    pub doctor: Lexicon,
    pub patient: Lexicon,
    pub topics: Vec<Lexicon>,
    pub greetings: Lexicon,
    pub closings: Lexicon,
}

fn builtin(file: &str) -> &'static str {
    BUILTIN_FILES
        .iter()
        .find(|(name, _)| *name == file)
        .map(|(_, contents)| *contents)
        .expect("builtin lexicon table is complete")
}

impl LexiconSet {
    pub fn builtin() -> Self {
        let stem = |f: &str| f.trim_end_matches(".txt").to_string();
        let file = |f: &str, scope| Lexicon::parse(stem(f), scope, builtin(f));
        Self {
            doctor: file("role-doctor.txt", LexiconScope::RoleDoctor),
            patient: file("role-patient.txt", LexiconScope::RolePatient),
            topics: DEFAULT_TOPICS
                .iter()
                .map(|t| {
                    let f = format!("topic-{t}.txt");
                    file(&f, LexiconScope::Topic((*t).to_string()))
                })
                .collect(),
            greetings: file("greetings.txt", LexiconScope::Greeting),
            closings: file("closings.txt", LexiconScope::Closing),
        }
    }

    /// Loads `role-doctor.txt`, `role-patient.txt`, `greetings.txt`,
    /// `closings.txt` and every `topic-<name>.txt` from `dir`.
    pub fn load_dir(dir: &Path) -> Result<Self, LexiconError> {
        if !dir.is_dir() {
            return Err(LexiconError::MissingDirectory(dir.to_path_buf()));
        }
        let required = |file: &str, scope: LexiconScope| {
            let path = dir.join(file);
            if !path.is_file() {
                return Err(LexiconError::MissingFile(path));
            }
            Lexicon::load(&path, scope)
        };
        let doctor = required("role-doctor.txt", LexiconScope::RoleDoctor)?;
        let patient = required("role-patient.txt", LexiconScope::RolePatient)?;
        let greetings = required("greetings.txt", LexiconScope::Greeting)?;
        let closings = required("closings.txt", LexiconScope::Closing)?;
        doctor.require_non_empty()?;
        patient.require_non_empty()?;

        let entries = std::fs::read_dir(dir).map_err(|source| LexiconError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        let mut topic_names = Vec::new();
        for entry in entries {
            let entry = entry.map_err(|source| LexiconError::Io { path: dir.to_path_buf(), source })?;
            let file_name = entry.file_name().to_string_lossy().into_owned();
            if let Some(name) = file_name.strip_prefix("topic-").and_then(|n| n.strip_suffix(".txt")) {
                topic_names.push(name.to_string());
            }
        }
        if topic_names.is_empty() {
            return Err(LexiconError::NoTopics(dir.to_path_buf()));
        }
        topic_names.sort_by_key(|name| {
            let rank = DEFAULT_TOPICS.iter().position(|t| t == name).unwrap_or(DEFAULT_TOPICS.len());
            (rank, name.clone())
        });
        let topics = topic_names
            .into_iter()
            .map(|name| {
                let lex = Lexicon::load(&dir.join(format!("topic-{name}.txt")), LexiconScope::Topic(name))?;
                lex.require_non_empty()?;
                Ok(lex)
            })
            .collect::<Result<Vec<_>, LexiconError>>()?;
        Ok(Self { doctor, patient, topics, greetings, closings })
    }

    /// Writes the built-in lexicon files into `dir`.
    pub fn write_builtin(dir: &Path) -> std::io::Result<()> {
        std::fs::create_dir_all(dir)?;
        for (name, contents) in BUILTIN_FILES {
            std::fs::write(dir.join(name), contents)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lex(phrases: &[&str]) -> Lexicon {
        Lexicon::new("t", LexiconScope::Topic("t".into()), phrases)
    }

    #[test]
    fn entries_are_normalized_and_deduplicated() {
        let l = lex(&["PET", " pet ", "Eerste Hulp", "dag, tot de volgende keer", "..."]);
        let entries: Vec<_> = l.entries().iter().cloned().collect();
        assert_eq!(entries, vec!["dag tot de volgende keer", "eerste hulp", "pet"]);
    }

    #[test]
    fn multi_word_matches_contiguously() {
        let l = lex(&["eerste hulp"]);
        assert_eq!(l.match_positions(&["naar", "eerste", "hulp"]), vec![1]);
        assert!(l.match_positions(&["eerste", "de", "hulp"]).is_empty());
        assert!(l.match_positions(&["eerste"]).is_empty());
    }

    #[test]
    fn overlapping_entries_count_each_start_once() {
        let l = lex(&["pijn", "brandende pijn", "brandende"]);
        assert_eq!(l.match_positions(&["brandende", "pijn"]), vec![0, 1]);
    }

    #[test]
    fn no_substring_matches() {
        let l = lex(&["dag"]);
        assert!(!l.contains_any(&["vandaag", "dagen"]));
        assert!(l.contains_any(&["goede", "dag"]));
    }

    #[test]
    fn comments_and_blank_lines() {
        let l = Lexicon::parse("g", LexiconScope::Greeting, "# header\n\nhallo\n  # indented comment\nwelkom\n");
        assert_eq!(l.len(), 2);
    }

    #[test]
    fn builtin_set_is_complete() {
        let set = LexiconSet::builtin();
        assert_eq!(set.topics.len(), 4);
        assert_eq!(set.doctor.len(), 42);
        assert_eq!(set.patient.len(), 32);
        assert!(set.doctor.entries().contains("pet"));
        let names: Vec<_> = set.topics.iter().map(|t| t.name().to_string()).collect();
        assert_eq!(names[0], "topic-symptomen");
    }

    #[test]
    fn load_dir_round_trip_and_missing_paths() {
        let tmp = tempfile::tempdir().unwrap();
        LexiconSet::write_builtin(tmp.path()).unwrap();
        let loaded = LexiconSet::load_dir(tmp.path()).unwrap();
        let builtin = LexiconSet::builtin();
        assert_eq!(loaded.doctor.entries(), builtin.doctor.entries());
        let scopes: Vec<_> = loaded.topics.iter().map(|t| t.scope().clone()).collect();
        let expected: Vec<_> = builtin.topics.iter().map(|t| t.scope().clone()).collect();
        assert_eq!(scopes, expected);

        std::fs::remove_file(tmp.path().join("role-patient.txt")).unwrap();
        assert!(matches!(LexiconSet::load_dir(tmp.path()), Err(LexiconError::MissingFile(p)) if p.ends_with("role-patient.txt")));
        assert!(matches!(
            LexiconSet::load_dir(&tmp.path().join("nope")),
            Err(LexiconError::MissingDirectory(_))
        ));
    }
}
