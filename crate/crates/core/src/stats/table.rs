use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Rubric categories, each scored 0..=5.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Coherence,
    Consistency,
    Fluency,
    Relevance,
    ClinicalUse,
}

impl Category {
    pub const ALL: [Category; 5] = [
        Category::Coherence,
        Category::Consistency,
        Category::Fluency,
        Category::Relevance,
        Category::ClinicalUse,
    ];

    pub fn key(self) -> &'static str {
        match self {
            Category::Coherence => "coherence",
            Category::Consistency => "consistency",
            Category::Fluency => "fluency",
            Category::Relevance => "relevance",
            Category::ClinicalUse => "clinical_use",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for Category {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Category::ALL
            .into_iter()
            .find(|c| c.key() == s)
            .ok_or_else(|| s.to_string())
    }
}

pub const MAX_SCORE: u8 = 5;

/// A rated unit: one dialogue under one category.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Item {
    pub dialogue_id: String,
    pub category: Category,
}

impl Item {
    pub fn new(dialogue_id: impl Into<String>, category: Category) -> Self {
        Self { dialogue_id: dialogue_id.into(), category }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CellError {
    OutOfRange(u8),
    Duplicate,
}

/// Sparse rater × item score matrix. Absent cells are simply missing;
/// cells a rater deliberately skipped are tracked separately so exports can
/// reproduce them.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RatingTable {
    raters: BTreeSet<String>,
    items: BTreeSet<Item>,
    scores: BTreeMap<(String, Item), u8>,
    skipped: BTreeSet<(String, Item)>,
}

impl RatingTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, rater: &str, item: Item, score: u8) -> Result<(), CellError> {
        if score > MAX_SCORE {
            return Err(CellError::OutOfRange(score));
        }
        let key = (rater.to_string(), item);
        if self.scores.contains_key(&key) || self.skipped.contains(&key) {
            return Err(CellError::Duplicate);
        }
        self.raters.insert(key.0.clone());
        self.items.insert(key.1.clone());
        self.scores.insert(key, score);
        Ok(())
    }

    /// Records an explicitly skipped (missing) cell.
    pub fn skip(&mut self, rater: &str, item: Item) -> Result<(), CellError> {
        let key = (rater.to_string(), item);
        if self.scores.contains_key(&key) || self.skipped.contains(&key) {
            return Err(CellError::Duplicate);
        }
        self.raters.insert(key.0.clone());
        self.items.insert(key.1.clone());
        self.skipped.insert(key);
        Ok(())
    }

    pub fn raters(&self) -> &BTreeSet<String> {
        &self.raters
    }

    pub fn items(&self) -> &BTreeSet<Item> {
        &self.items
    }

    pub fn score(&self, rater: &str, item: &Item) -> Option<u8> {
        self.scores.get(&(rater.to_string(), item.clone())).copied()
    }

    pub fn scores(&self) -> impl Iterator<Item = (&str, &Item, u8)> {
        self.scores.iter().map(|((r, i), s)| (r.as_str(), i, *s))
    }

    pub fn skipped(&self) -> impl Iterator<Item = (&str, &Item)> {
        self.skipped.iter().map(|(r, i)| (r.as_str(), i))
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn dialogue_ids(&self) -> BTreeSet<&str> {
        self.items.iter().map(|i| i.dialogue_id.as_str()).collect()
    }

    pub fn categories(&self) -> BTreeSet<Category> {
        self.items.iter().map(|i| i.category).collect()
    }

    fn filtered(&self, keep: impl Fn(&str, &Item) -> bool) -> Self {
        let mut out = Self::new();
        for ((r, i), s) in &self.scores {
            if keep(r, i) {
                out.raters.insert(r.clone());
                out.items.insert(i.clone());
                out.scores.insert((r.clone(), i.clone()), *s);
            }
        }
        for (r, i) in &self.skipped {
            if keep(r, i) {
                out.raters.insert(r.clone());
                out.items.insert(i.clone());
                out.skipped.insert((r.clone(), i.clone()));
            }
        }
        out
    }

    pub fn for_category(&self, category: Category) -> Self {
        self.filtered(|_, i| i.category == category)
    }

    pub fn without_rater(&self, rater: &str) -> Self {
        self.filtered(|r, _| r != rater)
    }

    /// Present scores per item, in rater order. Items without any present
    /// score are omitted.
    pub fn unit_values(&self) -> Vec<Vec<u8>> {
        let mut units: BTreeMap<&Item, Vec<u8>> = BTreeMap::new();
        for ((_, item), score) in &self.scores {
            units.entry(item).or_default().push(*score);
        }
        units.into_values().collect()
    }
}
