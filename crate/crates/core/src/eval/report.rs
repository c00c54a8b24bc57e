use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::dialogue::{Dialogue, DialogueSource};
use crate::lexical::{self, RoleConsistency, RoleNormalization, TopicCoverage, DEFAULT_WINDOW};
use crate::lexicon::LexiconSet;
use crate::stats::{mean_sd, Summary};
use crate::structural::{self, detect_phrases, LexiconWarning, PhraseScope};

/// Per-dialogue quantities. Declaration order is report order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    AlternationRate,
    RoleConsistency,
    Asl,
    Spt,
    TopicCoverage,
    Ttr,
    Msttr,
    Mattr,
    GreetingCount,
    ClosingCount,
    WordCount,
    TurnCount,
}

impl Metric {
    pub const ALL: [Metric; 12] = [
        Metric::AlternationRate,
        Metric::RoleConsistency,
        Metric::Asl,
        Metric::Spt,
        Metric::TopicCoverage,
        Metric::Ttr,
        Metric::Msttr,
        Metric::Mattr,
        Metric::GreetingCount,
        Metric::ClosingCount,
        Metric::WordCount,
        Metric::TurnCount,
    ];

    /// Rows of the summary table, in order.
    pub const TABLE: [Metric; 7] = [
        Metric::AlternationRate,
        Metric::RoleConsistency,
        Metric::Asl,
        Metric::Spt,
        Metric::TopicCoverage,
        Metric::Ttr,
        Metric::Msttr,
    ];

    pub fn key(self) -> &'static str {
        match self {
            Metric::AlternationRate => "alternation_rate",
            Metric::RoleConsistency => "role_consistency",
            Metric::Asl => "asl",
            Metric::Spt => "spt",
            Metric::TopicCoverage => "topic_coverage",
            Metric::Ttr => "ttr",
            Metric::Msttr => "msttr",
            Metric::Mattr => "mattr",
            Metric::GreetingCount => "greeting_count",
            Metric::ClosingCount => "closing_count",
            Metric::WordCount => "word_count",
            Metric::TurnCount => "turn_count",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Metric::AlternationRate => "Alternation rate",
            Metric::RoleConsistency => "Role consistency",
            Metric::Asl => "ASL",
            Metric::Spt => "Average SPT",
            Metric::TopicCoverage => "Topic coverage",
            Metric::Ttr => "TTR",
            Metric::Msttr => "MSTTR",
            Metric::Mattr => "MATTR",
            Metric::GreetingCount => "Greeting Detection",
            Metric::ClosingCount => "Closing Detection",
            Metric::WordCount => "Words",
            Metric::TurnCount => "Turns",
        }
    }

    fn decimals(self) -> usize {
        match self {
            Metric::Asl | Metric::Spt => 2,
            _ => 3,
        }
    }
}

/// A metric value, or the reason it could not be computed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MetricCell {
    Value(f64),
    Absent { absent: String },
}

impl MetricCell {
    pub fn value(&self) -> Option<f64> {
        match self {
            MetricCell::Value(v) => Some(*v),
            MetricCell::Absent { .. } => None,
        }
    }

    fn from_result<E: std::fmt::Display>(r: Result<f64, E>) -> Self {
        match r {
            Ok(v) => MetricCell::Value(v),
            Err(e) => MetricCell::Absent { absent: e.to_string() },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DialogueMetrics {
    pub source: DialogueSource,
    pub cells: BTreeMap<Metric, MetricCell>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub role: Option<RoleConsistency>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub topics: Option<TopicCoverage>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl DialogueMetrics {
    pub fn value(&self, metric: Metric) -> Option<f64> {
        self.cells.get(&metric).and_then(MetricCell::value)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Totals {
    pub greetings: usize,
    pub closings: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalOptions {
    pub window: usize,
    pub role_normalization: RoleNormalization,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self { window: DEFAULT_WINDOW, role_normalization: RoleNormalization::PerToken }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub options: EvalOptions,
    pub topics: Vec<String>,
    pub per_dialogue: BTreeMap<String, DialogueMetrics>,
    /// Mean and sample SD over the dialogues where the metric is present.
    pub corpus: BTreeMap<Metric, Summary>,
    pub totals: Totals,
}

fn evaluate_one(d: &Dialogue, lex: &LexiconSet, opts: &EvalOptions) -> DialogueMetrics {
    let mut cells = BTreeMap::new();
    let mut warnings = Vec::new();
    let tokens = d.tokens();

    cells.insert(Metric::AlternationRate, MetricCell::from_result(structural::alternation_rate(d)));
    cells.insert(Metric::Asl, MetricCell::from_result(structural::average_sentence_length(d)));
    cells.insert(Metric::Spt, MetricCell::Value(structural::sentences_per_turn(d)));
    for (metric, lexicon, scope) in [
        (Metric::GreetingCount, &lex.greetings, PhraseScope::Greeting),
        (Metric::ClosingCount, &lex.closings, PhraseScope::Closing),
    ] {
        let found = detect_phrases(d, lexicon, scope);
        if found.warning == Some(LexiconWarning::EmptyLexicon) {
            warnings.push(format!("{} lexicon is empty", lexicon.name()));
        }
        cells.insert(metric, MetricCell::Value(found.count as f64));
    }

    let role = lexical::role_consistency(d, &lex.doctor, &lex.patient, opts.role_normalization);
    cells.insert(Metric::RoleConsistency, MetricCell::from_result(role.as_ref().map(|r| r.mean).map_err(Clone::clone)));
    let topics = lexical::topic_coverage(d, &lex.topics);
    cells.insert(Metric::TopicCoverage, MetricCell::from_result(topics.as_ref().map(|t| t.score).map_err(Clone::clone)));

    cells.insert(Metric::Ttr, MetricCell::from_result(lexical::ttr(&tokens)));
    cells.insert(Metric::Msttr, MetricCell::from_result(lexical::msttr(&tokens, opts.window)));
    cells.insert(Metric::Mattr, MetricCell::from_result(lexical::mattr(&tokens, opts.window)));
    cells.insert(Metric::WordCount, MetricCell::Value(d.word_count() as f64));
    cells.insert(Metric::TurnCount, MetricCell::Value(d.turn_count() as f64));

    DialogueMetrics { source: d.source(), cells, role: role.ok(), topics: topics.ok(), warnings }
}

/// Computes every metric for every dialogue (in parallel), then the corpus
/// aggregates. A metric that fails for one dialogue becomes an absent cell
/// carrying the reason; it never aborts the run.
pub fn evaluate_corpus(
    dialogues: &[Dialogue],
    lexicons: &LexiconSet,
    options: EvalOptions,
) -> Result<MetricReport, EvalError> {
    if dialogues.is_empty() {
        return Err(EvalError::EmptyCorpus);
    }
    if options.window == 0 {
        return Err(EvalError::ZeroWindow);
    }
    lexicons.doctor.require_non_empty()?;
    lexicons.patient.require_non_empty()?;
    if lexicons.topics.is_empty() {
        return Err(EvalError::NoTopics);
    }
    for t in &lexicons.topics {
        t.require_non_empty()?;
    }

    let rows: Vec<DialogueMetrics> = dialogues.par_iter().map(|d| evaluate_one(d, lexicons, &options)).collect();
    let mut per_dialogue = BTreeMap::new();
    for (d, row) in dialogues.iter().zip(rows) {
        if per_dialogue.insert(d.id().to_string(), row).is_some() {
            return Err(EvalError::DuplicateId(d.id().to_string()));
        }
    }
    let corpus = aggregate(&per_dialogue);
    let totals = Totals {
        greetings: per_dialogue.values().filter_map(|r| r.value(Metric::GreetingCount)).sum::<f64>() as usize,
        closings: per_dialogue.values().filter_map(|r| r.value(Metric::ClosingCount)).sum::<f64>() as usize,
    };
    Ok(MetricReport {
        options,
        topics: lexicons.topics.iter().map(lexical::topic_name).collect(),
        per_dialogue,
        corpus,
        totals,
    })
}

/// Corpus mean/SD per metric from the per-dialogue cells.
pub(crate) fn aggregate(per_dialogue: &BTreeMap<String, DialogueMetrics>) -> BTreeMap<Metric, Summary> {
    Metric::ALL
        .into_iter()
        .filter_map(|m| {
            let values: Vec<f64> = per_dialogue.values().filter_map(|r| r.value(m)).collect();
            mean_sd(&values).ok().map(|s| (m, s))
        })
        .collect()
}

impl MetricReport {
    /// Values of one metric across dialogues, in id order.
    pub fn values(&self, metric: Metric) -> Vec<(&str, Option<f64>)> {
        self.per_dialogue.iter().map(|(id, r)| (id.as_str(), r.value(metric))).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    /// Aligned plain-text summary: mean/SD rows followed by detection totals.
    pub fn to_table(&self) -> String {
        let fmt = |v: f64, m: Metric| format!("{v:.*}", m.decimals());
        let mut rows: Vec<[String; 3]> = vec![["Metric".into(), "Mean".into(), "SD".into()]];
        for m in Metric::TABLE {
            let (mean, sd) = match self.corpus.get(&m) {
                Some(s) => (fmt(s.mean, m), fmt(s.sd, m)),
                None => ("-".into(), "-".into()),
            };
            rows.push([m.label().into(), mean, sd]);
        }
        let totals = [
            ["Metric".to_string(), "Total Qty".to_string(), String::new()],
            [Metric::GreetingCount.label().into(), self.totals.greetings.to_string(), "-".into()],
            [Metric::ClosingCount.label().into(), self.totals.closings.to_string(), "-".into()],
        ];
        let all = rows.iter().chain(totals.iter());
        let w0 = all.clone().map(|r| r[0].chars().count()).max().unwrap_or(0);
        let w1 = all.clone().map(|r| r[1].len()).max().unwrap_or(0);
        let w2 = all.map(|r| r[2].len()).max().unwrap_or(0);
        let rule = "=".repeat(w0 + w1 + w2 + 4);

        let mut out = String::new();
        let block = |out: &mut String, rows: &[[String; 3]]| {
            for (i, r) in rows.iter().enumerate() {
                let line = format!("{:<w0$}  {:>w1$}  {:>w2$}", r[0], r[1], r[2]);
                let _ = writeln!(out, "{}", line.trim_end());
                if i == 0 {
                    let _ = writeln!(out, "{rule}");
                }
            }
        };
        block(&mut out, &rows);
        out.push('\n');
        block(&mut out, &totals);
        let _ = writeln!(out, "\n{} dialogue(s), window {}", self.per_dialogue.len(), self.options.window);
        out
    }
}
