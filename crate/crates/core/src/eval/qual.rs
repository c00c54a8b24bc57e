use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::report::{Metric, MetricReport};
use super::EvalError;
use crate::stats::{
    krippendorff_alpha, leave_one_out_alpha, mean_sd, median, spearman_rho, AlphaResult, Category,
    CorrelationResult, Level, RatingTable, StatsError, Summary,
};

/// How several raters' scores for one dialogue are pooled before
/// correlating with a quantitative metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pooling {
    #[default]
    Mean,
    Median,
}

impl FromStr for Pooling {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mean" => Ok(Pooling::Mean),
            "median" => Ok(Pooling::Median),
            other => Err(format!("unknown pooling '{other}' (expected mean or median)")),
        }
    }
}

impl Pooling {
    fn pool(self, values: &[f64]) -> Option<f64> {
        match self {
            Pooling::Mean => mean_sd(values).ok().map(|s| s.mean),
            Pooling::Median => median(values).ok(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlphaCell {
    Value(AlphaResult),
    Absent { absent: String },
}

impl AlphaCell {
    fn from_result(r: Result<AlphaResult, StatsError>) -> Self {
        match r {
            Ok(a) => AlphaCell::Value(a),
            Err(e) => AlphaCell::Absent { absent: e.to_string() },
        }
    }

    pub fn alpha(&self) -> Option<f64> {
        match self {
            AlphaCell::Value(a) => Some(a.alpha),
            AlphaCell::Absent { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RhoCell {
    Value(CorrelationResult),
    Absent { absent: String },
}

impl RhoCell {
    pub fn rho(&self) -> Option<f64> {
        match self {
            RhoCell::Value(c) => c.rho,
            RhoCell::Absent { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QualReport {
    pub level: Level,
    pub pooling: Pooling,
    /// Dialogues present in both the ratings and the metric report.
    pub dialogues: Vec<String>,
    /// Rated dialogues missing from the metric report (left out of ρ).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub unmatched_dialogues: Vec<String>,
    pub overall: Summary,
    pub per_category: BTreeMap<Category, Summary>,
    pub per_rater_category: BTreeMap<String, BTreeMap<Category, f64>>,
    pub alpha: BTreeMap<Category, AlphaCell>,
    pub leave_one_out_alpha: BTreeMap<Category, BTreeMap<String, AlphaCell>>,
    /// Pooled per-dialogue score per category.
    pub pooled: BTreeMap<Category, BTreeMap<String, f64>>,
    pub rho: BTreeMap<Category, BTreeMap<Metric, RhoCell>>,
}

/// Descriptive statistics, per-category agreement and the category × metric
/// Spearman matrix.
pub fn qual_report(
    table: &RatingTable,
    metrics: &MetricReport,
    level: Level,
    pooling: Pooling,
) -> Result<QualReport, EvalError> {
    let rated: BTreeSet<&str> = table.scores().map(|(_, i, _)| i.dialogue_id.as_str()).collect();
    let (dialogues, unmatched): (Vec<&str>, Vec<&str>) =
        rated.iter().partition(|id| metrics.per_dialogue.contains_key(**id));
    if dialogues.is_empty() {
        return Err(EvalError::NoOverlap);
    }

    let all: Vec<f64> = table.scores().map(|(_, _, s)| f64::from(s)).collect();
    let overall = mean_sd(&all).map_err(|_| EvalError::NoOverlap)?;

    let mut by_category: BTreeMap<Category, Vec<f64>> = BTreeMap::new();
    let mut by_rater: BTreeMap<&str, BTreeMap<Category, Vec<f64>>> = BTreeMap::new();
    let mut by_dialogue: BTreeMap<Category, BTreeMap<&str, Vec<f64>>> = BTreeMap::new();
    for (rater, item, score) in table.scores() {
        let s = f64::from(score);
        by_category.entry(item.category).or_default().push(s);
        by_rater.entry(rater).or_default().entry(item.category).or_default().push(s);
        by_dialogue.entry(item.category).or_default().entry(&item.dialogue_id).or_default().push(s);
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let per_category = by_category
        .iter()
        .filter_map(|(c, v)| mean_sd(v).ok().map(|s| (*c, s)))
        .collect();
    let per_rater_category = by_rater
        .into_iter()
        .map(|(r, cats)| (r.to_string(), cats.into_iter().map(|(c, v)| (c, mean(&v))).collect()))
        .collect();

    let categories = table.categories();
    let alpha = categories
        .iter()
        .map(|&c| (c, AlphaCell::from_result(krippendorff_alpha(&table.for_category(c), level))))
        .collect();
    let leave_one_out_alpha = categories
        .iter()
        .map(|&c| {
            let cells = match leave_one_out_alpha(table, c, level) {
                Ok(map) => map.into_iter().map(|(r, a)| (r, AlphaCell::from_result(a))).collect(),
                Err(_) => BTreeMap::new(),
            };
            (c, cells)
        })
        .collect();

    let pooled: BTreeMap<Category, BTreeMap<String, f64>> = by_dialogue
        .into_iter()
        .map(|(c, per)| {
            let scores = per
                .into_iter()
                .filter(|(id, _)| metrics.per_dialogue.contains_key(*id))
                .filter_map(|(id, v)| pooling.pool(&v).map(|p| (id.to_string(), p)))
                .collect();
            (c, scores)
        })
        .collect();

    let rho = pooled
        .iter()
        .map(|(&c, scores)| {
            let row = Metric::ALL
                .into_iter()
                .map(|m| {
                    let (x, y): (Vec<f64>, Vec<f64>) = scores
                        .iter()
                        .filter_map(|(id, &q)| metrics.per_dialogue[id].value(m).map(|v| (q, v)))
                        .unzip();
                    let cell = match spearman_rho(&x, &y) {
                        Ok(r) => RhoCell::Value(r),
                        Err(e) => RhoCell::Absent { absent: e.to_string() },
                    };
                    (m, cell)
                })
                .collect();
            (c, row)
        })
        .collect();

    Ok(QualReport {
        level,
        pooling,
        dialogues: dialogues.into_iter().map(String::from).collect(),
        unmatched_dialogues: unmatched.into_iter().map(String::from).collect(),
        overall,
        per_category,
        per_rater_category,
        alpha,
        leave_one_out_alpha,
        pooled,
        rho,
    })
}

impl QualReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    /// Plain-text summary: category stats with alpha, then the ρ matrix.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "Category        Mean     SD   alpha ({})", self.level);
        let _ = writeln!(out, "{}", "=".repeat(38));
        for (c, s) in &self.per_category {
            let alpha = self.alpha.get(c).and_then(AlphaCell::alpha).map_or("-".into(), |a| format!("{a:.3}"));
            let _ = writeln!(out, "{:<14} {:>5.2} {:>6.2} {:>7}", c.key(), s.mean, s.sd, alpha);
        }
        let _ = writeln!(out, "{:<14} {:>5.2} {:>6.2}", "overall", self.overall.mean, self.overall.sd);
        let metrics = Metric::TABLE;
        let _ = write!(out, "\nSpearman rho ({} pooling, n = {})\n{:<14}", match self.pooling {
            Pooling::Mean => "mean",
            Pooling::Median => "median",
        }, self.dialogues.len(), "");
        for m in metrics {
            let _ = write!(out, " {:>8}", short(m));
        }
        out.push('\n');
        for (c, row) in &self.rho {
            let _ = write!(out, "{:<14}", c.key());
            for m in metrics {
                let cell = row.get(&m).and_then(RhoCell::rho).map_or("-".into(), |r| format!("{r:.2}"));
                let _ = write!(out, " {cell:>8}");
            }
            out.push('\n');
        }
        out
    }
}

fn short(m: Metric) -> &'static str {
    match m {
        Metric::AlternationRate => "alt",
        Metric::RoleConsistency => "role",
        Metric::Asl => "asl",
        Metric::Spt => "spt",
        Metric::TopicCoverage => "topic",
        Metric::Ttr => "ttr",
        Metric::Msttr => "msttr",
        other => other.key(),
    }
}
