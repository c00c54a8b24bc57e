//! Flat, plot-ready CSV files. No rendering happens here.

use std::path::Path;

use super::qual::QualReport;
use super::report::{Metric, MetricReport};
use super::ratings::{write_ratings, RatingsError};
use crate::stats::RatingTable;

pub const FIGURE_FILES: &[&str] = &[
    "word_turn_counts.csv",
    "role_consistency.csv",
    "asl_spt.csv",
    "topic_distribution.csv",
    "lexical_diversity.csv",
    "rating_scores.csv",
    "rater_category_means.csv",
    "alpha_by_category.csv",
    "quant_qual_rho.csv",
];

fn opt(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn write_csv(path: &Path, header: &[&str], rows: Vec<Vec<String>>) -> Result<(), RatingsError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush().map_err(|source| RatingsError::Io { path: path.to_path_buf(), source })
}

fn metric_columns(report: &MetricReport, path: &Path, metrics: &[Metric]) -> Result<(), RatingsError> {
    let mut header = vec!["dialogue_id"];
    header.extend(metrics.iter().map(|m| m.key()));
    let rows = report
        .per_dialogue
        .iter()
        .map(|(id, row)| {
            let mut r = vec![id.clone()];
            r.extend(metrics.iter().map(|m| opt(row.value(*m))));
            r
        })
        .collect();
    write_csv(path, &header, rows)
}

/// Per-dialogue data behind the word/turn bars, role-consistency box and
/// per-role bars, ASL/SPT plot, stacked topic proportions and TTR/MSTTR plot.
pub fn write_metric_figures(report: &MetricReport, dir: &Path) -> Result<(), RatingsError> {
    std::fs::create_dir_all(dir).map_err(|source| RatingsError::Io { path: dir.to_path_buf(), source })?;
    metric_columns(report, &dir.join("word_turn_counts.csv"), &[Metric::WordCount, Metric::TurnCount])?;
    metric_columns(report, &dir.join("asl_spt.csv"), &[Metric::Asl, Metric::Spt])?;
    metric_columns(report, &dir.join("lexical_diversity.csv"), &[Metric::Ttr, Metric::Msttr, Metric::Mattr])?;

    let role_rows = report
        .per_dialogue
        .iter()
        .map(|(id, row)| match &row.role {
            Some(r) => vec![id.clone(), r.doctor.score.to_string(), r.patient.score.to_string(), r.mean.to_string()],
            None => vec![id.clone(), String::new(), String::new(), String::new()],
        })
        .collect();
    write_csv(&dir.join("role_consistency.csv"), &["dialogue_id", "doctor", "patient", "mean"], role_rows)?;

    let mut topic_rows = Vec::new();
    for (id, row) in &report.per_dialogue {
        if let Some(t) = &row.topics {
            for hit in &t.per_topic {
                topic_rows.push(vec![id.clone(), hit.topic.clone(), hit.hits.to_string(), hit.proportion.to_string()]);
            }
        }
    }
    write_csv(&dir.join("topic_distribution.csv"), &["dialogue_id", "topic", "hits", "proportion"], topic_rows)
}

/// Rating box-plot input, rater × category heatmap, alpha with/without each
/// rater, and the category × metric ρ matrix.
pub fn write_qual_figures(qual: &QualReport, table: &RatingTable, dir: &Path) -> Result<(), RatingsError> {
    std::fs::create_dir_all(dir).map_err(|source| RatingsError::Io { path: dir.to_path_buf(), source })?;
    let file = std::fs::File::create(dir.join("rating_scores.csv"))
        .map_err(|source| RatingsError::Io { path: dir.join("rating_scores.csv"), source })?;
    write_ratings(table, file)?;

    let heat = qual
        .per_rater_category
        .iter()
        .flat_map(|(r, cats)| cats.iter().map(move |(c, m)| vec![r.clone(), c.key().to_string(), m.to_string()]))
        .collect();
    write_csv(&dir.join("rater_category_means.csv"), &["rater_id", "category", "mean"], heat)?;

    let mut alpha_rows = Vec::new();
    for (c, cell) in &qual.alpha {
        alpha_rows.push(vec![c.key().to_string(), String::new(), opt(cell.alpha())]);
        if let Some(loo) = qual.leave_one_out_alpha.get(c) {
            for (rater, a) in loo {
                alpha_rows.push(vec![c.key().to_string(), rater.clone(), opt(a.alpha())]);
            }
        }
    }
    write_csv(&dir.join("alpha_by_category.csv"), &["category", "excluded_rater", "alpha"], alpha_rows)?;

    let mut rho_rows = Vec::new();
    for (c, row) in &qual.rho {
        for (m, cell) in row {
            let (n, flag) = match cell {
                super::qual::RhoCell::Value(r) => (
                    r.n.to_string(),
                    r.flag.map(|_| "degenerate_input".to_string()).unwrap_or_default(),
                ),
                super::qual::RhoCell::Absent { absent } => (String::new(), absent.clone()),
            };
            rho_rows.push(vec![c.key().to_string(), m.key().to_string(), opt(cell.rho()), n, flag]);
        }
    }
    write_csv(&dir.join("quant_qual_rho.csv"), &["category", "metric", "rho", "n", "note"], rho_rows)
}
