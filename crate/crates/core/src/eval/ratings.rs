//! Ratings CSV: `rater_id,dialogue_id,category,score`, one cell per row.
//! An empty score marks a deliberately skipped cell.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::stats::{CellError, Category, Item, RatingTable, MAX_SCORE};

pub const RATINGS_HEADER: [&str; 4] = ["rater_id", "dialogue_id", "category", "score"];

#[derive(Debug, Error)]
pub enum RatingsError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("line 1: expected header 'rater_id,dialogue_id,category,score', found '{0}'")]
    BadHeader(String),
    #[error("line {line}: {message}")]
    MalformedRow { line: u64, message: String },
    #[error("line {line}: score {score} outside 0..={max}", max = MAX_SCORE)]
    OutOfRangeScore { line: u64, score: i64 },
    #[error("line {line}: unknown category '{category}'")]
    UnknownCategory { line: u64, category: String },
    #[error("line {line}: rater '{rater}' already rated {dialogue}/{category}")]
    DuplicateCell { line: u64, rater: String, dialogue: String, category: Category },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Reads a ratings file from disk.
pub fn ingest_ratings(path: &Path) -> Result<RatingTable, RatingsError> {
    let file = std::fs::File::open(path).map_err(|source| RatingsError::Io { path: path.to_path_buf(), source })?;
    read_ratings(file)
}

pub fn read_ratings<R: Read>(input: R) -> Result<RatingTable, RatingsError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let header = reader.headers()?.clone();
    let header_fields: Vec<&str> = header.iter().map(|h| h.trim_start_matches('\u{feff}')).collect();
    if header_fields != RATINGS_HEADER {
        return Err(RatingsError::BadHeader(header_fields.join(",")));
    }
    let mut table = RatingTable::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        if record.len() != 4 {
            return Err(RatingsError::MalformedRow { line, message: format!("expected 4 fields, found {}", record.len()) });
        }
        let (rater, dialogue, category, score) = (&record[0], &record[1], &record[2], &record[3]);
        if rater.is_empty() || dialogue.is_empty() {
            return Err(RatingsError::MalformedRow { line, message: "rater_id and dialogue_id are required".into() });
        }
        let category: Category = category
            .parse()
            .map_err(|c| RatingsError::UnknownCategory { line, category: c })?;
        let item = Item::new(dialogue, category);
        let result = if score.is_empty() {
            table.skip(rater, item)
        } else {
            let value: i64 = score.parse().map_err(|_| RatingsError::MalformedRow {
                line,
                message: format!("score '{score}' is not an integer"),
            })?;
            if !(0..=i64::from(MAX_SCORE)).contains(&value) {
                return Err(RatingsError::OutOfRangeScore { line, score: value });
            }
            table.insert(rater, item, value as u8)
        };
        match result {
            Ok(()) => {}
            Err(CellError::OutOfRange(s)) => return Err(RatingsError::OutOfRangeScore { line, score: s.into() }),
            Err(CellError::Duplicate) => {
                return Err(RatingsError::DuplicateCell {
                    line,
                    rater: rater.to_string(),
                    dialogue: dialogue.to_string(),
                    category,
                })
            }
        }
    }
    Ok(table)
}

/// Writes every present and skipped cell, sorted by rater, dialogue,
/// category. The output reads back into an identical table.
pub fn write_ratings<W: Write>(table: &RatingTable, out: W) -> Result<(), RatingsError> {
    let mut rows: Vec<(&str, &Item, Option<u8>)> = table.scores().map(|(r, i, s)| (r, i, Some(s))).collect();
    rows.extend(table.skipped().map(|(r, i)| (r, i, None)));
    rows.sort_by(|a, b| (a.0, &a.1.dialogue_id, a.1.category).cmp(&(b.0, &b.1.dialogue_id, b.1.category)));
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(RATINGS_HEADER)?;
    for (rater, item, score) in rows {
        let score = score.map(|s| s.to_string()).unwrap_or_default();
        writer.write_record([rater, item.dialogue_id.as_str(), item.category.key(), score.as_str()])?;
    }
    writer.flush().map_err(|source| RatingsError::Io { path: PathBuf::from("<output>"), source })?;
    Ok(())
}
