//! Corpus evaluation, ratings ingestion and quant–qual reporting.

mod corpus;
mod export;
mod qual;
mod ratings;
mod report;

use std::path::PathBuf;

use thiserror::Error;

pub use corpus::{load_corpus_dir, CorpusFile};
pub use export::{write_metric_figures, write_qual_figures, FIGURE_FILES};
pub use qual::{qual_report, AlphaCell, Pooling, QualReport, RhoCell};
pub use ratings::{ingest_ratings, read_ratings, write_ratings, RatingsError, RATINGS_HEADER};
pub use report::{evaluate_corpus, DialogueMetrics, EvalOptions, Metric, MetricCell, MetricReport, Totals};

use crate::dialogue::ParseError;
use crate::lexicon::LexiconError;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("dialogue id '{0}' appears more than once")]
    DuplicateId(String),
    #[error("no topic lexicons given")]
    NoTopics,
    #[error("window must be positive")]
    ZeroWindow,
    #[error(transparent)]
    Lexicon(#[from] LexiconError),
    #[error("no dialogue appears in both the ratings and the metric report")]
    NoOverlap,
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: ParseError },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
}
