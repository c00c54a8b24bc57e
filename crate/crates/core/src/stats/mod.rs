//! Aggregation and agreement statistics: mean/SD, Krippendorff's alpha with
//! missing data, Spearman's rho with tied ranks.

mod alpha;
mod describe;
mod spearman;
mod table;

use thiserror::Error;

pub use alpha::{alpha_from_units, krippendorff_alpha, leave_one_out_alpha, AlphaResult, Coincidences, Level};
pub use describe::{mean_sd, median, Summary};
pub use spearman::{average_ranks, spearman_rho, CorrelationFlag, CorrelationResult, SMALL_SAMPLE};
pub use table::{CellError, Category, Item, RatingTable, MAX_SCORE};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StatsError {
    #[error("no values")]
    EmptyInput,
    #[error("input contains a non-finite value")]
    NonFinite,
    #[error("need at least {needed} raters, found {found}")]
    TooFewRaters { found: usize, needed: usize },
    #[error("no item has two or more ratings")]
    NoPairableItems,
    #[error("vectors differ in length ({x} vs {y})")]
    LengthMismatch { x: usize, y: usize },
    #[error("need at least 3 pairs, got {0}")]
    TooFewPairs(usize),
}
