//! Krippendorff's alpha over a coincidence matrix, with missing data.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::table::{Category, RatingTable};
use super::StatsError;

/// Level of measurement, which selects the distance function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Level {
    Nominal,
    #[default]
    Ordinal,
    Interval,
}

impl FromStr for Level {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "nominal" => Ok(Level::Nominal),
            "ordinal" => Ok(Level::Ordinal),
            "interval" => Ok(Level::Interval),
            other => Err(format!("unknown measurement level '{other}'")),
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Level::Nominal => "nominal",
            Level::Ordinal => "ordinal",
            Level::Interval => "interval",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaResult {
    pub alpha: f64,
    /// Expected disagreement was zero (every pairable value identical);
    /// alpha is reported as 1.
    pub degenerate: bool,
    pub pairable_units: usize,
    pub pairable_values: usize,
}

/// Coincidence matrix over the distinct values found in pairable units.
#[derive(Debug, Clone, PartialEq)]
pub struct Coincidences {
    pub values: Vec<i64>,
    pub matrix: Vec<Vec<f64>>,
}

impl Coincidences {
    /// Builds the matrix: every ordered pair of values inside a unit with
    /// `m >= 2` values contributes `1 / (m - 1)`.
    pub fn from_units(units: &[Vec<i64>]) -> Self {
        let mut index: BTreeMap<i64, usize> = BTreeMap::new();
        for unit in units.iter().filter(|u| u.len() >= 2) {
            for v in unit {
                index.entry(*v).or_insert(0);
            }
        }
        for (i, slot) in index.values_mut().enumerate() {
            *slot = i;
        }
        let k = index.len();
        let mut matrix = vec![vec![0.0; k]; k];
        for unit in units.iter().filter(|u| u.len() >= 2) {
            let mut counts = vec![0usize; k];
            for v in unit {
                counts[index[v]] += 1;
            }
            let weight = 1.0 / (unit.len() - 1) as f64;
            for c in 0..k {
                if counts[c] == 0 {
                    continue;
                }
                for d in 0..k {
                    let pairs = if c == d { counts[c] * (counts[c] - 1) } else { counts[c] * counts[d] };
                    if pairs > 0 {
                        matrix[c][d] += pairs as f64 * weight;
                    }
                }
            }
        }
        Self { values: index.into_keys().collect(), matrix }
    }

    pub fn marginals(&self) -> Vec<f64> {
        self.matrix.iter().map(|row| row.iter().sum()).collect()
    }

    /// Squared distance between value indices `c` and `k`.
    pub fn delta2(&self, level: Level, marginals: &[f64], c: usize, k: usize) -> f64 {
        if c == k {
            return 0.0;
        }
        match level {
            Level::Nominal => 1.0,
            Level::Interval => {
                let diff = (self.values[c] - self.values[k]) as f64;
                diff * diff
            }
            Level::Ordinal => {
                let (lo, hi) = if c < k { (c, k) } else { (k, c) };
                let between: f64 = marginals[lo..=hi].iter().sum();
                let d = between - (marginals[c] + marginals[k]) / 2.0;
                d * d
            }
        }
    }
}

/// Alpha over raw units (the values each unit received; missing ratings are
/// simply absent). Units with fewer than two values are not pairable.
pub fn alpha_from_units(units: &[Vec<i64>], level: Level) -> Result<AlphaResult, StatsError> {
    let pairable_units = units.iter().filter(|u| u.len() >= 2).count();
    if pairable_units == 0 {
        return Err(StatsError::NoPairableItems);
    }
    let co = Coincidences::from_units(units);
    let marginals = co.marginals();
    let n: f64 = marginals.iter().sum();
    let k = co.values.len();
    let mut observed = 0.0;
    let mut expected = 0.0;
    for c in 0..k {
        for d in 0..k {
            let delta = co.delta2(level, &marginals, c, d);
            observed += co.matrix[c][d] * delta;
            expected += marginals[c] * marginals[d] * delta;
        }
    }
    let pairable_values = n.round() as usize;
    if expected == 0.0 {
        return Ok(AlphaResult { alpha: 1.0, degenerate: true, pairable_units, pairable_values });
    }
    let alpha = 1.0 - (n - 1.0) * observed / expected;
    Ok(AlphaResult { alpha, degenerate: false, pairable_units, pairable_values })
}

/// Alpha over every item of the table. Use [`RatingTable::for_category`]
/// first for per-category reliability.
pub fn krippendorff_alpha(table: &RatingTable, level: Level) -> Result<AlphaResult, StatsError> {
    if table.raters().len() < 2 {
        return Err(StatsError::TooFewRaters { found: table.raters().len(), needed: 2 });
    }
    let units: Vec<Vec<i64>> = table
        .unit_values()
        .into_iter()
        .map(|u| u.into_iter().map(i64::from).collect())
        .collect();
    alpha_from_units(&units, level)
}

/// Alpha of one category recomputed with each rater removed in turn.
pub fn leave_one_out_alpha(
    table: &RatingTable,
    category: Category,
    level: Level,
) -> Result<BTreeMap<String, Result<AlphaResult, StatsError>>, StatsError> {
    let sub = table.for_category(category);
    let raters = sub.raters();
    if raters.len() < 3 {
        return Err(StatsError::TooFewRaters { found: raters.len(), needed: 3 });
    }
    Ok(raters
        .iter()
        .map(|r| (r.clone(), krippendorff_alpha(&sub.without_rater(r), level)))
        .collect())
}
