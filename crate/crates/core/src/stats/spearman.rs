use serde::{Deserialize, Serialize};

use super::StatsError;

/// Below this many pairs a correlation carries a small-sample caveat.
pub const SMALL_SAMPLE: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrelationFlag {
    /// One input is constant, so rho is undefined.
    DegenerateInput,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationResult {
    pub rho: Option<f64>,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flag: Option<CorrelationFlag>,
    pub small_sample: bool,
}

/// Ranks starting at 1; tied values share the mean of their rank span.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = rank;
        }
        i = j + 1;
    }
    ranks
}

fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Spearman's rank correlation: Pearson correlation of average ranks.
pub fn spearman_rho(x: &[f64], y: &[f64]) -> Result<CorrelationResult, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch { x: x.len(), y: y.len() });
    }
    if x.len() < 3 {
        return Err(StatsError::TooFewPairs(x.len()));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    let n = x.len();
    let rho = pearson(&average_ranks(x), &average_ranks(y));
    Ok(CorrelationResult {
        rho,
        n,
        flag: rho.is_none().then_some(CorrelationFlag::DegenerateInput),
        small_sample: n < SMALL_SAMPLE,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Classical formula, valid only without ties.
    fn classical(x: &[f64], y: &[f64]) -> f64 {
        let rx = average_ranks(x);
        let ry = average_ranks(y);
        let n = x.len() as f64;
        let d2: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - b) * (a - b)).sum();
        1.0 - 6.0 * d2 / (n * (n * n - 1.0))
    }

    #[test]
    fn identical_and_reversed() {
        assert_eq!(spearman_rho(&[1.0, 2.0, 3.0], &[10.0, 20.0, 30.0]).unwrap().rho, Some(1.0));
        assert_eq!(spearman_rho(&[1.0, 2.0, 3.0], &[30.0, 20.0, 10.0]).unwrap().rho, Some(-1.0));
    }

    #[test]
    fn ties_get_average_ranks() {
        assert_eq!(average_ranks(&[10.0, 20.0, 10.0, 30.0]), vec![1.5, 3.0, 1.5, 4.0]);
    }

    #[test]
    fn constant_input_is_flagged() {
        let r = spearman_rho(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(r.rho, None);
        assert_eq!(r.flag, Some(CorrelationFlag::DegenerateInput));
        assert!(r.small_sample);
    }

    #[test]
    fn input_errors() {
        assert_eq!(spearman_rho(&[1.0, 2.0], &[1.0, 2.0]), Err(StatsError::TooFewPairs(2)));
        assert_eq!(
            spearman_rho(&[1.0, 2.0, 3.0], &[1.0, 2.0]),
            Err(StatsError::LengthMismatch { x: 3, y: 2 })
        );
    }

    #[test]
    fn tied_example_by_hand() {
        // x ranks [1.5,1.5,3,4], y ranks [1,2,3,4]; pearson = 4.5 / sqrt(4.5*5)
        let r = spearman_rho(&[1.0, 1.0, 2.0, 3.0], &[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert!((r.rho.unwrap() - 4.5 / (4.5f64 * 5.0).sqrt()).abs() < 1e-12);
    }

    fn distinct_vec() -> impl Strategy<Value = Vec<f64>> {
        (3usize..40).prop_flat_map(|n| {
            Just((0..n).map(|i| i as f64).collect::<Vec<_>>()).prop_shuffle()
        })
    }

    proptest! {
        #[test]
        fn matches_classical_without_ties(x in distinct_vec(), seed in any::<u64>()) {
            let n = x.len();
            let mut y: Vec<f64> = (0..n).map(|i| ((i as u64 * 2654435761 + seed) % 1_000_003) as f64 + i as f64 / 1e6).collect();
            y.dedup();
            prop_assume!(y.len() == n);
            let r = spearman_rho(&x, &y).unwrap().rho.unwrap();
            prop_assert!((r - classical(&x, &y)).abs() <= 1e-12);
        }

        #[test]
        fn symmetric(x in prop::collection::vec(0u8..6, 3..30), y in prop::collection::vec(0u8..6, 3..30)) {
            let n = x.len().min(y.len());
            let x: Vec<f64> = x[..n].iter().map(|&v| v as f64).collect();
            let y: Vec<f64> = y[..n].iter().map(|&v| v as f64).collect();
            let a = spearman_rho(&x, &y).unwrap();
            let b = spearman_rho(&y, &x).unwrap();
            prop_assert_eq!(a.rho, b.rho);
            if let Some(r) = a.rho {
                prop_assert!((-1.0..=1.0).contains(&r));
            }
        }

        #[test]
        fn monotone_transform_invariant(x in prop::collection::vec(-50i32..50, 3..30), y in prop::collection::vec(-50i32..50, 3..30)) {
            let n = x.len().min(y.len());
            let x: Vec<f64> = x[..n].iter().map(|&v| v as f64).collect();
            let y: Vec<f64> = y[..n].iter().map(|&v| v as f64).collect();
            let tx: Vec<f64> = x.iter().map(|v| (v / 10.0).exp() + 3.0).collect();
            let ty: Vec<f64> = y.iter().map(|v| v * v * v - 7.0).collect();
            prop_assert_eq!(spearman_rho(&x, &y).unwrap().rho, spearman_rho(&tx, &ty).unwrap().rho);
        }
    }
}
