//! The Statbox: ten fixed statistical operators over a vector of reals.
//!
//! Conventions:
//!
//! * moments are population moments about the mean; `std = sqrt(m2)`,
//!   `skewness = m3 / m2^1.5`, `kurtosis = m4 / m2^2` (Pearson, not excess),
//!   and both shape statistics are 0 when `m2 < epsilon`;
//! * `geometric_mean = exp(mean(ln(max(|v|, epsilon))))`. Radar coordinates
//!   and velocities are signed, so this is the geometric mean of magnitudes,
//!   not the textbook operator;
//! * `quantile_p` interpolates linearly between order statistics at position
//!   `p * (n - 1)`; `median` is `quantile_0.5`;
//! * `percentile_p` is nearest-rank: the order statistic at index
//!   `ceil(p * n) - 1`.
//!
//! All sums run over the sorted values, so every output is exactly invariant
//! under permutation of the input.

use crate::error::{Error, Result};
use crate::matrix::Matrix;

pub const STATBOX_LEN: usize = 10;

/// Operator names in output order. The order is part of every file format.
pub const STATBOX_NAMES: [&str; STATBOX_LEN] = [
    "mean",
    "std",
    "median",
    "skewness",
    "kurtosis",
    "geometric_mean",
    "quantile_25",
    "quantile_75",
    "percentile_25",
    "percentile_75",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StatboxVector {
    pub mean: f64,
    pub std: f64,
    pub median: f64,
    pub skewness: f64,
    pub kurtosis: f64,
    pub geometric_mean: f64,
    pub quantile_25: f64,
    pub quantile_75: f64,
    pub percentile_25: f64,
    pub percentile_75: f64,
}

impl StatboxVector {
    pub fn to_array(&self) -> [f64; STATBOX_LEN] {
        [
            self.mean,
            self.std,
            self.median,
            self.skewness,
            self.kurtosis,
            self.geometric_mean,
            self.quantile_25,
            self.quantile_75,
            self.percentile_25,
            self.percentile_75,
        ]
    }
}

/// Computes the ten statistics of `values`.
pub fn statbox(values: &[f64], epsilon: f64) -> Result<StatboxVector> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    Ok(statbox_sorted(&sorted, epsilon))
}

fn statbox_sorted(s: &[f64], epsilon: f64) -> StatboxVector {
    let n = s.len() as f64;
    let mean = s.iter().sum::<f64>() / n;

    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &x in s {
        let d = x - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;

    let (skewness, kurtosis) = if m2 < epsilon {
        (0.0, 0.0)
    } else {
        (m3 / m2.powf(1.5), m4 / (m2 * m2))
    };

    let log_mean = s.iter().map(|x| x.abs().max(epsilon).ln()).sum::<f64>() / n;

    StatboxVector {
        mean,
        std: m2.sqrt(),
        median: quantile_linear(s, 0.5),
        skewness,
        kurtosis,
        geometric_mean: log_mean.exp(),
        quantile_25: quantile_linear(s, 0.25),
        quantile_75: quantile_linear(s, 0.75),
        percentile_25: percentile_nearest_rank(s, 0.25),
        percentile_75: percentile_nearest_rank(s, 0.75),
    }
}

/// Linear-interpolation quantile over sorted, non-empty data.
pub fn quantile_linear(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    if frac == 0.0 {
        sorted[lo]
    } else {
        sorted[lo] + frac * (sorted[hi] - sorted[lo])
    }
}

/// Nearest-rank percentile over sorted, non-empty data.
pub fn percentile_nearest_rank(sorted: &[f64], p: f64) -> f64 {
    let rank = (p * sorted.len() as f64).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}

/// Applies [`statbox`] to each column, returning `[stats(col_0), stats(col_1), ...]`.
pub fn statbox_columns(matrix: &Matrix, epsilon: f64) -> Result<Vec<f64>> {
    if matrix.rows() == 0 {
        return Err(Error::EmptyInput);
    }
    let mut out = Vec::with_capacity(STATBOX_LEN * matrix.cols());
    let mut column = Vec::with_capacity(matrix.rows());
    for c in 0..matrix.cols() {
        column.clear();
        column.extend(matrix.iter_rows().map(|row| row[c]));
        column.sort_unstable_by(f64::total_cmp);
        out.extend_from_slice(&statbox_sorted(&column, epsilon).to_array());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const EPS: f64 = 1e-12;

    #[test]
    fn constant_vector_degenerates_cleanly() {
        let s = statbox(&[2.0; 4], EPS).unwrap().to_array();
        assert_eq!(s, [2.0, 0.0, 2.0, 0.0, 0.0, 2.0, 2.0, 2.0, 2.0, 2.0]);
    }

    #[test]
    fn one_to_four_matches_frozen_oracle() {
        // Frozen from an independent script over the same conventions.
        let expected = [
            2.5,
            1.118033988749895,
            2.5,
            0.0,
            1.64,
            2.213363839400643,
            1.75,
            3.25,
            1.0,
            3.0,
        ];
        let got = statbox(&[1.0, 2.0, 3.0, 4.0], EPS).unwrap().to_array();
        for (g, e) in got.iter().zip(expected) {
            assert!((g - e).abs() <= 1e-14 * e.abs().max(1.0), "{got:?}");
        }
    }

    #[test]
    fn geometric_mean_uses_clamped_magnitudes() {
        let s = statbox(&[-1.0, 2.0], EPS).unwrap();
        assert!((s.geometric_mean - 2f64.sqrt()).abs() < 1e-15);
        let z = statbox(&[0.0], EPS).unwrap();
        assert!((z.geometric_mean - EPS).abs() < 1e-26);
    }

    #[test]
    fn empty_input_is_rejected() {
        assert!(matches!(statbox(&[], EPS), Err(Error::EmptyInput)));
        assert!(matches!(
            statbox_columns(&Matrix::zeros(0, 3), EPS),
            Err(Error::EmptyInput)
        ));
    }

    #[test]
    fn single_row_columns_are_constant_case() {
        let m = Matrix::from_vec(1, 3, vec![1.5, -2.0, 7.0]);
        let out = statbox_columns(&m, EPS).unwrap();
        assert_eq!(out.len(), 30);
        for (c, &value) in [1.5, -2.0, 7.0].iter().enumerate() {
            let block = &out[c * 10..(c + 1) * 10];
            assert_eq!(block[0], value);
            assert_eq!(block[1], 0.0);
            assert_eq!(block[3], 0.0);
            assert_eq!(block[4], 0.0);
            assert_eq!(block[6], value);
            assert_eq!(block[9], value);
        }
    }

    #[test]
    fn column_block_matches_scalar_call() {
        let m = Matrix::from_vec(4, 1, vec![1.0, 2.0, 3.0, 4.0]);
        let out = statbox_columns(&m, EPS).unwrap();
        assert_eq!(out, statbox(&[1.0, 2.0, 3.0, 4.0], EPS).unwrap().to_array());
    }

    fn vec_strategy() -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(-100.0f64..100.0, 1..40)
    }

    proptest! {
        #[test]
        fn permutation_invariant(values in vec_strategy(), seed: u64) {
            let mut shuffled = values.clone();
            let mut rng = crate::rng::SeededRng::new(seed);
            for i in (1..shuffled.len()).rev() {
                shuffled.swap(i, rng.below_usize(i + 1));
            }
            prop_assert_eq!(statbox(&values, EPS).unwrap(), statbox(&shuffled, EPS).unwrap());
        }

        #[test]
        fn columns_equal_independent_calls(rows in 1usize..8, cols in 1usize..5, seed: u64) {
            let mut rng = crate::rng::SeededRng::new(seed);
            let data: Vec<f64> = (0..rows * cols).map(|_| rng.uniform(-3.0, 3.0)).collect();
            let m = Matrix::from_vec(rows, cols, data);
            let out = statbox_columns(&m, EPS).unwrap();
            for c in 0..cols {
                let single = statbox(&m.column(c), EPS).unwrap().to_array();
                prop_assert_eq!(&out[c * 10..(c + 1) * 10], &single[..]);
            }
        }
    }
}
