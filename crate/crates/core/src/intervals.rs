//! Confidence intervals: empirical ones from replicate order statistics and
//! the textbook formulas for log-scale means and proportions, plus the
//! interval similarity score and the formula-versus-model discrepancy.

use serde::{Deserialize, Serialize};

use crate::indicators::ln1p_count;
use crate::special::{t_critical, z_critical};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntervalKind {
    Empirical,
    Formula,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
    pub kind: IntervalKind,
}

impl Interval {
    pub fn new(lower: f64, upper: f64, kind: IntervalKind) -> Self {
        debug_assert!(lower <= upper || lower.is_nan() || upper.is_nan());
        Self { lower, upper, kind }
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { lower: f(self.lower), upper: f(self.upper), kind: self.kind }
    }
}

/// Smallest replicate count accepted by [`empirical_interval`].
pub const MIN_REPLICATES: usize = 40;

/// Rank (1-based, from either end) of the order statistic used as a limit.
pub fn tail_rank(replicates: usize, level: f64) -> usize {
    let raw = (1.0 - level) / 2.0 * replicates as f64;
    // (1 - 0.95) / 2 is not exact in binary; snap before taking the ceiling
    let rank = (raw - 1e-9).ceil() as usize;
    rank.max(1)
}

/// Interval between the r-th smallest and r-th largest statistic with
/// `r = ceil((1 - level) / 2 * R)`. For R = 1000 at 95% this is the 25th
/// value from each end.
pub fn empirical_interval(stats: &[f64], level: f64) -> Result<Interval> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidLevel(level));
    }
    if stats.len() < MIN_REPLICATES {
        return Err(Error::TooFewValues { needed: MIN_REPLICATES, got: stats.len() });
    }
    if stats.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let mut sorted = stats.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let r = tail_rank(sorted.len(), level);
    Ok(Interval::new(sorted[r - 1], sorted[sorted.len() - r], IntervalKind::Empirical))
}

/// Mean and standard deviation (n - 1 denominator) of `ln(1 + c)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogMoments {
    pub n: usize,
    pub mean: f64,
    pub sd: f64,
}

impl LogMoments {
    pub fn from_counts(counts: impl IntoIterator<Item = u32>) -> Result<Self> {
        // Sums are taken around the first value to keep the variance stable
        // for nearly constant inputs.
        let mut iter = counts.into_iter().map(ln1p_count);
        let Some(shift) = iter.next() else {
            return Err(Error::TooFewValues { needed: 2, got: 0 });
        };
        let (mut n, mut sum, mut sum_sq) = (1usize, 0.0, 0.0);
        for y in iter {
            let d = y - shift;
            n += 1;
            sum += d;
            sum_sq += d * d;
        }
        if n < 2 {
            return Err(Error::TooFewValues { needed: 2, got: n });
        }
        let nf = n as f64;
        let var = (sum_sq - sum * sum / nf) / (nf - 1.0);
        Ok(Self { n, mean: shift + sum / nf, sd: var.max(0.0).sqrt() })
    }

    /// `mean ± t * sd / sqrt(n)` with a caller-supplied critical value.
    pub fn interval(&self, t: f64) -> Interval {
        let half = t * self.sd / (self.n as f64).sqrt();
        Interval::new(self.mean - half, self.mean + half, IntervalKind::Formula)
    }
}

/// Formula interval for the offset geometric mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogMeanInterval {
    /// Interval for the mean of `ln(1 + c)`.
    pub log: Interval,
    /// The same limits mapped back with `exp(y) - 1`.
    pub back_transformed: Interval,
}

pub fn log_mean_interval(counts: &[u32], level: f64) -> Result<LogMeanInterval> {
    let moments = LogMoments::from_counts(counts.iter().copied())?;
    let t = t_critical(level, (moments.n - 1) as f64)?;
    let log = moments.interval(t);
    Ok(LogMeanInterval { log, back_transformed: log.map(f64::exp_m1) })
}

/// `p ± z * sqrt(p (1 - p) / n)` with a caller-supplied critical value;
/// limits are not clamped to `[0, 1]`.
pub fn proportion_interval_z(p: f64, n: usize, z: f64) -> Interval {
    let half = z * (p * (1.0 - p) / n as f64).max(0.0).sqrt();
    Interval::new(p - half, p + half, IntervalKind::Formula)
}

pub fn proportion_interval(p: f64, n: usize, level: f64) -> Result<Interval> {
    if n == 0 {
        return Err(Error::EmptySample);
    }
    Ok(proportion_interval_z(p, n, z_critical(level)?))
}

/// Two groups to compare, ordered so that `mean1 <= mean2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimilarityInput {
    pub mean1: f64,
    pub mean2: f64,
    pub int1: Interval,
    pub int2: Interval,
}

impl SimilarityInput {
    /// Orders the two groups by mean; the score is symmetric in the groups.
    pub fn ordered(mean_a: f64, int_a: Interval, mean_b: f64, int_b: Interval) -> Self {
        if mean_a <= mean_b {
            Self { mean1: mean_a, mean2: mean_b, int1: int_a, int2: int_b }
        } else {
            Self { mean1: mean_b, mean2: mean_a, int1: int_b, int2: int_a }
        }
    }
}

/// Confidence interval similarity:
/// `((u1 - m1) + (m2 - l2)) / (2 (m2 - m1))`.
///
/// Values below 1 indicate that the groups are distinguishable. Returns
/// `None` when the means coincide.
pub fn similarity(input: &SimilarityInput) -> Option<f64> {
    let gap = input.mean2 - input.mean1;
    if gap == 0.0 || !gap.is_finite() {
        return None;
    }
    Some(((input.int1.upper - input.mean1) + (input.mean2 - input.int2.lower)) / (2.0 * gap))
}

/// Formula limits relative to the model interval width. Positive values mean
/// the formula is wider (conservative) on that side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Discrepancy {
    pub lower: f64,
    pub upper: f64,
}

pub fn limit_discrepancy(model: &Interval, formula: &Interval) -> Result<Discrepancy> {
    let width = model.width();
    if width.is_nan() || width <= 0.0 {
        return Err(Error::DegenerateInterval);
    }
    Ok(Discrepancy { lower: (model.lower - formula.lower) / width, upper: (formula.upper - model.upper) / width })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(l: f64, u: f64) -> Interval {
        Interval::new(l, u, IntervalKind::Empirical)
    }

    #[test]
    fn tail_rank_matches_order_statistics() {
        assert_eq!(tail_rank(1000, 0.95), 25);
        assert_eq!(tail_rank(200, 0.95), 5);
        assert_eq!(tail_rank(100, 0.95), 3);
        assert_eq!(tail_rank(40, 0.95), 1);
    }

    #[test]
    fn identity_sequence() {
        let stats: Vec<f64> = (1..=1000).map(f64::from).collect();
        let i = empirical_interval(&stats, 0.95).unwrap();
        assert_eq!((i.lower, i.upper), (25.0, 976.0));
        assert_eq!(i.kind, IntervalKind::Empirical);
    }

    #[test]
    fn constant_stats() {
        let i = empirical_interval(&[2.5; 100], 0.95).unwrap();
        assert_eq!((i.lower, i.upper), (2.5, 2.5));
    }

    #[test]
    fn too_few_replicates() {
        assert_eq!(empirical_interval(&[1.0; 39], 0.95), Err(Error::TooFewValues { needed: 40, got: 39 }));
        assert_eq!(empirical_interval(&[f64::NAN; 50], 0.95), Err(Error::NonFinite));
    }

    #[test]
    fn log_interval_zero_width_for_equal_counts() {
        let r = log_mean_interval(&[3; 10], 0.95).unwrap();
        assert_eq!(r.log.lower, 4f64.ln());
        assert_eq!(r.log.upper, 4f64.ln());
        assert!((r.back_transformed.lower - 3.0).abs() < 1e-12);
    }

    #[test]
    fn log_interval_needs_two() {
        assert_eq!(log_mean_interval(&[3], 0.95), Err(Error::TooFewValues { needed: 2, got: 1 }));
    }

    #[test]
    fn log_moments_match_two_pass() {
        let counts = [0u32, 3, 7, 1, 1, 12, 40, 2, 0, 5];
        let ys: Vec<f64> = counts.iter().map(|&c| (c as f64).ln_1p()).collect();
        let mean = ys.iter().sum::<f64>() / 10.0;
        let var = ys.iter().map(|y| (y - mean).powi(2)).sum::<f64>() / 9.0;
        let m = LogMoments::from_counts(counts).unwrap();
        assert!((m.mean - mean).abs() < 1e-14);
        assert!((m.sd - var.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn log_interval_known_moments() {
        let m = LogMoments { n: 100, mean: 1.0, sd: 0.5 };
        let t = t_critical(0.95, 99.0).unwrap();
        let i = m.interval(t);
        assert!((i.lower - (1.0 - 1.9842 * 0.05)).abs() < 1e-5);
        assert!((i.upper - (1.0 + 1.9842 * 0.05)).abs() < 1e-5);
    }

    #[test]
    fn log_interval_large_sample_uses_normal_value() {
        let t = t_critical(0.95, 1e7).unwrap();
        assert!((t - 1.96).abs() < 1e-3);
    }

    #[test]
    fn proportion_examples() {
        let i = proportion_interval(0.0, 25, 0.95).unwrap();
        assert_eq!((i.lower, i.upper), (0.0, 0.0));
        let i = proportion_interval(0.5, 100, 0.95).unwrap();
        assert!((i.lower - 0.402).abs() < 1e-4);
        assert!((i.upper - 0.598).abs() < 1e-4);
        let big = proportion_interval(0.5, 100_000_000, 0.95).unwrap();
        assert!(big.width() < 1e-3);
        // raw formula, no clamping
        assert!(proportion_interval(0.04, 25, 0.95).unwrap().lower < 0.0);
        assert_eq!(proportion_interval(0.5, 0, 0.95), Err(Error::EmptySample));
    }

    #[test]
    fn similarity_examples() {
        let s = similarity(&SimilarityInput { mean1: 0.0, mean2: 1.0, int1: iv(-1.0, 1.0), int2: iv(0.0, 2.0) });
        assert_eq!(s, Some(1.0));
        let s = similarity(&SimilarityInput { mean1: 0.001, mean2: 0.004, int1: iv(0.0, 0.0), int2: iv(0.0, 0.0) })
            .unwrap();
        assert!((s - 0.5).abs() < 1e-12);
        let s = similarity(&SimilarityInput { mean1: 0.0, mean2: 10.0, int1: iv(-1.0, 1.0), int2: iv(9.0, 11.0) });
        assert_eq!(s, Some(0.1));
        let s = similarity(&SimilarityInput { mean1: 2.0, mean2: 2.0, int1: iv(1.0, 3.0), int2: iv(1.0, 3.0) });
        assert_eq!(s, None);
    }

    #[test]
    fn ordered_swaps() {
        let a = SimilarityInput::ordered(10.0, iv(9.0, 11.0), 0.0, iv(-1.0, 1.0));
        assert_eq!(a.mean1, 0.0);
        assert_eq!(a.int1, iv(-1.0, 1.0));
        assert_eq!(similarity(&a), Some(0.1));
    }

    #[test]
    fn discrepancy_examples() {
        let model = iv(0.0, 10.0);
        let d = limit_discrepancy(&model, &iv(-1.0, 11.0)).unwrap();
        assert!((d.lower - 0.1).abs() < 1e-15 && (d.upper - 0.1).abs() < 1e-15);
        let d = limit_discrepancy(&model, &model).unwrap();
        assert_eq!((d.lower, d.upper), (0.0, 0.0));
        let d = limit_discrepancy(&model, &iv(1.0, 9.0)).unwrap();
        assert!((d.lower + 0.1).abs() < 1e-15 && (d.upper + 0.1).abs() < 1e-15);
        assert_eq!(limit_discrepancy(&iv(1.0, 1.0), &model), Err(Error::DegenerateInterval));
    }
}
