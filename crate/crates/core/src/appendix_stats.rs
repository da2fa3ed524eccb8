//! Rank-based two-sample tests and the equal-strength, unequal-size
//! demonstration: two countries drawn from the same distribution but with
//! different article counts produce top-1% shares that Mann-Whitney and
//! Kolmogorov-Smirnov tests flag as different.

use serde::{Deserialize, Serialize};

use crate::experiment::{ParameterSet, WorldSimulator};
use crate::special::{kolmogorov_sf, normal_sf};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MannWhitney {
    /// U statistic of the first sample.
    pub u: f64,
    pub z: f64,
    /// Two-sided p-value from the tie-corrected normal approximation.
    pub p: f64,
}

/// Midranks of the pooled values, in input order (`a` then `b`).
fn pooled_midranks(a: &[f64], b: &[f64]) -> (Vec<f64>, f64) {
    let mut pooled: Vec<(f64, usize)> = a.iter().chain(b).copied().zip(0..).collect();
    pooled.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut ranks = vec![0.0; pooled.len()];
    let mut tie_term = 0.0;
    let mut start = 0;
    while start < pooled.len() {
        let mut end = start + 1;
        while end < pooled.len() && pooled[end].0 == pooled[start].0 {
            end += 1;
        }
        let midrank = (start + end + 1) as f64 / 2.0;
        for &(_, idx) in &pooled[start..end] {
            ranks[idx] = midrank;
        }
        let t = (end - start) as f64;
        tie_term += t * t * t - t;
        start = end;
    }
    (ranks, tie_term)
}

pub fn mann_whitney_u(a: &[f64], b: &[f64]) -> Result<MannWhitney> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySample);
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let (n1, n2) = (a.len() as f64, b.len() as f64);
    let n = n1 + n2;
    let (ranks, tie_term) = pooled_midranks(a, b);
    let rank_sum_a: f64 = ranks[..a.len()].iter().sum();
    let u = rank_sum_a - n1 * (n1 + 1.0) / 2.0;
    let mean = n1 * n2 / 2.0;
    let var = n1 * n2 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if var.is_nan() || var <= 0.0 {
        return Ok(MannWhitney { u, z: 0.0, p: 1.0 });
    }
    let z = (u - mean) / var.sqrt();
    Ok(MannWhitney { u, z, p: (2.0 * normal_sf(z.abs())).min(1.0) })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KolmogorovSmirnov {
    pub d: f64,
    /// Asymptotic p-value from the Kolmogorov distribution.
    pub p: f64,
}

pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KolmogorovSmirnov> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySample);
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_by(f64::total_cmp);
    ys.sort_by(f64::total_cmp);
    let (n1, n2) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < xs.len() && j < ys.len() {
        let v = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] == v {
            i += 1;
        }
        while j < ys.len() && ys[j] == v {
            j += 1;
        }
        d = d.max((i as f64 / n1 - j as f64 / n2).abs());
    }
    let en = (n1 * n2 / (n1 + n2)).sqrt();
    Ok(KolmogorovSmirnov { d, p: kolmogorov_sf(en * d) })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyRow {
    pub value: f64,
    pub freq1: u64,
    pub freq2: u64,
}

/// Value frequencies of two groups.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyTable {
    rows: Vec<FrequencyRow>,
}

impl FrequencyTable {
    pub fn new(rows: Vec<FrequencyRow>) -> Result<Self> {
        if rows.iter().any(|r| !r.value.is_finite()) {
            return Err(Error::InvalidTable("non-finite value".into()));
        }
        if rows.windows(2).any(|w| w[0].value >= w[1].value) {
            return Err(Error::InvalidTable("values must be strictly increasing".into()));
        }
        let t1: u64 = rows.iter().map(|r| r.freq1).sum();
        let t2: u64 = rows.iter().map(|r| r.freq2).sum();
        if t1 == 0 || t2 == 0 {
            return Err(Error::InvalidTable("each group needs a positive total".into()));
        }
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[FrequencyRow] {
        &self.rows
    }

    pub fn totals(&self) -> [u64; 2] {
        [self.rows.iter().map(|r| r.freq1).sum(), self.rows.iter().map(|r| r.freq2).sum()]
    }

    /// Expands the table into the two raw samples.
    pub fn expand(&self) -> (Vec<f64>, Vec<f64>) {
        let mut a = Vec::new();
        let mut b = Vec::new();
        for r in &self.rows {
            a.extend(std::iter::repeat_n(r.value, r.freq1 as usize));
            b.extend(std::iter::repeat_n(r.value, r.freq2 as usize));
        }
        (a, b)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankSums {
    /// Midrank of each table row within the pooled sample. Empty rows get the
    /// midpoint between their neighbours' blocks.
    pub average_ranks: Vec<f64>,
    /// `freq * average rank` per row and group.
    pub row_sums: Vec<[f64; 2]>,
    pub totals: [f64; 2],
}

pub fn rank_sums_from_frequency(table: &FrequencyTable) -> RankSums {
    let mut before = 0u64;
    let mut average_ranks = Vec::with_capacity(table.rows.len());
    let mut row_sums = Vec::with_capacity(table.rows.len());
    let mut totals = [0.0; 2];
    for r in &table.rows {
        let m = r.freq1 + r.freq2;
        let avg = before as f64 + (m as f64 + 1.0) / 2.0;
        let sums = [r.freq1 as f64 * avg, r.freq2 as f64 * avg];
        totals[0] += sums[0];
        totals[1] += sums[1];
        average_ranks.push(avg);
        row_sums.push(sums);
        before += m;
    }
    RankSums { average_ranks, row_sums, totals }
}

/// The worked example of 1000 simulated years for a 75-article and a
/// 25-article country with the top-1% membership counted without ties.
pub fn worked_example_table() -> FrequencyTable {
    let row = |k: u32, freq1, freq2| FrequencyRow { value: f64::from(k) / 75.0, freq1, freq2 };
    FrequencyTable::new(vec![
        row(0, 534, 815),
        row(1, 359, 0),
        row(2, 94, 0),
        row(3, 11, 174),
        row(4, 2, 0),
        row(5, 0, 0),
        row(6, 0, 11),
    ])
    .expect("worked example is a valid table")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AppendixConfig {
    pub sample1_size: usize,
    pub sample2_size: usize,
    pub world: usize,
    pub mu: f64,
    pub sigma: f64,
    pub mu_overall: f64,
    pub replicates: usize,
    pub seed: u64,
}

impl Default for AppendixConfig {
    fn default() -> Self {
        Self {
            sample1_size: 75,
            sample2_size: 25,
            world: 500,
            mu: 0.9,
            sigma: 1.0,
            mu_overall: 1.0,
            replicates: 1000,
            seed: 20160101,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AppendixReport {
    pub config: AppendixConfig,
    pub mean1: f64,
    pub mean2: f64,
    pub mann_whitney: MannWhitney,
    pub ks: KolmogorovSmirnov,
    /// Fraction of replicates in which the country has no top-1% credit.
    pub zero_prop1: f64,
    pub zero_prop2: f64,
    pub top1_sample1: Vec<f64>,
    pub top1_sample2: Vec<f64>,
}

/// Simulates both countries at the same location and compares their
/// replicate top-1% shares with rank tests.
pub fn appendix_demo(config: &AppendixConfig) -> Result<AppendixReport> {
    if config.world == 0 || config.replicates == 0 {
        return Err(Error::EmptySample);
    }
    let ps = ParameterSet {
        config_index: 0,
        mu1: config.mu,
        mu2: config.mu,
        p1: config.sample1_size as f64 / config.world as f64,
        p2: config.sample2_size as f64 / config.world as f64,
        n: config.world,
        sigma: config.sigma,
        mu_overall: config.mu_overall,
        replicates: config.replicates,
    };
    let mut sim = WorldSimulator::new(ps)?;
    let mut top1 = [Vec::with_capacity(config.replicates), Vec::with_capacity(config.replicates)];
    for r in 0..config.replicates {
        sim.draw(config.seed, r);
        let outcome = sim.outcome()?;
        for (g, series) in top1.iter_mut().enumerate() {
            series.push(outcome.indicators[g].top1);
        }
    }
    let [s1, s2] = top1;
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let zero = |v: &[f64]| v.iter().filter(|&&x| x == 0.0).count() as f64 / v.len() as f64;
    Ok(AppendixReport {
        config: *config,
        mean1: mean(&s1),
        mean2: mean(&s2),
        mann_whitney: mann_whitney_u(&s1, &s2)?,
        ks: ks_two_sample(&s1, &s2)?,
        zero_prop1: zero(&s1),
        zero_prop2: zero(&s2),
        top1_sample1: s1,
        top1_sample2: s2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_samples() {
        let a = [1.0, 2.0, 2.0, 5.0, 7.0];
        let mw = mann_whitney_u(&a, &a).unwrap();
        assert_eq!(mw.u, 12.5);
        assert!((mw.p - 1.0).abs() < 1e-12);
        let ks = ks_two_sample(&a, &a).unwrap();
        assert_eq!(ks.d, 0.0);
        assert_eq!(ks.p, 1.0);
    }

    #[test]
    fn all_values_identical() {
        let mw = mann_whitney_u(&[3.0; 4], &[3.0; 6]).unwrap();
        assert_eq!(mw.p, 1.0);
        assert_eq!(mw.u, 12.0);
    }

    #[test]
    fn disjoint_supports() {
        let a: Vec<f64> = (0..30).map(f64::from).collect();
        let b: Vec<f64> = (100..140).map(f64::from).collect();
        assert_eq!(ks_two_sample(&a, &b).unwrap().d, 1.0);
        let mw = mann_whitney_u(&a, &b).unwrap();
        assert_eq!(mw.u, 0.0);
        assert!(mw.p < 1e-9);
    }

    #[test]
    fn known_small_example() {
        // No ties: U = 3 for a = {1, 4, 6}, b = {2, 3, 5, 7}... count pairs a > b
        let a = [1.0, 4.0, 6.0];
        let b = [2.0, 3.0, 5.0, 7.0];
        let mw = mann_whitney_u(&a, &b).unwrap();
        let pairs = a.iter().flat_map(|x| b.iter().map(move |y| (x > y) as u8 as f64)).sum::<f64>();
        assert_eq!(mw.u, pairs);
    }

    #[test]
    fn empty_inputs() {
        assert_eq!(mann_whitney_u(&[], &[1.0]), Err(Error::EmptySample));
        assert_eq!(ks_two_sample(&[1.0], &[]), Err(Error::EmptySample));
    }

    #[test]
    fn worked_example_ranks() {
        let ranks = rank_sums_from_frequency(&worked_example_table());
        assert_eq!(ranks.average_ranks, vec![675.0, 1529.0, 1755.5, 1895.0, 1988.5, 1989.5, 1995.0]);
        assert_eq!(ranks.totals, [1_099_200.0, 901_800.0]);
        assert_eq!(ranks.row_sums[0], [360_450.0, 550_125.0]);
        assert_eq!(ranks.row_sums[3], [20_845.0, 329_730.0]);
    }

    #[test]
    fn single_value_table() {
        let t = FrequencyTable::new(vec![FrequencyRow { value: 0.0, freq1: 10, freq2: 0 }]);
        assert!(t.is_err());
        let t = FrequencyTable::new(vec![
            FrequencyRow { value: 0.0, freq1: 10, freq2: 0 },
            FrequencyRow { value: 1.0, freq1: 0, freq2: 1 },
        ])
        .unwrap();
        let r = rank_sums_from_frequency(&t);
        assert_eq!(r.totals[0], 55.0);
        let t = FrequencyTable::new(vec![
            FrequencyRow { value: 0.0, freq1: 1, freq2: 0 },
            FrequencyRow { value: 1.0, freq1: 0, freq2: 1 },
        ])
        .unwrap();
        assert_eq!(rank_sums_from_frequency(&t).average_ranks, vec![1.0, 2.0]);
    }

    #[test]
    fn table_validation() {
        let rows =
            vec![FrequencyRow { value: 1.0, freq1: 1, freq2: 1 }, FrequencyRow { value: 1.0, freq1: 1, freq2: 1 }];
        assert!(FrequencyTable::new(rows).is_err());
    }
}
