//! Citation impact indicators computed on one country inside one simulated
//! world.
//!
//! Top-X% shares use proportional tie credit: with `q = X/100 * N` world
//! articles in the top group, the threshold count `t` satisfies
//! `#{c > t} < q <= #{c >= t}`. Articles above `t` count fully and the
//! remaining `q - #{c > t}` is split evenly over the articles tied at `t`.

use serde::{Deserialize, Serialize};
use std::sync::LazyLock;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Group {
    Country1,
    Country2,
    Rest,
}

/// The five indicators, in reporting order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Indicator {
    Arith,
    Geo,
    Top1,
    Top10,
    Top50,
}

impl Indicator {
    pub const ALL: [Indicator; 5] =
        [Indicator::Arith, Indicator::Geo, Indicator::Top1, Indicator::Top10, Indicator::Top50];

    pub const TOP: [Indicator; 3] = [Indicator::Top1, Indicator::Top10, Indicator::Top50];

    pub fn name(self) -> &'static str {
        match self {
            Indicator::Arith => "arith",
            Indicator::Geo => "geo",
            Indicator::Top1 => "top1",
            Indicator::Top10 => "top10",
            Indicator::Top50 => "top50",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|i| i.name() == name)
    }

    /// Percentile for top-X% indicators, `None` for the means.
    pub fn top_percent(self) -> Option<f64> {
        match self {
            Indicator::Top1 => Some(1.0),
            Indicator::Top10 => Some(10.0),
            Indicator::Top50 => Some(50.0),
            _ => None,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct IndicatorSet {
    pub arith: f64,
    pub geo: f64,
    pub top1: f64,
    pub top10: f64,
    pub top50: f64,
}

impl IndicatorSet {
    pub fn get(&self, indicator: Indicator) -> f64 {
        match indicator {
            Indicator::Arith => self.arith,
            Indicator::Geo => self.geo,
            Indicator::Top1 => self.top1,
            Indicator::Top10 => self.top10,
            Indicator::Top50 => self.top50,
        }
    }

    pub fn to_array(&self) -> [f64; 5] {
        [self.arith, self.geo, self.top1, self.top10, self.top50]
    }
}

/// Citation counts of every article in one simulated world.
#[derive(Debug, Clone, PartialEq)]
pub struct WorldReplicate {
    pub counts: Vec<u32>,
    pub membership: Vec<Group>,
}

impl WorldReplicate {
    pub fn new(counts: Vec<u32>, membership: Vec<Group>) -> Result<Self> {
        if counts.len() != membership.len() {
            return Err(Error::InvalidMixture(format!(
                "{} counts but {} membership labels",
                counts.len(),
                membership.len()
            )));
        }
        Ok(Self { counts, membership })
    }

    /// World laid out as consecutive blocks of country 1, country 2 and rest.
    pub fn from_blocks(country1: &[u32], country2: &[u32], rest: &[u32]) -> Self {
        let mut counts = Vec::with_capacity(country1.len() + country2.len() + rest.len());
        let mut membership = Vec::with_capacity(counts.capacity());
        for (block, group) in [(country1, Group::Country1), (country2, Group::Country2), (rest, Group::Rest)] {
            counts.extend_from_slice(block);
            membership.extend(std::iter::repeat_n(group, block.len()));
        }
        Self { counts, membership }
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn group_counts(&self, group: Group) -> impl Iterator<Item = u32> + '_ {
        self.counts.iter().zip(&self.membership).filter(move |(_, g)| **g == group).map(|(c, _)| *c)
    }

    pub fn group_size(&self, group: Group) -> usize {
        self.membership.iter().filter(|g| **g == group).count()
    }
}

pub fn arithmetic_mean(counts: &[u32]) -> Result<f64> {
    if counts.is_empty() {
        return Err(Error::EmptySample);
    }
    let total: u64 = counts.iter().map(|&c| c as u64).sum();
    Ok(total as f64 / counts.len() as f64)
}

const LN1P_TABLE_LEN: usize = 4096;

static LN1P_TABLE: LazyLock<Vec<f64>> = LazyLock::new(|| (0..LN1P_TABLE_LEN).map(|c| (c as f64).ln_1p()).collect());

/// `ln(1 + c)`, tabulated for small counts.
#[inline]
pub fn ln1p_count(c: u32) -> f64 {
    match LN1P_TABLE.get(c as usize) {
        Some(v) => *v,
        None => (c as f64).ln_1p(),
    }
}

/// `exp(mean(ln(1 + c))) - 1`.
pub fn geometric_mean_offset(counts: &[u32]) -> Result<f64> {
    if counts.is_empty() {
        return Err(Error::EmptySample);
    }
    let log_sum: f64 = counts.iter().map(|&c| ln1p_count(c)).sum();
    Ok((log_sum / counts.len() as f64).exp_m1())
}

/// Cut-off of a top-X% group: counts above `count` earn full credit, counts
/// equal to it earn `tie_credit`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TopThreshold {
    pub count: u32,
    pub tie_credit: f64,
}

impl TopThreshold {
    #[inline]
    pub fn credit(&self, c: u32) -> f64 {
        if c > self.count {
            1.0
        } else if c == self.count {
            self.tie_credit
        } else {
            0.0
        }
    }
}

const DENSE_LEN: usize = 1024;

/// Descending-rank view of a world's counts, shared by all top-X% cut-offs
/// of one replicate. Small counts go in a dense histogram; the rare large
/// ones are kept sorted.
#[derive(Debug, Clone)]
pub struct RankProfile {
    dense: Vec<u32>,
    overflow: Vec<u32>,
    total: usize,
}

impl Default for RankProfile {
    fn default() -> Self {
        Self { dense: vec![0; DENSE_LEN], overflow: Vec::new(), total: 0 }
    }
}

impl RankProfile {
    pub fn new(counts: &[u32]) -> Self {
        let mut profile = Self::default();
        profile.rebuild(counts);
        profile
    }

    /// Refills the profile in place, reusing its buffers.
    pub fn rebuild(&mut self, counts: &[u32]) {
        self.dense.iter_mut().for_each(|v| *v = 0);
        self.overflow.clear();
        for &c in counts {
            match self.dense.get_mut(c as usize) {
                Some(slot) => *slot += 1,
                None => self.overflow.push(c),
            }
        }
        self.overflow.sort_unstable_by(|a, b| b.cmp(a));
        self.total = counts.len();
    }

    pub fn len(&self) -> usize {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    /// Distinct counts in descending order with their multiplicities.
    fn descending(&self) -> impl Iterator<Item = (u32, usize)> + '_ {
        let big = self.overflow.chunk_by(|a, b| a == b).map(|run| (run[0], run.len()));
        let small = self.dense.iter().enumerate().rev().filter(|(_, m)| **m > 0).map(|(c, m)| (c as u32, *m as usize));
        big.chain(small)
    }

    pub fn threshold(&self, x_percent: f64) -> TopThreshold {
        let q = x_percent * self.total as f64 / 100.0;
        let mut above = 0usize;
        let mut last = TopThreshold { count: 0, tie_credit: 1.0 };
        for (count, mult) in self.descending() {
            if (above + mult) as f64 >= q {
                return TopThreshold { count, tie_credit: ((q - above as f64) / mult as f64).clamp(0.0, 1.0) };
            }
            above += mult;
            last = TopThreshold { count, tie_credit: 1.0 };
        }
        last
    }
}

/// Per-article fractional credit for membership of the world top `x_percent`.
pub fn top_credit(world: &WorldReplicate, x_percent: f64) -> Vec<f64> {
    let threshold = RankProfile::new(&world.counts).threshold(x_percent);
    world.counts.iter().map(|&c| threshold.credit(c)).collect()
}

/// Thresholds for the top 1%, 10% and 50% of one world.
pub fn world_thresholds(profile: &RankProfile) -> [TopThreshold; 3] {
    Indicator::TOP.map(|i| profile.threshold(i.top_percent().unwrap_or_default()))
}

/// All five indicators for one group of articles given precomputed world
/// thresholds.
pub fn indicators_with_thresholds(
    counts: impl IntoIterator<Item = u32>,
    thresholds: &[TopThreshold; 3],
) -> Result<IndicatorSet> {
    let mut n = 0usize;
    let mut sum = 0u64;
    let mut log_sum = 0.0;
    let mut credit = [0.0f64; 3];
    for c in counts {
        n += 1;
        sum += c as u64;
        log_sum += ln1p_count(c);
        for (acc, t) in credit.iter_mut().zip(thresholds) {
            *acc += t.credit(c);
        }
    }
    if n == 0 {
        return Err(Error::EmptySample);
    }
    let nf = n as f64;
    Ok(IndicatorSet {
        arith: sum as f64 / nf,
        geo: (log_sum / nf).exp_m1(),
        top1: credit[0] / nf,
        top10: credit[1] / nf,
        top50: credit[2] / nf,
    })
}

pub fn country_indicators(world: &WorldReplicate, country: Group) -> Result<IndicatorSet> {
    let thresholds = world_thresholds(&RankProfile::new(&world.counts));
    indicators_with_thresholds(world.group_counts(country), &thresholds)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn world(counts: &[u32]) -> WorldReplicate {
        WorldReplicate::from_blocks(&[], &[], counts)
    }

    #[test]
    fn arithmetic_mean_examples() {
        assert_eq!(arithmetic_mean(&[0, 0, 0]).unwrap(), 0.0);
        assert_eq!(arithmetic_mean(&[1, 3]).unwrap(), 2.0);
        let series: Vec<u32> = (0..10).collect();
        assert_eq!(arithmetic_mean(&series).unwrap(), 4.5);
        assert_eq!(arithmetic_mean(&[]), Err(Error::EmptySample));
    }

    #[test]
    fn geometric_mean_examples() {
        assert_eq!(geometric_mean_offset(&[0, 0, 0]).unwrap(), 0.0);
        let g = geometric_mean_offset(&[1, 3]).unwrap();
        assert!((g - (8f64.sqrt() - 1.0)).abs() < 1e-12);
        assert!((g - 1.828427).abs() < 1e-6);
        assert_eq!(geometric_mean_offset(&[]), Err(Error::EmptySample));
        // table boundary
        let big = geometric_mean_offset(&[5000, 5000]).unwrap();
        assert!((big - 5000.0).abs() < 1e-9);
    }

    #[test]
    fn one_third_credit_example() {
        let mut counts = vec![10, 10, 10];
        counts.extend(std::iter::repeat_n(2, 97));
        let credit = top_credit(&world(&counts), 1.0);
        for c in &credit[..3] {
            assert!((c - 1.0 / 3.0).abs() < 1e-15);
        }
        assert!(credit[3..].iter().all(|&c| c == 0.0));
    }

    #[test]
    fn full_tie() {
        let credit = top_credit(&world(&[4; 20]), 10.0);
        assert!(credit.iter().all(|&c| (c - 0.1).abs() < 1e-15));
    }

    #[test]
    fn half_split_instance() {
        let credit = top_credit(&world(&[5, 4, 3, 3, 2, 1, 0]), 50.0);
        assert_eq!(credit, vec![1.0, 1.0, 0.75, 0.75, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn exact_boundary_gets_full_credit() {
        // 10 articles, top 50% = 5 articles, ties exactly fill the group
        let credit = top_credit(&world(&[9, 9, 7, 7, 7, 1, 1, 1, 1, 1]), 50.0);
        assert_eq!(&credit[..5], &[1.0; 5]);
        assert_eq!(&credit[5..], &[0.0; 5]);
    }

    #[test]
    fn overflow_values_are_ranked() {
        let mut counts = vec![1u32; 96];
        counts.extend([50_000, 20_000, 20_000, 3]);
        let credit = top_credit(&world(&counts), 2.0);
        assert_eq!(credit[96], 1.0);
        assert_eq!(credit[97], 0.5);
        assert_eq!(credit[98], 0.5);
        assert_eq!(credit[99], 0.0);
    }

    #[test]
    fn country_holding_everything() {
        let w = WorldReplicate::from_blocks(&[3, 1, 4, 1, 5, 9, 2, 6], &[], &[]);
        let set = country_indicators(&w, Group::Country1).unwrap();
        assert!((set.top50 - 0.5).abs() < 1e-15);
        assert!((set.top10 - 0.1).abs() < 1e-15);
        assert!((set.top1 - 0.01).abs() < 1e-15);
    }

    #[test]
    fn dominant_country() {
        let rest: Vec<u32> = (0..998).map(|i| i % 40).collect();
        let w = WorldReplicate::from_blocks(&[100, 200], &[0], &rest);
        let set = country_indicators(&w, Group::Country1).unwrap();
        // q = 10.01 articles in the top 1%, the country holds 2
        assert_eq!(set.top1, 1.0);
        assert_eq!(set.top10, 1.0);
    }

    #[test]
    fn empty_country_is_error() {
        let w = WorldReplicate::from_blocks(&[1, 2], &[], &[3]);
        assert_eq!(country_indicators(&w, Group::Country2), Err(Error::EmptySample));
    }

    #[test]
    fn mismatched_membership() {
        assert!(WorldReplicate::new(vec![1, 2], vec![Group::Rest]).is_err());
    }

    #[test]
    fn indicator_names_round_trip() {
        for i in Indicator::ALL {
            assert_eq!(Indicator::from_name(i.name()), Some(i));
        }
    }
}
