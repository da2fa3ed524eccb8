//! Parameter grid, replicated simulation of each configuration and the
//! aggregation into indicator-discrimination and formula-accuracy tables.
//!
//! Every configuration is an independent work unit. Random streams are keyed
//! by `(master_seed, config_index, replicate, role)` so results do not depend
//! on scheduling or thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::distribution::{rest_of_world_location, DiscreteLognormal, LognormalParams, MixtureSpec};
use crate::indicators::{
    indicators_with_thresholds, world_thresholds, Indicator, IndicatorSet, RankProfile, WorldReplicate,
};
use crate::intervals::{
    empirical_interval, limit_discrepancy, proportion_interval_z, similarity, Discrepancy, Interval, IntervalKind,
    LogMoments, SimilarityInput,
};
use crate::special::{t_critical, z_critical};
use crate::{Error, Result};

/// Confidence level of every interval in the study.
pub const LEVEL: f64 = 0.95;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub mu_values: Vec<f64>,
    pub p_values: Vec<f64>,
    pub n_values: Vec<usize>,
    pub sigma: f64,
    pub mu_overall: f64,
    pub replicates: usize,
    /// Also emit `mu1 == mu2` pairs as a diagnostic check.
    #[serde(default)]
    pub include_equal_means: bool,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            mu_values: (0..=10).map(|i| f64::from(90 + 2 * i) / 100.0).collect(),
            p_values: (1..=5).map(|i| f64::from(5 * i) / 100.0).collect(),
            n_values: vec![500, 1000, 5000, 10000, 50000],
            sigma: 1.0,
            mu_overall: 1.0,
            replicates: 1000,
            include_equal_means: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParameterSet {
    pub config_index: usize,
    pub mu1: f64,
    pub mu2: f64,
    pub p1: f64,
    pub p2: f64,
    pub n: usize,
    pub sigma: f64,
    pub mu_overall: f64,
    pub replicates: usize,
}

impl ParameterSet {
    pub fn mixture(&self) -> MixtureSpec {
        MixtureSpec {
            mu_overall: self.mu_overall,
            sigma: self.sigma,
            mu1: self.mu1,
            mu2: self.mu2,
            p1: self.p1,
            p2: self.p2,
        }
    }

    /// Article counts of country 1, country 2 and the rest of the world.
    pub fn group_sizes(&self) -> Result<[usize; 3]> {
        let n1 = (self.p1 * self.n as f64).round() as usize;
        let n2 = (self.p2 * self.n as f64).round() as usize;
        if n1 < 2 || n2 < 2 {
            return Err(Error::InvalidMixture(format!(
                "countries need at least 2 articles each (got {n1} and {n2} of {})",
                self.n
            )));
        }
        if n1 + n2 > self.n {
            return Err(Error::InvalidMixture(format!("countries hold {} of {} articles", n1 + n2, self.n)));
        }
        Ok([n1, n2, self.n - n1 - n2])
    }
}

/// A grid point that could not be simulated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedConfig {
    pub mu1: f64,
    pub mu2: f64,
    pub p1: f64,
    pub p2: f64,
    pub n: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Grid {
    pub sets: Vec<ParameterSet>,
    pub skipped: Vec<SkippedConfig>,
}

fn check_increasing(name: &str, values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::InvalidGrid(format!("{name} is empty")));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidGrid(format!("{name} has non-finite values")));
    }
    if values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidGrid(format!("{name} must be strictly increasing")));
    }
    Ok(())
}

/// Enumerates `(mu1, mu2, p1, p2, N)` in lexicographic order with
/// `mu1 < mu2` (or `<=` in diagnostic mode). Infeasible points are skipped
/// and reported.
pub fn generate_grid(spec: &GridSpec) -> Result<Grid> {
    check_increasing("mu values", &spec.mu_values)?;
    check_increasing("p values", &spec.p_values)?;
    let ns: Vec<f64> = spec.n_values.iter().map(|&n| n as f64).collect();
    check_increasing("N values", &ns)?;
    if spec.p_values.iter().any(|&p| p <= 0.0 || p >= 1.0) {
        return Err(Error::InvalidGrid("p values must lie in (0, 1)".into()));
    }
    if spec.n_values[0] == 0 {
        return Err(Error::InvalidGrid("N values must be positive".into()));
    }
    if !(spec.sigma > 0.0 && spec.sigma.is_finite()) || !spec.mu_overall.is_finite() {
        return Err(Error::InvalidGrid(format!(
            "sigma must be positive and finite, mu_overall finite (sigma={}, mu_overall={})",
            spec.sigma, spec.mu_overall
        )));
    }
    if spec.replicates < crate::intervals::MIN_REPLICATES {
        return Err(Error::InvalidGrid(format!(
            "replicates must be at least {} (got {})",
            crate::intervals::MIN_REPLICATES,
            spec.replicates
        )));
    }

    let mut grid = Grid::default();
    for (i, &mu1) in spec.mu_values.iter().enumerate() {
        let first = if spec.include_equal_means { i } else { i + 1 };
        for &mu2 in &spec.mu_values[first..] {
            for &p1 in &spec.p_values {
                for &p2 in &spec.p_values {
                    for &n in &spec.n_values {
                        let ps = ParameterSet {
                            config_index: grid.sets.len(),
                            mu1,
                            mu2,
                            p1,
                            p2,
                            n,
                            sigma: spec.sigma,
                            mu_overall: spec.mu_overall,
                            replicates: spec.replicates,
                        };
                        let check = rest_of_world_location(&ps.mixture()).and_then(|_| ps.group_sizes());
                        match check {
                            Ok(_) => grid.sets.push(ps),
                            Err(e) => {
                                log::warn!("skipping mu1={mu1} mu2={mu2} p1={p1} p2={p2} N={n}: {e}");
                                grid.skipped.push(SkippedConfig { mu1, mu2, p1, p2, n, reason: e.to_string() });
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(grid)
}

/// Total number of citation counts a sweep over `sets` draws.
pub fn planned_draws(sets: &[ParameterSet]) -> u128 {
    sets.iter().map(|ps| ps.replicates as u128 * ps.n as u128).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamRole {
    Country1 = 0,
    Country2 = 1,
    Rest = 2,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for one random stream, mixed from the full key so that streams are
/// independent of execution order.
pub fn derive_seed(master_seed: u64, config_index: u64, replicate_index: u64, role: StreamRole) -> u64 {
    let mut h = splitmix64(master_seed ^ 0x6A09_E667_F3BC_C908);
    for word in [config_index, replicate_index, role as u64] {
        h = splitmix64(h ^ word);
    }
    h
}

/// Draws replicate worlds for one parameter set, reusing buffers.
#[derive(Debug, Clone)]
pub struct WorldSimulator {
    params: ParameterSet,
    samplers: [DiscreteLognormal; 3],
    sizes: [usize; 3],
    world: WorldReplicate,
    profile: RankProfile,
    mu0: f64,
}

/// Indicator values and log moments of both countries in one replicate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReplicateOutcome {
    pub indicators: [IndicatorSet; 2],
    pub log_moments: [LogMoments; 2],
}

impl WorldSimulator {
    pub fn new(params: ParameterSet) -> Result<Self> {
        let mu0 = rest_of_world_location(&params.mixture())?;
        let sizes = params.group_sizes()?;
        let sampler = |mu| LognormalParams::new(mu, params.sigma).map(DiscreteLognormal::new);
        let samplers = [sampler(params.mu1)?, sampler(params.mu2)?, sampler(mu0)?];
        let zeros = |n| vec![0u32; n];
        let world = WorldReplicate::from_blocks(&zeros(sizes[0]), &zeros(sizes[1]), &zeros(sizes[2]));
        Ok(Self { params, samplers, sizes, world, profile: RankProfile::default(), mu0 })
    }

    pub fn rest_location(&self) -> f64 {
        self.mu0
    }

    pub fn sizes(&self) -> [usize; 3] {
        self.sizes
    }

    pub fn world(&self) -> &WorldReplicate {
        &self.world
    }

    fn block(&self, g: usize) -> std::ops::Range<usize> {
        let start: usize = self.sizes[..g].iter().sum();
        start..start + self.sizes[g]
    }

    /// Overwrites the world with replicate `replicate`.
    pub fn draw(&mut self, master_seed: u64, replicate: usize) -> &WorldReplicate {
        let roles = [StreamRole::Country1, StreamRole::Country2, StreamRole::Rest];
        for (g, role) in roles.into_iter().enumerate() {
            let seed = derive_seed(master_seed, self.params.config_index as u64, replicate as u64, role);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let sampler = self.samplers[g];
            let range = self.block(g);
            for c in &mut self.world.counts[range] {
                *c = sampler.sample_citations(&mut rng);
            }
        }
        self.profile.rebuild(&self.world.counts);
        &self.world
    }

    /// Indicators of both countries in the current world.
    pub fn outcome(&self) -> Result<ReplicateOutcome> {
        let thresholds = world_thresholds(&self.profile);
        let country = |g: usize| -> Result<(IndicatorSet, LogMoments)> {
            let counts = &self.world.counts[self.block(g)];
            Ok((
                indicators_with_thresholds(counts.iter().copied(), &thresholds)?,
                LogMoments::from_counts(counts.iter().copied())?,
            ))
        };
        let (i1, m1) = country(0)?;
        let (i2, m2) = country(1)?;
        Ok(ReplicateOutcome { indicators: [i1, i2], log_moments: [m1, m2] })
    }
}

/// One value per indicator.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PerIndicator<T> {
    pub arith: T,
    pub geo: T,
    pub top1: T,
    pub top10: T,
    pub top50: T,
}

impl<T> PerIndicator<T> {
    pub fn from_fn(mut f: impl FnMut(Indicator) -> T) -> Self {
        Self {
            arith: f(Indicator::Arith),
            geo: f(Indicator::Geo),
            top1: f(Indicator::Top1),
            top10: f(Indicator::Top10),
            top50: f(Indicator::Top50),
        }
    }

    pub fn get(&self, i: Indicator) -> &T {
        match i {
            Indicator::Arith => &self.arith,
            Indicator::Geo => &self.geo,
            Indicator::Top1 => &self.top1,
            Indicator::Top10 => &self.top10,
            Indicator::Top50 => &self.top50,
        }
    }
}

/// One value per indicator that has a textbook interval formula. The
/// geometric mean entry lives on the `ln(1 + c)` scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerFormula<T> {
    pub geo: T,
    pub top1: T,
    pub top10: T,
    pub top50: T,
}

impl<T> PerFormula<T> {
    pub const INDICATORS: [Indicator; 4] = [Indicator::Geo, Indicator::Top1, Indicator::Top10, Indicator::Top50];

    pub fn from_fn(mut f: impl FnMut(Indicator) -> T) -> Self {
        Self {
            geo: f(Indicator::Geo),
            top1: f(Indicator::Top1),
            top10: f(Indicator::Top10),
            top50: f(Indicator::Top50),
        }
    }

    pub fn get(&self, i: Indicator) -> Option<&T> {
        match i {
            Indicator::Arith => None,
            Indicator::Geo => Some(&self.geo),
            Indicator::Top1 => Some(&self.top1),
            Indicator::Top10 => Some(&self.top10),
            Indicator::Top50 => Some(&self.top50),
        }
    }
}

/// Replicate mean of a statistic and its empirical interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StatSummary {
    pub mean: f64,
    pub empirical: Interval,
}

impl StatSummary {
    fn from_stats(stats: &[f64]) -> Result<Self> {
        let mean = stats.iter().sum::<f64>() / stats.len() as f64;
        Ok(Self { mean, empirical: empirical_interval(stats, LEVEL)? })
    }
}

/// How per-replicate formula intervals are reduced to one interval per
/// country before comparison with the empirical interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormulaProtocol {
    /// Formula evaluated once at replicate-averaged inputs: the mean share
    /// `p`, or the mean of `ln(1 + c)` with the root-mean-square sd.
    #[default]
    MeanInputs,
    /// Formula evaluated per replicate and its limits averaged.
    AveragedLimits,
}

impl FormulaProtocol {
    pub fn name(self) -> &'static str {
        match self {
            FormulaProtocol::MeanInputs => "mean_inputs",
            FormulaProtocol::AveragedLimits => "averaged_limits",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        [FormulaProtocol::MeanInputs, FormulaProtocol::AveragedLimits].into_iter().find(|p| p.name() == name)
    }
}

/// Formula intervals (the geometric mean on the `ln(1 + c)` scale) and their
/// discrepancies from the empirical intervals under one protocol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FormulaComparison {
    pub intervals: PerFormula<Interval>,
    /// `None` when the empirical interval has zero width.
    pub discrepancy: PerFormula<Option<Discrepancy>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountrySummary {
    pub size: usize,
    pub indicators: PerIndicator<StatSummary>,
    /// Replicate distribution of the mean of `ln(1 + c)`.
    pub log_geo: StatSummary,
    pub mean_inputs: FormulaComparison,
    pub averaged_limits: FormulaComparison,
}

impl CountrySummary {
    /// The empirical interval a formula interval is compared with.
    pub fn model_interval(&self, i: Indicator) -> Option<Interval> {
        match i {
            Indicator::Arith => None,
            Indicator::Geo => Some(self.log_geo.empirical),
            other => Some(self.indicators.get(other).empirical),
        }
    }

    pub fn formula(&self, protocol: FormulaProtocol) -> &FormulaComparison {
        match protocol {
            FormulaProtocol::MeanInputs => &self.mean_inputs,
            FormulaProtocol::AveragedLimits => &self.averaged_limits,
        }
    }

    fn compare(&self, intervals: PerFormula<Interval>) -> FormulaComparison {
        let discrepancy = PerFormula::from_fn(|i| {
            let model = self.model_interval(i)?;
            limit_discrepancy(&model, intervals.get(i)?).ok()
        });
        FormulaComparison { intervals, discrepancy }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigSummary {
    pub params: ParameterSet,
    pub rest_location: f64,
    pub rest_size: usize,
    pub countries: [CountrySummary; 2],
    /// `None` when both countries have the same replicate mean.
    pub similarity: PerIndicator<Option<f64>>,
    pub draws: u64,
}

/// Per-country replicate series.
struct Series {
    stats: [Vec<f64>; 5],
    log_geo: Vec<f64>,
    log_var_sum: f64,
    formula_lower: [f64; 4],
    formula_upper: [f64; 4],
}

impl Series {
    fn new(r: usize) -> Self {
        Self {
            stats: std::array::from_fn(|_| Vec::with_capacity(r)),
            log_geo: Vec::with_capacity(r),
            log_var_sum: 0.0,
            formula_lower: [0.0; 4],
            formula_upper: [0.0; 4],
        }
    }

    fn summarize(&self, size: usize, t: f64, z: f64) -> Result<CountrySummary> {
        let r = self.log_geo.len() as f64;
        let summaries = self.stats.iter().map(|s| StatSummary::from_stats(s)).collect::<Result<Vec<_>>>()?;
        let indicators = PerIndicator::from_fn(|i| summaries[i.index()]);
        let log_geo = StatSummary::from_stats(&self.log_geo)?;

        let pooled = LogMoments { n: size, mean: log_geo.mean, sd: (self.log_var_sum / r).sqrt() };
        let at_mean = PerFormula::from_fn(|i| match i.top_percent() {
            Some(_) => proportion_interval_z(indicators.get(i).mean, size, z),
            None => pooled.interval(t),
        });
        let averaged = PerFormula::from_fn(|i| {
            let k = i.index() - 1;
            Interval::new(self.formula_lower[k] / r, self.formula_upper[k] / r, IntervalKind::Formula)
        });

        let placeholder = FormulaComparison { intervals: at_mean, discrepancy: PerFormula::from_fn(|_| None) };
        let mut country =
            CountrySummary { size, indicators, log_geo, mean_inputs: placeholder, averaged_limits: placeholder };
        country.mean_inputs = country.compare(at_mean);
        country.averaged_limits = country.compare(averaged);
        Ok(country)
    }
}

/// Simulates all replicates of one configuration and aggregates them.
pub fn run_config(ps: &ParameterSet, master_seed: u64) -> Result<ConfigSummary> {
    let mut sim = WorldSimulator::new(*ps)?;
    let sizes = sim.sizes();
    let z = z_critical(LEVEL)?;
    let t = [t_critical(LEVEL, (sizes[0] - 1) as f64)?, t_critical(LEVEL, (sizes[1] - 1) as f64)?];
    let mut series = [Series::new(ps.replicates), Series::new(ps.replicates)];
    let mut draws = 0u64;

    for r in 0..ps.replicates {
        draws += sim.draw(master_seed, r).len() as u64;
        let outcome = sim.outcome()?;
        for (g, s) in series.iter_mut().enumerate() {
            let set = &outcome.indicators[g];
            for (k, v) in set.to_array().into_iter().enumerate() {
                s.stats[k].push(v);
            }
            let moments = &outcome.log_moments[g];
            s.log_geo.push(moments.mean);
            s.log_var_sum += moments.sd * moments.sd;
            let mut formulas = [moments.interval(t[g]); 4];
            for (slot, i) in formulas[1..].iter_mut().zip(Indicator::TOP) {
                *slot = proportion_interval_z(set.get(i), sizes[g], z);
            }
            for (k, f) in formulas.iter().enumerate() {
                s.formula_lower[k] += f.lower;
                s.formula_upper[k] += f.upper;
            }
        }
    }

    let countries = [series[0].summarize(sizes[0], t[0], z)?, series[1].summarize(sizes[1], t[1], z)?];
    let similarity = PerIndicator::from_fn(|i| {
        let a = countries[0].indicators.get(i);
        let b = countries[1].indicators.get(i);
        similarity(&SimilarityInput::ordered(a.mean, a.empirical, b.mean, b.empirical))
    });
    Ok(ConfigSummary {
        params: *ps,
        rest_location: sim.rest_location(),
        rest_size: sizes[2],
        countries,
        similarity,
        draws,
    })
}

/// Progress callback: `(completed, total)`.
pub type Progress<'a> = &'a (dyn Fn(usize, usize) + Sync);

/// Runs every configuration; the output is in input order and independent of
/// `threads` (0 = one per core).
pub fn run_sweep(
    sets: &[ParameterSet],
    master_seed: u64,
    threads: usize,
    progress: Option<Progress<'_>>,
) -> Result<Vec<ConfigSummary>> {
    use std::sync::atomic::{AtomicUsize, Ordering};
    let done = AtomicUsize::new(0);
    let total = sets.len();
    let one = |ps: &ParameterSet| {
        let summary = run_config(ps, master_seed);
        let finished = done.fetch_add(1, Ordering::Relaxed) + 1;
        if let Some(report) = progress {
            report(finished, total);
        }
        summary
    };

    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::InvalidGrid(format!("thread pool: {e}")))?;
        pool.install(|| sets.par_iter().map(one).collect())
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        sets.iter().map(one).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitSide {
    Lower,
    Upper,
}

impl LimitSide {
    pub fn name(self) -> &'static str {
        match self {
            LimitSide::Lower => "lower",
            LimitSide::Upper => "upper",
        }
    }
}

/// Configurations at one `N` whose similarity is below 1 for one indicator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Table1Row {
    pub n: usize,
    pub indicator: Indicator,
    pub count: usize,
    pub total: usize,
    pub percent: u32,
}

/// Distribution of formula-versus-model discrepancies (as fractions of the
/// model interval width) for one indicator limit at one `N`, pooled over
/// both countries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Table2Row {
    pub indicator: Indicator,
    pub side: LimitSide,
    pub n: usize,
    pub count: usize,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub sd: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SweepReport {
    pub table1: Vec<Table1Row>,
    pub table2: Vec<Table2Row>,
    pub protocol: FormulaProtocol,
    pub records: Vec<ConfigSummary>,
}

impl SweepReport {
    pub fn table1_count(&self, n: usize, indicator: Indicator) -> Option<usize> {
        self.table1.iter().find(|r| r.n == n && r.indicator == indicator).map(|r| r.count)
    }

    pub fn table2_row(&self, n: usize, indicator: Indicator, side: LimitSide) -> Option<&Table2Row> {
        self.table2.iter().find(|r| r.n == n && r.indicator == indicator && r.side == side)
    }
}

fn describe(values: &[f64]) -> (f64, f64, f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0, 0.0, 0.0);
    }
    let n = values.len() as f64;
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mean = values.iter().sum::<f64>() / n;
    let sd = if values.len() > 1 {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    (min, max, mean, sd)
}

/// Folds completed configurations (in their given order) into the tables
/// using the default formula protocol.
pub fn summarize(records: Vec<ConfigSummary>) -> SweepReport {
    summarize_with(records, FormulaProtocol::default())
}

pub fn summarize_with(records: Vec<ConfigSummary>, protocol: FormulaProtocol) -> SweepReport {
    let mut ns: Vec<usize> = records.iter().map(|r| r.params.n).collect();
    ns.sort_unstable();
    ns.dedup();

    let mut table1 = Vec::new();
    let mut table2 = Vec::new();
    for &n in &ns {
        let rows: Vec<&ConfigSummary> = records.iter().filter(|r| r.params.n == n).collect();
        let total = rows.len();
        for i in Indicator::ALL {
            let count = rows.iter().filter(|r| matches!(r.similarity.get(i), Some(s) if *s < 1.0)).count();
            let percent = (100.0 * count as f64 / total as f64).round() as u32;
            table1.push(Table1Row { n, indicator: i, count, total, percent });
        }
        for i in PerFormula::<()>::INDICATORS {
            for side in [LimitSide::Lower, LimitSide::Upper] {
                let values: Vec<f64> = rows
                    .iter()
                    .flat_map(|r| r.countries.iter())
                    .filter_map(|c| c.formula(protocol).discrepancy.get(i).copied().flatten())
                    .map(|d| match side {
                        LimitSide::Lower => d.lower,
                        LimitSide::Upper => d.upper,
                    })
                    .collect();
                let (min, max, mean, sd) = describe(&values);
                table2.push(Table2Row { indicator: i, side, n, count: values.len(), min, max, mean, sd });
            }
        }
    }
    SweepReport { table1, table2, protocol, records }
}
