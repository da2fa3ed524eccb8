//! Run configuration: a TOML file, command-line flags and the
//! `CITEPREC_THREADS` variable, merged in that order of increasing priority
//! (the variable only applies when `--threads` is absent).

use std::path::{Path, PathBuf};

use citeprec_core::experiment::{FormulaProtocol, GridSpec};
use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const THREADS_ENV: &str = "CITEPREC_THREADS";
pub const DEFAULT_SEED: u64 = 20160101;
const DEFAULT_MU_STEP: f64 = 0.02;
const DEFAULT_P_STEP: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Sweep,
    Table1,
    Table2,
    Figure1,
    Appendix,
    Table4,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Sweep => "sweep",
            Mode::Table1 => "table1",
            Mode::Table2 => "table2",
            Mode::Figure1 => "figure1",
            Mode::Appendix => "appendix",
            Mode::Table4 => "table4",
        }
    }

    pub fn needs_sweep(self) -> bool {
        matches!(self, Mode::Sweep | Mode::Table1 | Mode::Table2 | Mode::Figure1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProtocolArg {
    MeanInputs,
    AveragedLimits,
}

impl From<ProtocolArg> for FormulaProtocol {
    fn from(p: ProtocolArg) -> Self {
        match p {
            ProtocolArg::MeanInputs => FormulaProtocol::MeanInputs,
            ProtocolArg::AveragedLimits => FormulaProtocol::AveragedLimits,
        }
    }
}

/// Monte Carlo precision sweeps for citation impact indicators.
#[derive(Debug, Default, Parser)]
#[command(name = "citeprec", version)]
pub struct Args {
    /// What to produce.
    #[arg(value_enum)]
    pub mode: Option<Mode>,

    /// TOML file with any of the long option names as keys (underscored).
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Explicit country location values.
    #[arg(long, num_args = 1.., value_delimiter = ',', conflicts_with = "mu_range")]
    pub mu: Option<Vec<f64>>,

    /// Country location values from LO to HI in steps of --mu-step.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], alias = "mu1-range", allow_negative_numbers = true)]
    pub mu_range: Option<Vec<f64>>,

    #[arg(long)]
    pub mu_step: Option<f64>,

    /// Explicit country share values.
    #[arg(long, num_args = 1.., value_delimiter = ',', conflicts_with = "p_range")]
    pub p: Option<Vec<f64>>,

    #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
    pub p_range: Option<Vec<f64>>,

    #[arg(long)]
    pub p_step: Option<f64>,

    /// World sizes.
    #[arg(long, num_args = 1.., value_delimiter = ',')]
    pub n: Option<Vec<usize>>,

    #[arg(long)]
    pub sigma: Option<f64>,

    #[arg(long, allow_negative_numbers = true)]
    pub mu_overall: Option<f64>,

    #[arg(long)]
    pub replicates: Option<usize>,

    #[arg(long)]
    pub seed: Option<u64>,

    /// Worker threads; 0 uses every core.
    #[arg(long)]
    pub threads: Option<usize>,

    /// Output directory.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,

    /// Also run the equal-location pairs.
    #[arg(long)]
    pub diagnostics: bool,

    #[arg(long, value_enum)]
    pub protocol: Option<ProtocolArg>,

    /// Rebuild tables from an earlier records.jsonl instead of simulating.
    #[arg(long, value_name = "FILE")]
    pub records: Option<PathBuf>,

    /// No progress output.
    #[arg(long)]
    pub quiet: bool,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub mode: Option<Mode>,
    pub mu: Option<Vec<f64>>,
    pub mu_range: Option<[f64; 2]>,
    pub mu_step: Option<f64>,
    pub p: Option<Vec<f64>>,
    pub p_range: Option<[f64; 2]>,
    pub p_step: Option<f64>,
    pub n: Option<Vec<usize>>,
    pub sigma: Option<f64>,
    pub mu_overall: Option<f64>,
    pub replicates: Option<usize>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
    pub diagnostics: Option<bool>,
    pub protocol: Option<FormulaProtocol>,
    pub records: Option<PathBuf>,
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(format!("config: {}", e.message())))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mode: Mode,
    pub grid: GridSpec,
    pub master_seed: u64,
    pub threads: usize,
    pub out: PathBuf,
    pub protocol: FormulaProtocol,
    pub records: Option<PathBuf>,
    pub quiet: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Sweep,
            grid: GridSpec::default(),
            master_seed: DEFAULT_SEED,
            threads: 0,
            out: PathBuf::from("out"),
            protocol: FormulaProtocol::default(),
            records: None,
            quiet: false,
        }
    }
}

/// `LO, LO + step, ...` up to `HI`, each value rounded to the nearest double
/// of its ten-decimal representation so that `0.9 + 5 * 0.02` equals `1.0`.
pub fn decimal_range(key: &str, lo: f64, hi: f64, step: f64) -> Result<Vec<f64>, CliError> {
    if !(lo.is_finite() && hi.is_finite() && step.is_finite()) {
        return Err(CliError::Config(format!("{key}: non-finite value")));
    }
    if hi <= lo {
        return Err(CliError::Config(format!("{key}: nonincreasing range {lo} .. {hi}")));
    }
    if step <= 0.0 {
        return Err(CliError::Config(format!("{key}: step must be positive, got {step}")));
    }
    let steps = ((hi - lo) / step + 1e-9).floor() as usize;
    Ok((0..=steps)
        .map(|i| {
            let v = lo + i as f64 * step;
            format!("{v:.10}").parse().unwrap_or(v)
        })
        .collect())
}

fn pick_values(
    key: &str,
    list: Option<Vec<f64>>,
    range: Option<[f64; 2]>,
    step: f64,
    fallback: Vec<f64>,
) -> Result<Vec<f64>, CliError> {
    match (list, range) {
        (Some(_), Some(_)) => Err(CliError::Config(format!("{key}: give either a list or a range, not both"))),
        (Some(v), None) => Ok(v),
        (None, Some([lo, hi])) => decimal_range(&format!("{key}_range"), lo, hi, step),
        (None, None) => Ok(fallback),
    }
}

fn pair(v: Option<Vec<f64>>) -> Option<[f64; 2]> {
    v.map(|v| [v[0], v[1]])
}

impl RunConfig {
    /// Merges defaults, the file named by `--config`, the flags and the
    /// environment.
    pub fn resolve(args: Args, env_threads: Option<String>) -> Result<Self, CliError> {
        let file = match &args.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        Self::merge(file, args, env_threads)
    }

    pub fn merge(file: FileConfig, args: Args, env_threads: Option<String>) -> Result<Self, CliError> {
        let defaults = GridSpec::default();

        // A flag replaces the file's list or range for the same axis.
        let (mu, mu_range) = if args.mu.is_some() || args.mu_range.is_some() {
            (args.mu, pair(args.mu_range))
        } else {
            (file.mu, file.mu_range)
        };
        let (p, p_range) = if args.p.is_some() || args.p_range.is_some() {
            (args.p, pair(args.p_range))
        } else {
            (file.p, file.p_range)
        };
        let mu_step = args.mu_step.or(file.mu_step).unwrap_or(DEFAULT_MU_STEP);
        let p_step = args.p_step.or(file.p_step).unwrap_or(DEFAULT_P_STEP);

        let grid = GridSpec {
            mu_values: pick_values("mu", mu, mu_range, mu_step, defaults.mu_values)?,
            p_values: pick_values("p", p, p_range, p_step, defaults.p_values)?,
            n_values: args.n.or(file.n).unwrap_or(defaults.n_values),
            sigma: args.sigma.or(file.sigma).unwrap_or(defaults.sigma),
            mu_overall: args.mu_overall.or(file.mu_overall).unwrap_or(defaults.mu_overall),
            replicates: args.replicates.or(file.replicates).unwrap_or(defaults.replicates),
            include_equal_means: args.diagnostics || file.diagnostics.unwrap_or(false),
        };

        let threads = match (args.threads, env_threads) {
            (Some(t), _) => t,
            (None, Some(v)) => v
                .trim()
                .parse()
                .map_err(|_| CliError::Config(format!("{THREADS_ENV}: expected a thread count, got {v:?}")))?,
            (None, None) => file.threads.unwrap_or(0),
        };

        Ok(Self {
            mode: args.mode.or(file.mode).unwrap_or_default(),
            grid,
            master_seed: args.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            threads,
            out: args.out.or(file.out).unwrap_or_else(|| PathBuf::from("out")),
            protocol: args.protocol.map(Into::into).or(file.protocol).unwrap_or_default(),
            records: args.records.or(file.records),
            quiet: args.quiet,
        })
    }
}
