//! Front end for the citeprec simulation study: configuration handling,
//! sweep orchestration and report files.

pub mod config;
pub mod report;

use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};

use citeprec_core::appendix_stats::{appendix_demo, worked_example_table, AppendixConfig, AppendixReport};
use citeprec_core::experiment::{generate_grid, planned_draws, run_sweep, summarize_with, SweepReport};

pub use config::{Args, Mode, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }
}

#[derive(Debug)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub sweep: Option<SweepReport>,
    pub appendix: Option<AppendixReport>,
}

fn progress_printer(quiet: bool) -> impl Fn(usize, usize) + Sync {
    let last = AtomicUsize::new(usize::MAX);
    move |done: usize, total: usize| {
        if quiet {
            return;
        }
        let pct = done * 100 / total.max(1);
        if last.swap(pct, Ordering::Relaxed) != pct {
            eprint!("\r{done}/{total} configurations ({pct}%)");
            if done == total {
                eprintln!();
            }
        }
    }
}

pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    std::fs::create_dir_all(&cfg.out).map_err(|e| CliError::Runtime(format!("{}: {e}", cfg.out.display())))?;

    let mut outcome = Outcome { files: Vec::new(), sweep: None, appendix: None };
    let mut skipped = Vec::new();
    let mut configurations = 0;
    let mut draws = None;

    if cfg.mode.needs_sweep() {
        let records = match &cfg.records {
            Some(path) => report::read_records(path)?,
            None => {
                let grid = generate_grid(&cfg.grid).map_err(|e| CliError::Config(e.to_string()))?;
                for s in &grid.skipped {
                    log::warn!("skipped mu1={} mu2={} p1={} p2={} N={}: {}", s.mu1, s.mu2, s.p1, s.p2, s.n, s.reason);
                }
                draws = Some(planned_draws(&grid.sets));
                if !cfg.quiet {
                    eprintln!("{} configurations, {} draws", grid.sets.len(), draws.unwrap_or(0));
                }
                let progress = progress_printer(cfg.quiet);
                let records = run_sweep(&grid.sets, cfg.master_seed, cfg.threads, Some(&progress))
                    .map_err(|e| CliError::Runtime(e.to_string()))?;
                skipped = grid.skipped;
                records
            }
        };
        configurations = records.len();
        let sweep = summarize_with(records, cfg.protocol);
        outcome.files = report::emit_reports(&cfg.out, cfg.mode, &sweep)?;
        outcome.sweep = Some(sweep);
    } else if cfg.mode == Mode::Appendix {
        let demo =
            AppendixConfig { replicates: cfg.grid.replicates, seed: cfg.master_seed, ..AppendixConfig::default() };
        let rep = appendix_demo(&demo).map_err(|e| CliError::Runtime(e.to_string()))?;
        outcome.files.push(report::write_appendix(&cfg.out, &rep)?);
        outcome.appendix = Some(rep);
    } else {
        outcome.files.push(report::write_table4(&cfg.out, &worked_example_table())?);
    }

    let mut manifest = report::Manifest::new(cfg, &skipped);
    manifest.configurations = configurations;
    manifest.planned_draws = draws;
    manifest.files =
        outcome.files.iter().filter_map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned())).collect();
    let path = report::write_json(&cfg.out.join("manifest.json"), &manifest)?;
    outcome.files.push(path);
    Ok(outcome)
}
