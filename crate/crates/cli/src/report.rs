//! Output files. CSV numbers use six significant digits; JSON keeps every
//! bit of each double.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use citeprec_core::appendix_stats::{rank_sums_from_frequency, AppendixReport, FrequencyTable};
use citeprec_core::experiment::{ConfigSummary, FormulaProtocol, GridSpec, SkippedConfig, SweepReport};
use citeprec_core::indicators::Indicator;
use serde::Serialize;

use crate::config::{Mode, RunConfig};
use crate::CliError;

/// `printf("%.6g")`.
pub fn fmt_g(v: f64) -> String {
    const DIGITS: i32 = 6;
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return if v.is_nan() {
            "nan".into()
        } else if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..DIGITS).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (DIGITS - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{v:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(format!("{}: {e}", path.display()))
}

fn write_csv(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| io_err(path, e))?;
    w.write_record(header).map_err(|e| io_err(path, e))?;
    for row in rows {
        w.write_record(&row).map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

pub fn write_table1(dir: &Path, report: &SweepReport) -> Result<PathBuf, CliError> {
    let path = dir.join("table1.csv");
    let rows = report
        .table1
        .iter()
        .map(|r| vec![r.n.to_string(), r.indicator.name().to_string(), r.count.to_string(), r.percent.to_string()]);
    write_csv(&path, &["N", "indicator", "count", "percent"], rows)?;
    Ok(path)
}

/// Discrepancies are written in percent of the modelled interval width.
pub fn write_table2(dir: &Path, report: &SweepReport) -> Result<PathBuf, CliError> {
    let path = dir.join("table2.csv");
    let rows = report.table2.iter().map(|r| {
        vec![
            r.indicator.name().to_string(),
            r.side.name().to_string(),
            r.n.to_string(),
            fmt_g(100.0 * r.min),
            fmt_g(100.0 * r.max),
            fmt_g(100.0 * r.mean),
            fmt_g(100.0 * r.sd),
        ]
    });
    write_csv(&path, &["indicator", "limit_side", "N", "min", "max", "mean", "sd"], rows)?;
    Ok(path)
}

pub fn write_figure1(dir: &Path, records: &[ConfigSummary]) -> Result<PathBuf, CliError> {
    let path = dir.join("figure1.csv");
    let rows = records.iter().flat_map(|r| {
        Indicator::ALL.into_iter().map(move |i| {
            let p = &r.params;
            vec![
                fmt_g(p.mu1),
                fmt_g(p.mu2),
                fmt_g(p.p1),
                fmt_g(p.p2),
                p.n.to_string(),
                i.name().to_string(),
                r.similarity.get(i).map(fmt_g).unwrap_or_default(),
            ]
        })
    });
    write_csv(&path, &["mu1", "mu2", "p1", "p2", "N", "indicator", "similarity"], rows)?;
    Ok(path)
}

pub fn write_records(dir: &Path, records: &[ConfigSummary]) -> Result<PathBuf, CliError> {
    let path = dir.join("records.jsonl");
    let file = File::create(&path).map_err(|e| io_err(&path, e))?;
    let mut w = BufWriter::new(file);
    for r in records {
        serde_json::to_writer(&mut w, r).map_err(|e| io_err(&path, e))?;
        w.write_all(b"\n").map_err(|e| io_err(&path, e))?;
    }
    w.flush().map_err(|e| io_err(&path, e))?;
    Ok(path)
}

pub fn read_records(path: &Path) -> Result<Vec<ConfigSummary>, CliError> {
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    let mut out = Vec::new();
    for (line_no, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| io_err(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(&line)
            .map_err(|e| CliError::Runtime(format!("{}:{}: {e}", path.display(), line_no + 1)))?;
        out.push(record);
    }
    Ok(out)
}

pub fn write_table4(dir: &Path, table: &FrequencyTable) -> Result<PathBuf, CliError> {
    let path = dir.join("table4.csv");
    let sums = rank_sums_from_frequency(table);
    let rows = table.rows().iter().enumerate().map(|(k, row)| {
        vec![
            fmt_g(row.value),
            row.freq1.to_string(),
            row.freq2.to_string(),
            fmt_g(sums.average_ranks[k]),
            fmt_g(sums.row_sums[k][0]),
            fmt_g(sums.row_sums[k][1]),
        ]
    });
    let [f1, f2] = table.totals();
    let total = vec![
        "total".to_string(),
        f1.to_string(),
        f2.to_string(),
        String::new(),
        fmt_g(sums.totals[0]),
        fmt_g(sums.totals[1]),
    ];
    write_csv(
        &path,
        &["value", "freq1", "freq2", "average_rank", "rank_sum1", "rank_sum2"],
        rows.chain(std::iter::once(total)),
    )?;
    Ok(path)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<PathBuf, CliError> {
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| io_err(path, e))?;
    w.write_all(b"\n").map_err(|e| io_err(path, e))?;
    w.flush().map_err(|e| io_err(path, e))?;
    Ok(path.to_path_buf())
}

pub fn write_appendix(dir: &Path, report: &AppendixReport) -> Result<PathBuf, CliError> {
    write_json(&dir.join("appendix.json"), report)
}

/// Everything needed to rerun and compare. The thread count is left out
/// because it cannot change any output.
#[derive(Debug, Serialize)]
pub struct Manifest<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub mode: &'static str,
    pub master_seed: u64,
    pub protocol: FormulaProtocol,
    pub grid: &'a GridSpec,
    pub records_source: Option<String>,
    pub configurations: usize,
    pub planned_draws: Option<u128>,
    pub skipped: &'a [SkippedConfig],
    pub files: Vec<String>,
}

impl<'a> Manifest<'a> {
    pub fn new(cfg: &'a RunConfig, skipped: &'a [SkippedConfig]) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            mode: cfg.mode.name(),
            master_seed: cfg.master_seed,
            protocol: cfg.protocol,
            grid: &cfg.grid,
            records_source: cfg.records.as_ref().map(|p| p.display().to_string()),
            configurations: 0,
            planned_draws: None,
            skipped,
            files: Vec::new(),
        }
    }
}

/// Writes the files belonging to a sweep-based mode.
pub fn emit_reports(dir: &Path, mode: Mode, report: &SweepReport) -> Result<Vec<PathBuf>, CliError> {
    let mut files = Vec::new();
    if matches!(mode, Mode::Sweep | Mode::Table1) {
        files.push(write_table1(dir, report)?);
    }
    if matches!(mode, Mode::Sweep | Mode::Table2) {
        files.push(write_table2(dir, report)?);
    }
    if matches!(mode, Mode::Sweep | Mode::Figure1) {
        files.push(write_figure1(dir, &report.records)?);
    }
    if mode == Mode::Sweep {
        files.push(write_records(dir, &report.records)?);
    }
    Ok(files)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g_format_matches_printf() {
        let cases = [
            (0.0, "0"),
            (1.0, "1"),
            (-0.05, "-0.05"),
            (1099200.0, "1.0992e+06"),
            (1755.5, "1755.5"),
            (0.1234567, "0.123457"),
            (123456.7, "123457"),
            (999999.5, "1e+06"),
            (0.0001, "0.0001"),
            (0.00001234, "1.234e-05"),
            (-43.21987654, "-43.2199"),
            (2.0 / 3.0, "0.666667"),
        ];
        for (v, want) in cases {
            assert_eq!(fmt_g(v), want, "{v}");
        }
    }
}
