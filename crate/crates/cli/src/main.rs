use std::process::ExitCode;

use citeprec_cli::config::THREADS_ENV;
use citeprec_cli::{report::fmt_g, run, Args, Outcome, RunConfig};
use clap::Parser;

fn print_summary(outcome: &Outcome) {
    if let Some(sweep) = &outcome.sweep {
        for r in &sweep.table1 {
            println!("N={:<6} {:<6} {:>5} ({}%)", r.n, r.indicator.name(), r.count, r.percent);
        }
        for r in &sweep.table2 {
            println!(
                "N={:<6} {:<6} {:<5} min {:>8} max {:>8} mean {:>8} sd {:>8}",
                r.n,
                r.indicator.name(),
                r.side.name(),
                fmt_g(100.0 * r.min),
                fmt_g(100.0 * r.max),
                fmt_g(100.0 * r.mean),
                fmt_g(100.0 * r.sd)
            );
        }
    }
    if let Some(a) = &outcome.appendix {
        println!("mean1 {} mean2 {}", fmt_g(a.mean1), fmt_g(a.mean2));
        println!("mann-whitney z {} p {}", fmt_g(a.mann_whitney.z), fmt_g(a.mann_whitney.p));
        println!("kolmogorov-smirnov d {} p {}", fmt_g(a.ks.d), fmt_g(a.ks.p));
        println!("zero share {} vs {}", fmt_g(a.zero_prop1), fmt_g(a.zero_prop2));
    }
    for f in &outcome.files {
        println!("wrote {}", f.display());
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();

    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = RunConfig::resolve(args, std::env::var(THREADS_ENV).ok()).and_then(|cfg| run(&cfg));
    match result {
        Ok(outcome) => {
            print_summary(&outcome);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
