//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Build with `wasm-pack build crates/web --target web --out-dir www/pkg`.

use citeprec_core::appendix_stats::{appendix_demo, AppendixConfig};
use citeprec_core::distribution::{pmf, sample, survival, LognormalParams};
use citeprec_core::experiment::{run_config, ParameterSet};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Keeps a single call to a few seconds in the browser.
pub const MAX_DRAWS: u64 = 20_000_000;
const MAX_BINS: u32 = 10_000;

fn params(mu: f64, sigma: f64) -> Result<LognormalParams, String> {
    LognormalParams::new(mu, sigma).map_err(|e| e.to_string())
}

fn check_bins(max_k: u32) -> Result<(), String> {
    if max_k == 0 || max_k > MAX_BINS {
        return Err(format!("max_k must be in 1..={MAX_BINS}"));
    }
    Ok(())
}

/// Probabilities of the shifted counts `1..=max_k`, followed by the mass
/// above `max_k`.
#[wasm_bindgen(js_name = pmfCurve)]
pub fn pmf_curve(mu: f64, sigma: f64, max_k: u32) -> Result<Vec<f64>, String> {
    let p = params(mu, sigma)?;
    check_bins(max_k)?;
    let mut out: Vec<f64> = (1..=max_k as u64).map(|k| pmf(k, &p).unwrap_or(0.0)).collect();
    out.push(survival(max_k as u64, &p));
    Ok(out)
}

/// Relative frequencies of `n` sampled shifted counts, in the layout of
/// [`pmf_curve`].
#[wasm_bindgen(js_name = sampleHistogram)]
pub fn sample_histogram(mu: f64, sigma: f64, n: u32, max_k: u32, seed: u32) -> Result<Vec<f64>, String> {
    let p = params(mu, sigma)?;
    check_bins(max_k)?;
    if n == 0 || n as u64 > MAX_DRAWS {
        return Err(format!("n must be in 1..={MAX_DRAWS}"));
    }
    let mut hist = vec![0.0; max_k as usize + 1];
    for x in sample(&p, n as usize, &mut ChaCha8Rng::seed_from_u64(seed as u64)) {
        hist[(x.min(max_k as u64 + 1) - 1) as usize] += 1.0;
    }
    hist.iter_mut().for_each(|h| *h /= n as f64);
    Ok(hist)
}

/// One two-country configuration; the full summary as JSON.
#[wasm_bindgen(js_name = simulateConfig)]
#[allow(clippy::too_many_arguments)]
pub fn simulate_config(
    mu1: f64,
    mu2: f64,
    p1: f64,
    p2: f64,
    n: u32,
    replicates: u32,
    seed: u32,
) -> Result<String, String> {
    if n as u64 * replicates as u64 > MAX_DRAWS {
        return Err(format!("N x replicates must not exceed {MAX_DRAWS}"));
    }
    let ps = ParameterSet {
        config_index: 0,
        mu1,
        mu2,
        p1,
        p2,
        n: n as usize,
        sigma: 1.0,
        mu_overall: 1.0,
        replicates: replicates as usize,
    };
    let summary = run_config(&ps, seed as u64).map_err(|e| e.to_string())?;
    serde_json::to_string(&summary).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct AppendixView {
    mean1: f64,
    mean2: f64,
    mann_whitney_p: f64,
    ks_p: f64,
    zero_prop1: f64,
    zero_prop2: f64,
    sample1: Vec<f64>,
    sample2: Vec<f64>,
}

/// Two equal-location countries of 75 and 25 articles in a world of 500,
/// compared on their top 1% shares.
#[wasm_bindgen(js_name = appendixDemo)]
pub fn appendix_demo_json(replicates: u32, seed: u32) -> Result<String, String> {
    let config = AppendixConfig { replicates: replicates as usize, seed: seed as u64, ..AppendixConfig::default() };
    if (config.world * config.replicates) as u64 > MAX_DRAWS {
        return Err(format!("too many replicates (limit {})", MAX_DRAWS / config.world as u64));
    }
    let r = appendix_demo(&config).map_err(|e| e.to_string())?;
    let view = AppendixView {
        mean1: r.mean1,
        mean2: r.mean2,
        mann_whitney_p: r.mann_whitney.p,
        ks_p: r.ks.p,
        zero_prop1: r.zero_prop1,
        zero_prop2: r.zero_prop2,
        sample1: r.top1_sample1,
        sample2: r.top1_sample2,
    };
    serde_json::to_string(&view).map_err(|e| e.to_string())
}
