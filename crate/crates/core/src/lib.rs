//! Simulation library for comparing how precisely citation impact indicators
//! separate two groups of articles.
//!
//! Citation counts are modelled with a discretised lognormal distribution on
//! shifted counts (`citations + 1`). Each simulated world holds two countries
//! and a rest-of-world population whose location is solved so the overall
//! continuous mean stays fixed. For every configuration the five indicators
//! (arithmetic mean, offset geometric mean and the top 1%/10%/50% shares)
//! are computed over many replicated worlds, turned into empirical and
//! formula-based confidence intervals and scored with the interval
//! similarity formula.

pub mod appendix_stats;
pub mod distribution;
mod error;
pub mod experiment;
pub mod indicators;
pub mod intervals;
pub mod special;

pub use error::{Error, Result};
