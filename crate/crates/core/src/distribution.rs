//! Discretised lognormal distribution on the positive integers and the
//! three-population mixture algebra.
//!
//! The probability of the integer `k` is the continuous lognormal mass on
//! `[k - 0.5, k + 0.5)`, renormalised by the mass on `[0.5, inf)` that is
//! reachable by any integer. Values drawn here are *shifted* counts; the
//! citation count of an article is `k - 1`.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::special::{normal_cdf, normal_sf};
use crate::{Error, Result};

const HALF_LN: f64 = -std::f64::consts::LN_2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LognormalParams {
    pub mu: f64,
    pub sigma: f64,
}

impl LognormalParams {
    pub fn new(mu: f64, sigma: f64) -> Result<Self> {
        if mu.is_finite() && sigma.is_finite() && sigma > 0.0 {
            Ok(Self { mu, sigma })
        } else {
            Err(Error::InvalidParams { mu, sigma })
        }
    }

    fn z(&self, x: f64) -> f64 {
        (x.ln() - self.mu) / self.sigma
    }

    /// Continuous lognormal mass on `[0.5, inf)`.
    pub fn reachable_mass(&self) -> f64 {
        normal_sf((HALF_LN - self.mu) / self.sigma)
    }

    /// Mean of the continuous lognormal, `exp(mu + sigma^2 / 2)`.
    pub fn continuous_mean(&self) -> f64 {
        (self.mu + self.sigma * self.sigma / 2.0).exp()
    }
}

/// Continuous mass on `[a, b)` for `0 < a < b`, evaluated on whichever tail
/// avoids cancellation.
fn interval_mass(params: &LognormalParams, a: f64, b: f64) -> f64 {
    let za = params.z(a);
    let zb = params.z(b);
    if za > 0.0 {
        normal_sf(za) - normal_sf(zb)
    } else {
        normal_cdf(zb) - normal_cdf(za)
    }
}

pub fn pmf(k: u64, params: &LognormalParams) -> Result<f64> {
    if k == 0 {
        return Err(Error::OutsideSupport { k });
    }
    let k = k as f64;
    Ok(interval_mass(params, k - 0.5, k + 0.5) / params.reachable_mass())
}

/// `P(X <= k)`, computed as one minus the normalised upper tail.
pub fn cdf(k: u64, params: &LognormalParams) -> Result<f64> {
    if k == 0 {
        return Err(Error::OutsideSupport { k });
    }
    Ok(1.0 - survival(k, params))
}

/// `P(X > k)` for `k >= 0`.
pub fn survival(k: u64, params: &LognormalParams) -> f64 {
    let upper = normal_sf(params.z(k as f64 + 0.5));
    (upper / params.reachable_mass()).min(1.0)
}

/// Sampler for shifted counts: continuous lognormal variates below 0.5 are
/// rejected, survivors are rounded to the nearest integer.
#[derive(Debug, Clone, Copy)]
pub struct DiscreteLognormal {
    params: LognormalParams,
}

impl DiscreteLognormal {
    pub fn new(params: LognormalParams) -> Self {
        Self { params }
    }

    pub fn params(&self) -> LognormalParams {
        self.params
    }

    /// Draws one citation count (shifted value minus one).
    #[inline]
    pub fn sample_citations<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        (self.sample(rng) - 1).min(u32::MAX as u64) as u32
    }
}

impl Distribution<u64> for DiscreteLognormal {
    #[inline]
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        loop {
            let z: f64 = StandardNormal.sample(rng);
            let y = self.params.mu + self.params.sigma * z;
            if y >= HALF_LN {
                // saturating float-to-int cast keeps astronomically large draws finite
                return y.exp().round() as u64;
            }
        }
    }
}

/// Draws `n` shifted counts.
pub fn sample<R: Rng + ?Sized>(params: &LognormalParams, n: usize, rng: &mut R) -> Vec<u64> {
    let dist = DiscreteLognormal::new(*params);
    (0..n).map(|_| dist.sample(rng)).collect()
}

/// Two countries embedded in a world whose overall continuous mean is
/// `exp(mu_overall + sigma^2 / 2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixtureSpec {
    pub mu_overall: f64,
    pub sigma: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub p1: f64,
    pub p2: f64,
}

impl MixtureSpec {
    pub fn validate(&self) -> Result<()> {
        let finite = [self.mu_overall, self.sigma, self.mu1, self.mu2, self.p1, self.p2].iter().all(|v| v.is_finite());
        if !finite {
            return Err(Error::NonFinite);
        }
        if self.sigma <= 0.0 {
            return Err(Error::InvalidParams { mu: self.mu_overall, sigma: self.sigma });
        }
        if self.p1 <= 0.0 || self.p2 <= 0.0 || self.p1 + self.p2 >= 1.0 {
            return Err(Error::InvalidMixture(format!(
                "shares must satisfy 0 < p1, p2 and p1 + p2 < 1 (p1={}, p2={})",
                self.p1, self.p2
            )));
        }
        Ok(())
    }

    /// Argument of the logarithm in the rest-of-world solution (before
    /// dividing by the rest-of-world share).
    pub fn rest_excess(&self) -> f64 {
        self.mu_overall.exp() - self.p1 * self.mu1.exp() - self.p2 * self.mu2.exp()
    }
}

/// Continuous mean of the three-component mixture when the rest of the world
/// has location `mu0`.
pub fn mixture_mean(spec: &MixtureSpec, mu0: f64) -> f64 {
    let half_var = spec.sigma * spec.sigma / 2.0;
    let rest = 1.0 - spec.p1 - spec.p2;
    spec.p1 * (spec.mu1 + half_var).exp() + spec.p2 * (spec.mu2 + half_var).exp() + rest * (mu0 + half_var).exp()
}

/// Location of the rest of the world that keeps the mixture mean at
/// `exp(mu_overall + sigma^2 / 2)`.
pub fn rest_of_world_location(spec: &MixtureSpec) -> Result<f64> {
    spec.validate()?;
    let excess = spec.rest_excess();
    if excess.is_nan() || excess <= 0.0 {
        return Err(Error::InfeasibleMixture { argument: excess });
    }
    Ok((excess / (1.0 - spec.p1 - spec.p2)).ln())
}
