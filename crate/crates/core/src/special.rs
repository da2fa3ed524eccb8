//! Normal, Student t and Kolmogorov distribution helpers.

use statrs::distribution::{ContinuousCDF, Normal, StudentsT};
use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::{Error, Result};

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// Standard normal upper tail `1 - Φ(x)`, without cancellation for large `x`.
pub fn normal_sf(x: f64) -> f64 {
    0.5 * libm::erfc(x * FRAC_1_SQRT_2)
}

/// Two-sided critical value `z` with `P(|Z| <= z) = level`.
pub fn z_critical(level: f64) -> Result<f64> {
    check_level(level)?;
    let std = Normal::standard();
    Ok(std.inverse_cdf(0.5 + level / 2.0))
}

/// Two-sided Student t critical value `t_{(1-level)/2, df}`.
pub fn t_critical(level: f64, df: f64) -> Result<f64> {
    check_level(level)?;
    if df.is_nan() || df <= 0.0 {
        return Err(Error::TooFewValues { needed: 2, got: 1 });
    }
    if df > 5e3 {
        // statrs loses accuracy for huge df; the Cornish-Fisher expansion
        // around the normal quantile is exact to ~1e-12 here.
        let z = z_critical(level)?;
        let z3 = z.powi(3);
        let z5 = z.powi(5);
        return Ok(z + (z3 + z) / (4.0 * df) + (5.0 * z5 + 16.0 * z3 + 3.0 * z) / (96.0 * df * df));
    }
    let t = StudentsT::new(0.0, 1.0, df).map_err(|_| Error::NonFinite)?;
    Ok(t.inverse_cdf(0.5 + level / 2.0))
}

fn check_level(level: f64) -> Result<()> {
    if level > 0.0 && level < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidLevel(level))
    }
}

/// Survival function of the Kolmogorov distribution, `P(K > lambda)`.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 1.18 {
        // Jacobi theta form converges quickly for small lambda.
        let c = -PI * PI / (8.0 * lambda * lambda);
        let mut sum = 0.0;
        for k in 1..=20 {
            let m = (2 * k - 1) as f64;
            sum += (c * m * m).exp();
        }
        (1.0 - (2.0 * PI).sqrt() / lambda * sum).clamp(0.0, 1.0)
    } else {
        let c = -2.0 * lambda * lambda;
        let mut sum = 0.0;
        for k in 1..=100 {
            let kf = k as f64;
            let term = (c * kf * kf).exp();
            sum += if k % 2 == 1 { term } else { -term };
            if term < 1e-300 {
                break;
            }
        }
        (2.0 * sum).clamp(0.0, 1.0)
    }
}
