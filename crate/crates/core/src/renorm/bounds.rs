//! Poisson lower-tail bounds.

use crate::error::{Error, Result};

pub const DEFAULT_THETA: f64 = 0.5;

/// Checks `(1 - e^{-theta}) - theta/2 >= theta/4`.
pub fn theta_admissible(theta: f64) -> bool {
    theta > 0.0 && (-(-theta).exp_m1()) - theta / 2.0 >= theta / 4.0
}

/// `exp(theta c / 2 - c (1 - e^{-theta}))`, an upper bound on `P{Poisson(c) <= c/2}`.
pub fn chernoff_bound(c: f64, theta: f64) -> Result<f64> {
    Ok(log_chernoff_bound(c, theta)?.exp())
}

pub fn log_chernoff_bound(c: f64, theta: f64) -> Result<f64> {
    if !theta_admissible(theta) {
        return Err(Error::InvalidParameter(format!(
            "theta = {theta} violates (1 - e^-theta) - theta/2 >= theta/4"
        )));
    }
    if !(c >= 0.0) {
        return Err(Error::InvalidParameter(format!("Poisson mean {c} must be nonnegative")));
    }
    Ok(theta * c / 2.0 + c * (-theta).exp_m1())
}

/// Bound at window mean `c = mu * window`.
pub fn chernoff_bound_for(mu: f64, window: i64, theta: f64) -> Result<f64> {
    chernoff_bound(mu * window as f64, theta)
}

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// `ln P{Poisson(c) <= k}` by log-space summation of the pmf.
pub fn log_poisson_cdf(c: f64, k: u64) -> f64 {
    if c == 0.0 {
        return 0.0;
    }
    let mut log_term = -c;
    let mut acc = log_term;
    for i in 1..=k {
        log_term += c.ln() - (i as f64).ln();
        acc = log_add(acc, log_term);
    }
    acc.min(0.0)
}
