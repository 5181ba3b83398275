use serde::{Deserialize, Serialize};

use super::geometry::BlockGeometry;
use crate::error::{Error, Result};

/// Scale parameters of the block construction at one level `r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RenormParams {
    pub c0: u64,
    pub gamma0: f64,
    pub r: u32,
    pub mu: f64,
    delta: i64,
    window: i64,
    gammas: Vec<f64>,
}

/// `prod_{j>=1} (1 - base^{-j/4})^{-1}`, truncated once a factor is within 1e-15 of one.
pub fn gamma_product(base: f64) -> f64 {
    let mut log_sum = 0.0f64;
    let mut j = 1u32;
    loop {
        let x = base.powf(-(j as f64) / 4.0);
        if x < 1e-15 {
            break;
        }
        log_sum -= (-x).ln_1p();
        j += 1;
    }
    log_sum.exp()
}

/// `gamma_0 .. gamma_{r_max}` by the recursion without a feasibility check.
pub fn gamma_recursion(gamma0: f64, c0: u64, r_max: u32) -> Vec<f64> {
    let mut g = Vec::with_capacity(r_max as usize + 1);
    g.push(gamma0);
    if r_max >= 1 {
        g.push(gamma0);
    }
    for r in 1..r_max {
        let prev = g[r as usize];
        g.push(prev / (1.0 - (c0 as f64).powf(-(r as f64) / 4.0)));
    }
    g
}

/// `gamma_0 .. gamma_{r_max}`; fails unless `gamma_0 * gamma_product(C_0) <= 1/2`.
pub fn gamma_sequence(gamma0: f64, c0: u64, r_max: u32) -> Result<Vec<f64>> {
    if !(gamma0 > 0.0 && gamma0 <= 0.5) {
        return Err(Error::Infeasible(format!(
            "gamma_0 = {gamma0} must lie in (0, 1/2]"
        )));
    }
    if c0 < 2 {
        return Err(Error::InvalidParameter(format!("C_0 = {c0} must be at least 2")));
    }
    let bound = gamma0 * gamma_product(c0 as f64);
    if bound > 0.5 {
        return Err(Error::Infeasible(format!(
            "gamma-sequence condition violated: gamma_0 * prod_j (1 - C_0^(-j/4))^(-1) = {bound:.6} > 1/2 \
             (gamma_0 = {gamma0}, C_0 = {c0})"
        )));
    }
    Ok(gamma_recursion(gamma0, c0, r_max))
}

impl RenormParams {
    pub fn new(c0: u64, gamma0: f64, r: u32, mu: f64) -> Result<Self> {
        if c0 < 2 {
            return Err(Error::InvalidParameter(format!("C_0 = {c0} must be at least 2")));
        }
        if !(gamma0 > 0.0 && gamma0 <= 0.5) {
            return Err(Error::InvalidParameter(format!(
                "gamma_0 = {gamma0} must lie in (0, 1/2]"
            )));
        }
        if !(mu.is_finite() && mu >= 0.0) {
            return Err(Error::InvalidParameter(format!("mu = {mu} invalid")));
        }
        let pow = |e: u32| -> Result<i64> {
            (c0 as i64)
                .checked_pow(e)
                .ok_or_else(|| Error::InvalidParameter(format!("C_0^{e} overflows 64-bit integers")))
        };
        let delta = pow(6 * r)?;
        let window = pow(r)?;
        Ok(RenormParams {
            c0,
            gamma0,
            r,
            mu,
            delta,
            window,
            gammas: gamma_recursion(gamma0, c0, r),
        })
    }

    pub fn with_mu(mut self, mu: f64) -> Self {
        self.mu = mu;
        self
    }

    /// Block side `C_0^{6r}`.
    pub fn delta(&self) -> i64 {
        self.delta
    }

    /// Window length `C_0^r`.
    pub fn window(&self) -> i64 {
        self.window
    }

    pub fn gammas(&self) -> &[f64] {
        &self.gammas
    }

    pub fn gamma_r(&self) -> f64 {
        self.gammas[self.r as usize]
    }

    /// Whether `gamma_0 * gamma_product(C_0) <= 1/2`.
    pub fn gamma_feasible(&self) -> bool {
        self.gamma0 * gamma_product(self.c0 as f64) <= 0.5
    }

    /// A window is deficient when its count is strictly below this.
    pub fn bad_threshold(&self) -> f64 {
        self.gamma_r() * self.mu * self.window as f64
    }

    /// Pedestal event threshold `gamma_0 mu Delta_r`.
    pub fn pedestal_threshold(&self) -> f64 {
        self.gamma0 * self.mu * self.delta as f64
    }

    pub fn geometry(&self) -> BlockGeometry {
        BlockGeometry::new(self.delta, self.window)
    }
}

/// Constants consumed by the constants report and the tail measurements.
///
/// Values that cannot be derived here are optional user inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TheoremParameters {
    pub k: f64,
    pub epsilon0: f64,
    pub epsilon1: f64,
    pub c4: f64,
    pub c5: Option<f64>,
    pub c6: Option<f64>,
    pub k4: Option<f64>,
    pub k20: Option<f64>,
    pub r0: Option<u32>,
    pub mu0: Option<f64>,
    pub t0: Option<f64>,
}

impl Default for TheoremParameters {
    fn default() -> Self {
        TheoremParameters {
            k: 1.0,
            epsilon0: 0.1,
            epsilon1: 0.01,
            c4: 1.0,
            c5: None,
            c6: None,
            k4: None,
            k20: None,
            r0: None,
            mu0: None,
            t0: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantsRow {
    pub r: u32,
    pub const3_lhs: f64,
    pub const3_rhs: f64,
    pub const3_ok: bool,
    /// Natural log of `9 C_0^{12(r+1)} exp(-gamma_0 mu C_0^{r/4} / 2)`.
    pub const4_log_lhs: f64,
    pub const4_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantsReport {
    pub c0: u64,
    pub gamma0: f64,
    pub mu: f64,
    pub c4: f64,
    /// `gamma_0 * prod_j (1 - 2^{-j/4})^{-1}`, the C_0-independent form.
    pub gamma_bound_base2: f64,
    pub gamma_ok_base2: bool,
    /// `gamma_0 * prod_j (1 - C_0^{-j/4})^{-1}`.
    pub gamma_bound_c0: f64,
    pub gamma_ok_c0: bool,
    pub rows: Vec<ConstantsRow>,
    pub first_const3_violation: Option<u32>,
    pub first_const4_violation: Option<u32>,
    pub c0_range: (u64, u64),
    /// Smallest C_0 in the range passing both conditions for every r.
    pub minimal_c0: Option<u64>,
}

pub fn const3_terms(c0: f64, c4: f64, r: u32) -> (f64, f64) {
    let r_f = r as f64;
    let a = c0.powf(-r_f / 2.0);
    let b = c0.powf(-r_f / 4.0);
    let correction = 1.0 - c4 * r_f * c0.ln() / c0.powf(r_f);
    let lhs = a - correction * (-(-a).exp_m1()) / (1.0 - b);
    let rhs = -0.5 * c0.powf(-3.0 * r_f / 4.0);
    (lhs, rhs)
}

pub fn const4_log_lhs(c0: f64, gamma0: f64, mu: f64, r: u32) -> f64 {
    9f64.ln() + 12.0 * (r as f64 + 1.0) * c0.ln() - 0.5 * gamma0 * mu * c0.powf(r as f64 / 4.0)
}

fn rows_for(c0: u64, gamma0: f64, mu: f64, c4: f64, r_max: u32) -> Vec<ConstantsRow> {
    (1..=r_max)
        .map(|r| {
            let (l3, r3) = const3_terms(c0 as f64, c4, r);
            let l4 = const4_log_lhs(c0 as f64, gamma0, mu, r);
            ConstantsRow {
                r,
                const3_lhs: l3,
                const3_rhs: r3,
                const3_ok: l3 <= r3,
                const4_log_lhs: l4,
                const4_ok: l4 <= 0.0,
            }
        })
        .collect()
}

/// Evaluates the scale conditions for `r = 1..=r_max` at the given parameters.
pub fn check_constants(
    params: &RenormParams,
    c4: f64,
    r_max: u32,
    c0_range: (u64, u64),
) -> ConstantsReport {
    let rows = rows_for(params.c0, params.gamma0, params.mu, c4, r_max);
    let first3 = rows.iter().find(|r| !r.const3_ok).map(|r| r.r);
    let first4 = rows.iter().find(|r| !r.const4_ok).map(|r| r.r);
    let minimal_c0 = (c0_range.0.max(2)..=c0_range.1).find(|&c| {
        rows_for(c, params.gamma0, params.mu, c4, r_max)
            .iter()
            .all(|r| r.const3_ok && r.const4_ok)
    });
    let b2 = params.gamma0 * gamma_product(2.0);
    let bc = params.gamma0 * gamma_product(params.c0 as f64);
    ConstantsReport {
        c0: params.c0,
        gamma0: params.gamma0,
        mu: params.mu,
        c4,
        gamma_bound_base2: b2,
        gamma_ok_base2: b2 <= 0.5,
        gamma_bound_c0: bc,
        gamma_ok_c0: bc <= 0.5,
        rows,
        first_const3_violation: first3,
        first_const4_violation: first4,
        c0_range,
        minimal_c0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_examples() {
        let g = gamma_sequence(0.1, 16, 3).unwrap();
        assert_eq!(g[1], 0.1);
        assert!((g[2] - 0.2).abs() < 1e-15);
        assert!(gamma_sequence(0.45, 16, 3).is_err());
        assert!(gamma_sequence(0.45, 2, 3).is_err());
    }

    #[test]
    fn product_values() {
        // For base 16 the product is prod_j 1/(1 - 2^{-j}).
        let direct: f64 = (1..200).map(|j| 1.0 / (1.0 - 0.5f64.powi(j))).product();
        assert!((gamma_product(16.0) - direct).abs() < 1e-12);
    }

    #[test]
    fn ratios() {
        let g = gamma_recursion(0.01, 3, 8);
        for r in 1..8 {
            let want = 1.0 / (1.0 - 3f64.powf(-(r as f64) / 4.0));
            assert!((g[r + 1] / g[r] - want).abs() < 1e-12);
        }
    }

    #[test]
    fn const4_examples() {
        assert!(const4_log_lhs(2.0, 0.1, 1e4, 1) <= 0.0);
        assert!(const4_log_lhs(2.0, 0.1, 1.0, 1) > 0.0);
        let e = const4_log_lhs(2.0, 0.1, 1e4, 1) - (9f64.ln() + 24.0 * 2f64.ln());
        assert!((e + 594.6).abs() < 0.1);
    }

    #[test]
    fn delta_overflow() {
        assert!(RenormParams::new(64, 0.1, 1, 1.0).is_ok());
        assert!(RenormParams::new(64, 0.1, 2, 1.0).is_err());
        assert_eq!(RenormParams::new(2, 0.1, 10, 1.0).unwrap().delta(), 1 << 60);
        assert!(RenormParams::new(2, 0.1, 11, 1.0).is_err());
    }
}
