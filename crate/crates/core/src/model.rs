//! Jump kernels and the shared model configuration.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::alias::AliasTable;
use crate::error::{Error, Result};

/// Largest dimension supported by the simulator.
pub const MAX_DIM: usize = 8;

const SUM_TOLERANCE: f64 = 1e-12;

/// A finite-range jump distribution on Z^d.
#[derive(Debug, Clone)]
pub struct Kernel {
    dim: usize,
    offsets: Vec<i64>,
    probs: Vec<f64>,
    alias: AliasTable,
    range: i64,
}

/// Serializable form of a kernel: parallel lists of displacements and probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelTable {
    pub offsets: Vec<Vec<i64>>,
    pub probs: Vec<f64>,
}

impl Kernel {
    pub fn new(dim: usize, entries: &[(Vec<i64>, f64)]) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::InvalidKernel(format!(
                "dimension {dim} outside 1..={MAX_DIM}"
            )));
        }
        if entries.is_empty() {
            return Err(Error::InvalidKernel("empty offset list".into()));
        }
        let mut offsets = Vec::with_capacity(entries.len() * dim);
        let mut probs = Vec::with_capacity(entries.len());
        for (off, p) in entries {
            if off.len() != dim {
                return Err(Error::InvalidKernel(format!(
                    "offset {off:?} has length {} but dimension is {dim}",
                    off.len()
                )));
            }
            if !(p.is_finite() && *p > 0.0 && *p <= 1.0) {
                return Err(Error::InvalidKernel(format!(
                    "probability {p} of offset {off:?} not in (0, 1]"
                )));
            }
            offsets.extend_from_slice(off);
            probs.push(*p);
        }
        let n = probs.len();
        for a in 0..n {
            for b in a + 1..n {
                if offsets[a * dim..(a + 1) * dim] == offsets[b * dim..(b + 1) * dim] {
                    return Err(Error::InvalidKernel(format!(
                        "duplicate offset {:?}",
                        &offsets[a * dim..(a + 1) * dim]
                    )));
                }
            }
        }
        let total = neumaier_sum(probs.iter().copied());
        if (total - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidKernel(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        for p in &mut probs {
            *p /= total;
        }
        let range = offsets.iter().map(|o| o.abs()).max().unwrap_or(0);
        let alias = AliasTable::new(&probs);
        Ok(Kernel {
            dim,
            offsets,
            probs,
            alias,
            range,
        })
    }

    pub fn from_table(dim: usize, table: &KernelTable) -> Result<Self> {
        if table.offsets.len() != table.probs.len() {
            return Err(Error::InvalidKernel(
                "offsets and probs have different lengths".into(),
            ));
        }
        let entries: Vec<(Vec<i64>, f64)> = table
            .offsets
            .iter()
            .cloned()
            .zip(table.probs.iter().copied())
            .collect();
        Kernel::new(dim, &entries)
    }

    pub fn to_table(&self) -> KernelTable {
        KernelTable {
            offsets: (0..self.len()).map(|k| self.offset(k).to_vec()).collect(),
            probs: self.probs.clone(),
        }
    }

    /// Nearest-neighbour kernel in d=1 with P(+1) = `p_right`.
    pub fn nearest_neighbor_1d(p_right: f64) -> Result<Self> {
        if p_right >= 1.0 {
            return Kernel::new(1, &[(vec![1], 1.0)]);
        }
        if p_right <= 0.0 {
            return Kernel::new(1, &[(vec![-1], 1.0)]);
        }
        Kernel::new(1, &[(vec![1], p_right), (vec![-1], 1.0 - p_right)])
    }

    /// Simple symmetric random walk kernel in d dimensions.
    pub fn simple_symmetric(dim: usize) -> Result<Self> {
        let w = 1.0 / (2 * dim) as f64;
        let mut entries = Vec::with_capacity(2 * dim);
        for a in 0..dim {
            for s in [1i64, -1] {
                let mut off = vec![0; dim];
                off[a] = s;
                entries.push((off, w));
            }
        }
        Kernel::new(dim, &entries)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn offset(&self, k: usize) -> &[i64] {
        &self.offsets[k * self.dim..(k + 1) * self.dim]
    }

    pub fn prob(&self, k: usize) -> f64 {
        self.probs[k]
    }

    /// Largest coordinate of any displacement in absolute value.
    pub fn range(&self) -> i64 {
        self.range
    }

    pub fn contains(&self, displacement: &[i64]) -> bool {
        (0..self.len()).any(|k| self.offset(k) == displacement)
    }

    pub fn is_nearest_neighbor(&self) -> bool {
        (0..self.len()).all(|k| self.offset(k).iter().map(|c| c.abs()).sum::<i64>() == 1)
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> &[i64] {
        self.offset(self.alias.sample(rng))
    }
}

/// Compensated (Neumaier) summation.
pub fn neumaier_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Mean displacement of a kernel, one compensated sum per axis.
pub fn kernel_mean(k: &Kernel) -> Vec<f64> {
    (0..k.dim())
        .map(|a| neumaier_sum((0..k.len()).map(|i| k.offset(i)[a] as f64 * k.prob(i))))
        .collect()
}

fn check_solomon_p(p: f64) -> Result<()> {
    if !(p > 0.5 && p < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "Solomon parameter p = {p} must lie strictly between 1/2 and 1"
        )));
    }
    Ok(())
}

/// Returns `(p', p'')` with p'(+1) = p = p''(-1).
pub fn solomon_kernels(p: f64) -> Result<(Kernel, Kernel)> {
    check_solomon_p(p)?;
    let q = 1.0 - p;
    let occupied = Kernel::new(1, &[(vec![1], p), (vec![-1], q)])?;
    let vacant = Kernel::new(1, &[(vec![1], q), (vec![-1], p)])?;
    Ok((occupied, vacant))
}

/// Frozen-environment zero-speed interval `(log(1/p), log(1/(1-p)))`.
pub fn solomon_critical_densities(p: f64) -> Result<(f64, f64)> {
    check_solomon_p(p)?;
    Ok((-p.ln(), -(-p).ln_1p()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum EnvironmentMode {
    #[default]
    Dynamic,
    Frozen,
}

/// Which site decides between the occupied and vacant kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum KernelRule {
    /// The green particle's current site at the jump instant.
    #[default]
    Departure,
    /// Propose a step from p'; take it if the target is occupied, otherwise draw from p''.
    Destination,
}

#[derive(Debug, Clone)]
pub struct ModelConfig {
    pub dim: usize,
    pub kernel_occupied: Kernel,
    pub kernel_vacant: Kernel,
    pub mu: f64,
    pub green_rate: f64,
    pub red_rate: f64,
    pub mode: EnvironmentMode,
    pub kernel_rule: KernelRule,
}

impl ModelConfig {
    pub fn new(kernel_occupied: Kernel, kernel_vacant: Kernel, mu: f64) -> Result<Self> {
        let cfg = ModelConfig {
            dim: kernel_occupied.dim(),
            kernel_occupied,
            kernel_vacant,
            mu,
            green_rate: 1.0,
            red_rate: 1.0,
            mode: EnvironmentMode::Dynamic,
            kernel_rule: KernelRule::Departure,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn solomon(p: f64, mu: f64) -> Result<Self> {
        let (a, b) = solomon_kernels(p)?;
        ModelConfig::new(a, b, mu)
    }

    pub fn with_mode(mut self, mode: EnvironmentMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_mu(mut self, mu: f64) -> Self {
        self.mu = mu;
        self
    }

    pub fn with_kernel_rule(mut self, rule: KernelRule) -> Self {
        self.kernel_rule = rule;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.kernel_occupied.dim() != self.dim || self.kernel_vacant.dim() != self.dim {
            return Err(Error::InvalidParameter(
                "kernels must share the model dimension".into(),
            ));
        }
        if !(self.mu.is_finite() && self.mu >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "density mu = {} must be finite and nonnegative",
                self.mu
            )));
        }
        for (name, r) in [("green_rate", self.green_rate), ("red_rate", self.red_rate)] {
            if !(r.is_finite() && r > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} = {r} must be positive")));
            }
        }
        Ok(())
    }

    pub fn v_occupied(&self) -> Vec<f64> {
        kernel_mean(&self.kernel_occupied)
    }

    pub fn v_vacant(&self) -> Vec<f64> {
        kernel_mean(&self.kernel_vacant)
    }

    /// Largest single-jump displacement of the green particle along any axis.
    pub fn green_range(&self) -> i64 {
        self.kernel_occupied.range().max(self.kernel_vacant.range())
    }

    pub fn in_combined_support(&self, displacement: &[i64]) -> bool {
        self.kernel_occupied.contains(displacement) || self.kernel_vacant.contains(displacement)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn nearest_neighbor_mean() {
        let k = Kernel::nearest_neighbor_1d(0.7).unwrap();
        assert!((kernel_mean(&k)[0] - 0.4).abs() < 1e-15);
        let s = Kernel::nearest_neighbor_1d(0.5).unwrap();
        assert_eq!(kernel_mean(&s)[0], 0.0);
    }

    #[test]
    fn deterministic_2d_mean() {
        let k = Kernel::new(2, &[(vec![1, 0], 1.0)]).unwrap();
        assert_eq!(kernel_mean(&k), vec![1.0, 0.0]);
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(Kernel::new(1, &[(vec![1], 0.5), (vec![1], 0.5)]).is_err());
        assert!(Kernel::new(1, &[(vec![1], 0.5), (vec![-1], 0.4)]).is_err());
        assert!(Kernel::new(1, &[(vec![1, 0], 1.0)]).is_err());
        assert!(Kernel::new(1, &[(vec![1], 0.5), (vec![-1], 0.5 + 1e-13)]).is_ok());
    }

    #[test]
    fn solomon_examples() {
        let (a, b) = solomon_kernels(0.7).unwrap();
        assert_eq!(a.offset(0), &[1]);
        assert_eq!(a.prob(0), 0.7);
        assert_eq!(b.offset(1), &[-1]);
        assert_eq!(b.prob(1), 0.7);
        assert!((kernel_mean(&a)[0] - 0.4).abs() < 1e-15);
        assert!((kernel_mean(&b)[0] + 0.4).abs() < 1e-15);
        assert!(solomon_kernels(0.5).is_err());
        assert!(solomon_kernels(1.0).is_err());
    }

    #[test]
    fn critical_densities() {
        let round6 = |x: f64| (x * 1e6).round() / 1e6;
        let (lo, hi) = solomon_critical_densities(0.7).unwrap();
        assert_eq!((round6(lo), round6(hi)), (0.356675, 1.203973));
        let (lo, hi) = solomon_critical_densities(0.9).unwrap();
        assert_eq!((round6(lo), round6(hi)), (0.105361, 2.302585));
        let (lo, hi) = solomon_critical_densities(0.5 + 1e-6).unwrap();
        let ln2 = std::f64::consts::LN_2;
        assert!((lo - ln2).abs() < 3e-6 && (hi - ln2).abs() < 3e-6);
    }

    proptest! {
        #[test]
        fn solomon_drifts_are_opposite(p in 0.5000001f64..0.9999999) {
            let (a, b) = solomon_kernels(p).unwrap();
            prop_assert_eq!(kernel_mean(&a)[0], -kernel_mean(&b)[0]);
        }

        #[test]
        fn critical_densities_monotone(p in 0.51f64..0.98, dp in 0.001f64..0.01) {
            let (lo1, hi1) = solomon_critical_densities(p).unwrap();
            let (lo2, hi2) = solomon_critical_densities(p + dp).unwrap();
            prop_assert!(lo2 < lo1 && hi2 > hi1 && lo1 < hi1);
        }

        #[test]
        fn mean_in_convex_hull(w in proptest::collection::vec(0.01f64..1.0, 1..6)) {
            let total: f64 = w.iter().sum();
            let entries: Vec<(Vec<i64>, f64)> = w
                .iter()
                .enumerate()
                .map(|(k, x)| (vec![k as i64 * 2 - 3], x / total))
                .collect();
            let k = Kernel::new(1, &entries).unwrap();
            let m = kernel_mean(&k)[0];
            let lo = entries.iter().map(|e| e.0[0]).min().unwrap() as f64;
            let hi = entries.iter().map(|e| e.0[0]).max().unwrap() as f64;
            prop_assert!(m >= lo - 1e-12 && m <= hi + 1e-12);
        }
    }
}
