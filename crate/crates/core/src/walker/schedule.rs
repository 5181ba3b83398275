//! Pre-sampled randomness of the green particle.
//!
//! A jump is drawn through the maximal coupling of p' and p'': with
//! probability `sum_x min(p'(x), p''(x))` the step comes from the normalized
//! common part regardless of the environment ("forced"); otherwise it comes
//! from the residual of whichever kernel applies. Marginally each jump still
//! follows p' or p'' exactly. Forced steps are sampled up front, which bounds
//! where the green particle can be at any future time.

use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::alias::AliasTable;
use crate::model::{KernelRule, ModelConfig, MAX_DIM};
use crate::rng::{rng_for, SimRng, Stream};

const NOT_FORCED: u32 = u32::MAX;

#[derive(Debug, Clone)]
pub struct StepCoupling {
    dim: usize,
    offsets: Vec<i64>,
    forced_prob: f64,
    common: Option<AliasTable>,
    resid_occupied: Option<AliasTable>,
    resid_vacant: Option<AliasTable>,
    free_range: i64,
}

impl StepCoupling {
    pub fn new(config: &ModelConfig) -> Self {
        Self::build(config, config.kernel_rule == KernelRule::Departure)
    }

    /// Coupling in which no step is forced.
    pub fn all_free(config: &ModelConfig) -> Self {
        Self::build(config, false)
    }

    fn build(config: &ModelConfig, allow_forced: bool) -> Self {
        let d = config.dim;
        let (p1, p2) = (&config.kernel_occupied, &config.kernel_vacant);
        let mut offsets: Vec<i64> = Vec::new();
        let mut w1 = Vec::new();
        let mut w2 = Vec::new();
        for k in 0..p1.len() {
            offsets.extend_from_slice(p1.offset(k));
            w1.push(p1.prob(k));
            w2.push(0.0);
        }
        for k in 0..p2.len() {
            let off = p2.offset(k);
            match (0..w1.len()).find(|&i| &offsets[i * d..(i + 1) * d] == off) {
                Some(i) => w2[i] = p2.prob(k),
                None => {
                    offsets.extend_from_slice(off);
                    w1.push(0.0);
                    w2.push(p2.prob(k));
                }
            }
        }
        let n = w1.len();
        let common: Vec<f64> = (0..n).map(|i| w1[i].min(w2[i])).collect();
        let mut forced_prob: f64 = common.iter().sum();
        if !allow_forced {
            forced_prob = 0.0;
        }
        if forced_prob > 1.0 - 1e-14 {
            forced_prob = 1.0;
        }
        let normalize = |w: Vec<f64>| -> Option<AliasTable> {
            let s: f64 = w.iter().sum();
            if s <= 1e-14 {
                return None;
            }
            Some(AliasTable::new(&w.iter().map(|x| x / s).collect::<Vec<_>>()))
        };
        let (resid_occupied, resid_vacant) = if forced_prob == 0.0 {
            (normalize(w1.clone()), normalize(w2.clone()))
        } else {
            (
                normalize((0..n).map(|i| (w1[i] - common[i]).max(0.0)).collect()),
                normalize((0..n).map(|i| (w2[i] - common[i]).max(0.0)).collect()),
            )
        };
        let mut free_range = 0;
        for i in 0..n {
            let residual = forced_prob == 0.0 || w1[i] > common[i] || w2[i] > common[i];
            if residual {
                let r = offsets[i * d..(i + 1) * d].iter().map(|c| c.abs()).max().unwrap_or(0);
                free_range = free_range.max(r);
            }
        }
        StepCoupling {
            dim: d,
            offsets,
            forced_prob,
            common: if forced_prob > 0.0 { normalize(common) } else { None },
            resid_occupied,
            resid_vacant,
            free_range,
        }
    }

    pub fn forced_probability(&self) -> f64 {
        self.forced_prob
    }

    /// Largest per-axis displacement of a non-forced step.
    pub fn free_range(&self) -> i64 {
        self.free_range
    }

    pub fn offset(&self, k: usize) -> &[i64] {
        &self.offsets[k * self.dim..(k + 1) * self.dim]
    }

    fn draw_forced<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        if self.forced_prob > 0.0 && (self.forced_prob >= 1.0 || rng.random::<f64>() < self.forced_prob) {
            self.common.as_ref().expect("common part").sample(rng) as u32
        } else {
            NOT_FORCED
        }
    }

    /// Residual draw for a non-forced jump.
    pub fn draw_free<R: Rng + ?Sized>(&self, occupied: bool, rng: &mut R) -> &[i64] {
        let table = if occupied {
            &self.resid_occupied
        } else {
            &self.resid_vacant
        };
        self.offset(table.as_ref().expect("residual kernel").sample(rng))
    }
}

/// Range minimum and maximum over a fixed array.
#[derive(Debug, Clone)]
struct MinMaxTree {
    size: usize,
    min: Vec<i64>,
    max: Vec<i64>,
}

impl MinMaxTree {
    fn new(values: &[i64]) -> Self {
        let size = values.len().max(1);
        let mut min = vec![i64::MAX; 2 * size];
        let mut max = vec![i64::MIN; 2 * size];
        min[size..size + values.len()].copy_from_slice(values);
        max[size..size + values.len()].copy_from_slice(values);
        for i in (1..size).rev() {
            min[i] = min[2 * i].min(min[2 * i + 1]);
            max[i] = max[2 * i].max(max[2 * i + 1]);
        }
        MinMaxTree { size, min, max }
    }

    /// Min and max over indices `[l, r]`.
    fn query(&self, l: usize, r: usize) -> (i64, i64) {
        let (mut lo, mut hi) = (i64::MAX, i64::MIN);
        let (mut l, mut r) = (l + self.size, r + self.size + 1);
        while l < r {
            if l & 1 == 1 {
                lo = lo.min(self.min[l]);
                hi = hi.max(self.max[l]);
                l += 1;
            }
            if r & 1 == 1 {
                r -= 1;
                lo = lo.min(self.min[r]);
                hi = hi.max(self.max[r]);
            }
            l >>= 1;
            r >>= 1;
        }
        (lo, hi)
    }
}

/// Jump times and forced steps of one green trajectory, sampled before the run.
#[derive(Debug, Clone)]
pub struct GreenSchedule {
    times: Vec<f64>,
    horizon: f64,
    dim: usize,
    coupling: StepCoupling,
    forced: Vec<u32>,
    free_before: Vec<u32>,
    disp: Vec<Vec<i64>>,
    trees: Vec<MinMaxTree>,
}

impl GreenSchedule {
    /// Samples jump times on `(0, horizon]` and the forced steps from `seed`.
    pub fn sample(config: &ModelConfig, horizon: f64, seed: u64) -> Self {
        let mut rng: SimRng = rng_for(seed, Stream::GreenClock);
        let rate = config.green_rate;
        let coupling = StepCoupling::new(config);
        let mut times = Vec::with_capacity((rate * horizon * 1.05) as usize + 16);
        let mut forced = Vec::with_capacity(times.capacity());
        let mut s = 0.0;
        loop {
            let e: f64 = Exp1.sample(&mut rng);
            s += e / rate;
            if s > horizon {
                break;
            }
            times.push(s);
            forced.push(coupling.draw_forced(&mut rng));
        }
        Self::assemble(times, forced, horizon, config.dim, coupling)
    }

    /// A schedule with given jump times and no forced steps.
    pub fn from_times(config: &ModelConfig, times: Vec<f64>, horizon: f64) -> Self {
        let forced = vec![NOT_FORCED; times.len()];
        Self::assemble(times, forced, horizon, config.dim, StepCoupling::all_free(config))
    }

    fn assemble(
        times: Vec<f64>,
        forced: Vec<u32>,
        horizon: f64,
        dim: usize,
        coupling: StepCoupling,
    ) -> Self {
        let n = times.len();
        let mut free_before = Vec::with_capacity(n + 1);
        free_before.push(0u32);
        let mut disp = vec![Vec::with_capacity(n + 1); dim];
        for axis in disp.iter_mut() {
            axis.push(0);
        }
        for &f in &forced {
            let free = free_before.last().copied().unwrap_or(0) + u32::from(f == NOT_FORCED);
            free_before.push(free);
            for (a, axis) in disp.iter_mut().enumerate() {
                let step = if f == NOT_FORCED {
                    0
                } else {
                    coupling.offset(f as usize)[a]
                };
                let last = *axis.last().expect("nonempty prefix");
                axis.push(last + step);
            }
        }
        let trees = disp.iter().map(|v| MinMaxTree::new(v)).collect();
        GreenSchedule {
            times,
            horizon,
            dim,
            coupling,
            forced,
            free_before,
            disp,
            trees,
        }
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn coupling(&self) -> &StepCoupling {
        &self.coupling
    }

    /// Forced step of jump `k`, if any.
    pub fn forced_step(&self, k: usize) -> Option<&[i64]> {
        match self.forced[k] {
            NOT_FORCED => None,
            f => Some(self.coupling.offset(f as usize)),
        }
    }

    /// Number of jumps with time `<= u`.
    #[inline]
    pub fn jumps_through(&self, u: f64) -> usize {
        self.times.partition_point(|&s| s <= u)
    }

    /// Per-axis offsets bounding every position after `j` jumps, `k0 <= j <= k1`,
    /// relative to the position after `k0` jumps.
    #[inline]
    pub fn envelope(&self, k0: usize, k1: usize, lo: &mut [i64; MAX_DIM], hi: &mut [i64; MAX_DIM]) {
        let k1 = k1.max(k0);
        let free = (self.free_before[k1] - self.free_before[k0]) as i64 * self.coupling.free_range;
        for a in 0..self.dim {
            let base = self.disp[a][k0];
            let (mn, mx) = self.trees[a].query(k0, k1);
            lo[a] = mn - base - free;
            hi[a] = mx - base + free;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solomon_coupling_masses() {
        let cfg = ModelConfig::solomon(0.7, 1.0).unwrap();
        let c = StepCoupling::new(&cfg);
        assert!((c.forced_probability() - 0.6).abs() < 1e-12);
        assert_eq!(c.free_range(), 1);
        let mut rng = crate::rng::rng_from_seed(4);
        for _ in 0..100 {
            assert_eq!(c.draw_free(true, &mut rng), &[1]);
            assert_eq!(c.draw_free(false, &mut rng), &[-1]);
        }
    }

    #[test]
    fn equal_kernels_are_always_forced() {
        let (a, _) = crate::model::solomon_kernels(0.7).unwrap();
        let cfg = ModelConfig::new(a.clone(), a, 2.0).unwrap();
        let c = StepCoupling::new(&cfg);
        assert_eq!(c.forced_probability(), 1.0);
    }

    #[test]
    fn envelope_contains_forced_path() {
        let cfg = ModelConfig::solomon(0.8, 1.0).unwrap();
        let s = GreenSchedule::sample(&cfg, 500.0, 9);
        let (mut lo, mut hi) = ([0; MAX_DIM], [0; MAX_DIM]);
        s.envelope(10, 200, &mut lo, &mut hi);
        let mut pos = 0i64;
        let mut free = 0i64;
        for k in 10..200 {
            match s.forced_step(k) {
                Some(st) => pos += st[0],
                None => free += 1,
            }
            assert!(pos - free >= lo[0] && pos + free <= hi[0]);
        }
    }

    #[test]
    fn tree_query_matches_scan() {
        let v: Vec<i64> = (0..97).map(|i| ((i * 37) % 23) as i64 - 11).collect();
        let t = MinMaxTree::new(&v);
        for l in 0..v.len() {
            for r in l..v.len() {
                let mn = *v[l..=r].iter().min().unwrap();
                let mx = *v[l..=r].iter().max().unwrap();
                assert_eq!(t.query(l, r), (mn, mx));
            }
        }
    }
}
