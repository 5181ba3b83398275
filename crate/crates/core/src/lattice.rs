//! Torus geometry and site-count storage.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::model::MAX_DIM;

/// Linear site index on the torus.
pub type SiteIx = u64;

/// Volumes up to this size use a dense count array.
pub const DENSE_LIMIT: u64 = 1 << 24;

/// The torus {-L, ..., L}^d.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Torus {
    dim: usize,
    radius: i64,
    side: i64,
    volume: u64,
}

impl Torus {
    pub fn new(dim: usize, radius: i64) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::InvalidParameter(format!("dimension {dim} unsupported")));
        }
        if radius < 1 {
            return Err(Error::InvalidParameter(format!(
                "box radius L = {radius} must be at least 1"
            )));
        }
        let side = 2 * radius + 1;
        let volume = (side as u64)
            .checked_pow(dim as u32)
            .filter(|v| *v < (1u64 << 62))
            .ok_or_else(|| Error::Budget(format!("torus of side {side} in d={dim} too large")))?;
        Ok(Torus {
            dim,
            radius,
            side,
            volume,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn radius(&self) -> i64 {
        self.radius
    }

    pub fn side(&self) -> i64 {
        self.side
    }

    pub fn volume(&self) -> u64 {
        self.volume
    }

    /// Reduces a coordinate into {-L, ..., L}.
    #[inline]
    pub fn wrap(&self, c: i64) -> i64 {
        if -self.radius <= c && c <= self.radius {
            return c;
        }
        (c + self.radius).rem_euclid(self.side) - self.radius
    }

    /// `wrap(c + delta)` for `c` already reduced and `|delta| <= 1`.
    #[inline]
    pub fn step_wrap(&self, c: i64, delta: i64) -> i64 {
        let n = c + delta;
        if n > self.radius {
            n - self.side
        } else if n < -self.radius {
            n + self.side
        } else {
            n
        }
    }

    /// Shortest distance between two coordinates along one axis.
    #[inline]
    pub fn axis_distance(&self, a: i64, b: i64) -> i64 {
        let d = (a - b).rem_euclid(self.side);
        d.min(self.side - d)
    }

    #[inline]
    pub fn index(&self, coords: &[i64]) -> SiteIx {
        debug_assert_eq!(coords.len(), self.dim);
        let mut ix: u64 = 0;
        for &c in coords.iter().rev() {
            ix = ix * self.side as u64 + (self.wrap(c) + self.radius) as u64;
        }
        ix
    }

    /// Index of a 1-d site.
    #[inline]
    pub fn index1(&self, x: i64) -> SiteIx {
        (self.wrap(x) + self.radius) as u64
    }

    pub fn coords(&self, mut ix: SiteIx, out: &mut [i64]) {
        for c in out.iter_mut().take(self.dim) {
            *c = (ix % self.side as u64) as i64 - self.radius;
            ix /= self.side as u64;
        }
    }

    pub fn coords_vec(&self, ix: SiteIx) -> Vec<i64> {
        let mut v = vec![0; self.dim];
        self.coords(ix, &mut v);
        v
    }

    /// First coordinate of a site, the only one in d=1.
    #[inline]
    pub fn x_of(&self, ix: SiteIx) -> i64 {
        if self.dim == 1 {
            return ix as i64 - self.radius;
        }
        (ix % self.side as u64) as i64 - self.radius
    }
}

/// Exact site tallies, dense for small tori and hashed otherwise.
#[derive(Debug, Clone)]
pub enum CountStore {
    Dense(Vec<u32>),
    Sparse(HashMap<SiteIx, u32>),
}

impl CountStore {
    pub fn for_torus(torus: &Torus) -> Self {
        if torus.volume() <= DENSE_LIMIT {
            CountStore::Dense(vec![0; torus.volume() as usize])
        } else {
            CountStore::Sparse(HashMap::new())
        }
    }

    #[inline]
    pub fn get(&self, ix: SiteIx) -> u32 {
        match self {
            CountStore::Dense(v) => v[ix as usize],
            CountStore::Sparse(m) => m.get(&ix).copied().unwrap_or(0),
        }
    }

    #[inline]
    pub fn inc(&mut self, ix: SiteIx) {
        match self {
            CountStore::Dense(v) => v[ix as usize] += 1,
            CountStore::Sparse(m) => *m.entry(ix).or_insert(0) += 1,
        }
    }

    #[inline]
    pub fn dec(&mut self, ix: SiteIx) {
        match self {
            CountStore::Dense(v) => v[ix as usize] -= 1,
            CountStore::Sparse(m) => {
                let e = m.get_mut(&ix).expect("decrement of an empty site");
                *e -= 1;
                if *e == 0 {
                    m.remove(&ix);
                }
            }
        }
    }

    pub fn total(&self) -> u64 {
        match self {
            CountStore::Dense(v) => v.iter().map(|&c| c as u64).sum(),
            CountStore::Sparse(m) => m.values().map(|&c| c as u64).sum(),
        }
    }
}

/// Axis-aligned box of sites, inclusive bounds in unwrapped coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SiteRange {
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
}

impl SiteRange {
    pub fn interval(lo: i64, hi: i64) -> Self {
        SiteRange {
            lo: vec![lo],
            hi: vec![hi],
        }
    }

    pub fn full(torus: &Torus) -> Self {
        SiteRange {
            lo: vec![-torus.radius(); torus.dim()],
            hi: vec![torus.radius(); torus.dim()],
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lo.iter().zip(&self.hi).any(|(a, b)| a > b)
    }

    pub fn len(&self) -> u64 {
        if self.is_empty() {
            return 0;
        }
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(a, b)| (b - a + 1) as u64)
            .product()
    }

    pub fn contains(&self, coords: &[i64]) -> bool {
        coords
            .iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(c, (a, b))| a <= c && c <= b)
    }

    /// Checks that the range lies inside the torus without wrapping onto itself.
    pub fn check_within(&self, torus: &Torus) -> Result<()> {
        if self.dim() != torus.dim() || self.hi.len() != torus.dim() {
            return Err(Error::OutOfRange("window dimension mismatch".into()));
        }
        for (a, b) in self.lo.iter().zip(&self.hi) {
            if *a < -torus.radius() || *b > torus.radius() {
                return Err(Error::OutOfRange(format!(
                    "window [{a}, {b}] exceeds torus [-{L}, {L}]",
                    L = torus.radius()
                )));
            }
        }
        Ok(())
    }

    /// Row-major iteration, first axis fastest.
    pub fn for_each(&self, mut f: impl FnMut(&[i64])) {
        if self.is_empty() {
            return;
        }
        let mut cur = self.lo.clone();
        loop {
            f(&cur);
            let mut a = 0;
            loop {
                if a == cur.len() {
                    return;
                }
                if cur[a] < self.hi[a] {
                    cur[a] += 1;
                    break;
                }
                cur[a] = self.lo[a];
                a += 1;
            }
        }
    }
}
