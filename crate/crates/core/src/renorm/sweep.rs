//! Event sweep shared by the batch classifier and the streaming tracker.
//!
//! The sweep mirrors the counted field on a 1-d torus. For the current layer
//! it keeps, for every window start in a range, the running minimum of the
//! window count and the time it was first attained. Each particle carries the
//! block column it occupied at the last two layer boundaries; occupancy of a
//! block in layer `j` counts only particles whose column at `(j-1)D` lies within
//! three columns of the site.

use super::geometry::BlockGeometry;
use crate::environment::EventSink;
use crate::error::{Error, Result};
use crate::lattice::{SiteIx, Torus};

const NO_TAG: i32 = i32::MIN;
const NO_SITE: u32 = u32::MAX;

/// Site and the columns it occupied at the last two layer boundaries.
#[derive(Debug, Clone, Copy)]
struct Particle {
    site: u32,
    tag_cur: i32,
    tag_next: i32,
}

const ABSENT: Particle = Particle {
    site: NO_SITE,
    tag_cur: NO_TAG,
    tag_next: NO_TAG,
};

/// Sites tracked during one layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LayerRange {
    /// Window starts `win_lo..=win_hi`.
    pub win_lo: i64,
    pub win_hi: i64,
    /// Sites `cov_lo..=cov_hi` whose coverage is tracked.
    pub cov_lo: i64,
    pub cov_hi: i64,
}

#[derive(Debug, Clone, Copy)]
struct WindowState {
    u: u32,
    min: u32,
    at: f64,
}

#[derive(Debug, Clone)]
struct LayerMinima {
    layer: i64,
    win_lo: i64,
    w: Vec<WindowState>,
}

impl LayerMinima {
    fn lookup(&self, x: i64) -> Option<(u32, f64)> {
        let k = x - self.win_lo;
        if k < 0 || k as usize >= self.w.len() {
            return None;
        }
        let w = &self.w[k as usize];
        Some((w.min, w.at))
    }

    #[inline]
    fn dec(&mut self, x: i64, tau: f64) {
        let k = x.wrapping_sub(self.win_lo) as u64;
        if let Some(w) = self.w.get_mut(k as usize) {
            w.u -= 1;
            if w.u < w.min {
                w.min = w.u;
                w.at = tau;
            }
        }
    }

    #[inline]
    fn inc(&mut self, x: i64) {
        let k = x.wrapping_sub(self.win_lo) as u64;
        if let Some(w) = self.w.get_mut(k as usize) {
            w.u += 1;
        }
    }
}

#[derive(Debug, Clone)]
struct LayerCoverage {
    lo: i64,
    cstar: Vec<u32>,
    gap: Vec<f64>,
}

/// Label of one block with its witnesses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockRecord {
    pub i: i64,
    pub j: i64,
    pub bad: bool,
    pub occupied: bool,
    /// Smallest window count over the enlarged block.
    pub min_u: u32,
    /// Window start and time attaining `min_u`.
    pub min_at: (i64, f64),
    /// A site and time of the block not covered by pedestal particles.
    pub gap: Option<(i64, f64)>,
}

impl BlockRecord {
    /// Witness reported in dumps: the deficient window for bad blocks, else the gap.
    pub fn witness(&self) -> Option<(i64, f64)> {
        if self.bad {
            Some(self.min_at)
        } else {
            self.gap
        }
    }
}

#[derive(Debug, Clone)]
pub struct BlockSweep {
    torus: Torus,
    geometry: BlockGeometry,
    threshold: f64,
    origin: f64,
    counts: Vec<u32>,
    /// Block column of each site.
    col: Vec<i32>,
    particles: Vec<Particle>,
    prev: Option<LayerMinima>,
    cur: Option<LayerMinima>,
    cov: Option<LayerCoverage>,
}

impl BlockSweep {
    /// Empty sweep on a 1-d torus; bad means a window count `< threshold`.
    pub fn new(torus: &Torus, geometry: BlockGeometry, threshold: f64, origin: f64) -> Result<Self> {
        if torus.dim() != 1 {
            return Err(Error::InvalidParameter(
                "block analysis is implemented in one dimension".into(),
            ));
        }
        let col = (0..torus.volume())
            .map(|ix| geometry.column_of(torus.x_of(ix)) as i32)
            .collect();
        Ok(BlockSweep {
            torus: torus.clone(),
            geometry,
            threshold,
            origin,
            counts: vec![0; torus.volume() as usize],
            col,
            particles: Vec::new(),
            prev: None,
            cur: None,
            cov: None,
        })
    }

    #[inline]
    fn slot(&mut self, p: u32) -> &mut Particle {
        let k = p as usize;
        if k >= self.particles.len() {
            self.particles.resize(k + 1, ABSENT);
        }
        &mut self.particles[k]
    }

    /// Sizes the per-particle table for ids below `n`.
    pub fn reserve(&mut self, n: usize) {
        if self.particles.len() < n {
            self.particles.resize(n, ABSENT);
        }
    }

    /// Registers a particle present before the first layer starts.
    pub fn place(&mut self, particle: u32, site: SiteIx) {
        self.slot(particle).site = site as u32;
        self.counts[site as usize] += 1;
    }

    pub fn count(&self, site: SiteIx) -> u32 {
        self.counts[site as usize]
    }

    pub fn current_layer(&self) -> Option<i64> {
        self.cur.as_ref().map(|c| c.layer)
    }

    fn check_range(&self, lo: i64, hi: i64) -> Result<()> {
        let r = self.torus.radius();
        if lo < -r || hi > r {
            return Err(Error::OutOfRange(format!(
                "tracked sites [{lo}, {hi}] leave the torus [-{r}, {r}]"
            )));
        }
        Ok(())
    }

    /// Starts layer `layer` at field time `origin + layer * D`.
    ///
    /// The previous layer's minima are kept for classifying its successor.
    pub fn start_layer(&mut self, layer: i64, range: LayerRange) -> Result<()> {
        let q = self.geometry.window;
        self.check_range(range.win_lo, range.win_hi + q - 1)?;
        self.check_range(range.cov_lo, range.cov_hi)?;
        let tau = (layer * self.geometry.delta) as f64;
        let n = (range.win_hi - range.win_lo + 1).max(0) as usize;
        let mut w = Vec::with_capacity(n);
        for k in 0..n as i64 {
            let x = range.win_lo + k;
            let u: u32 = (x..x + q).map(|y| self.counts[self.torus.index1(y) as usize]).sum();
            w.push(WindowState { u, min: u, at: tau });
        }
        let mins = LayerMinima {
            layer,
            win_lo: range.win_lo,
            w,
        };
        self.prev = self.cur.replace(mins);

        let m = (range.cov_hi - range.cov_lo + 1).max(0) as usize;
        let mut cstar = vec![0u32; m];
        for pt in self.particles.iter_mut() {
            pt.tag_cur = pt.tag_next;
            if pt.site == NO_SITE {
                pt.tag_next = NO_TAG;
                continue;
            }
            let c = self.col[pt.site as usize];
            pt.tag_next = c;
            if pt.tag_cur == NO_TAG || (c - pt.tag_cur).abs() > 3 {
                continue;
            }
            let k = self.torus.x_of(pt.site as SiteIx) - range.cov_lo;
            if k >= 0 && (k as usize) < m {
                cstar[k as usize] += 1;
            }
        }
        let gap = cstar
            .iter()
            .map(|&c| if c == 0 { tau } else { f64::INFINITY })
            .collect();
        self.cov = Some(LayerCoverage {
            lo: range.cov_lo,
            cstar,
            gap,
        });
        Ok(())
    }

    /// Labels blocks `(i, j)` of the current layer `j` for the given columns.
    pub fn classify_current(&self, columns: std::ops::RangeInclusive<i64>) -> Result<Vec<BlockRecord>> {
        let cur = self.cur.as_ref().ok_or_else(|| Error::InvalidParameter("no layer started".into()))?;
        let j = cur.layer;
        let prev = self
            .prev
            .as_ref()
            .filter(|p| p.layer == j - 1)
            .ok_or_else(|| Error::IncompleteLog {
                from: self.origin + ((j - 1) * self.geometry.delta) as f64,
                to: self.origin + (j * self.geometry.delta) as f64,
            })?;
        let cov = self.cov.as_ref().expect("coverage exists with a layer");
        let d = self.geometry.delta;
        let mut out = Vec::new();
        for i in columns {
            let mut best = (u32::MAX, (0i64, 0.0f64));
            for x in self.geometry.window_starts(i) {
                for layer in [prev, cur] {
                    let (m, at) = layer.lookup(x).ok_or_else(|| {
                        Error::OutOfRange(format!("window {x} of block ({i}, {j}) was not tracked"))
                    })?;
                    if m < best.0 || (m == best.0 && at < best.1.1) {
                        best = (m, (x, at));
                    }
                }
            }
            let mut gap: Option<(i64, f64)> = None;
            for x in i * d..(i + 1) * d {
                let k = x - cov.lo;
                if k < 0 || k as usize >= cov.gap.len() {
                    return Err(Error::OutOfRange(format!(
                        "site {x} of block ({i}, {j}) has no coverage record"
                    )));
                }
                let g = cov.gap[k as usize];
                if g.is_finite() && gap.is_none_or(|(_, t)| g < t) {
                    gap = Some((x, g));
                }
            }
            out.push(BlockRecord {
                i,
                j,
                bad: (best.0 as f64) < self.threshold,
                occupied: gap.is_none(),
                min_u: best.0,
                min_at: best.1,
                gap,
            });
        }
        Ok(out)
    }

    #[inline]
    fn tau(&self, time: f64) -> f64 {
        time - self.origin
    }

    /// Adds `delta` to every window containing `x`.
    #[inline]
    fn window_delta(&mut self, time: f64, x: i64, delta: i32) {
        let tau = self.tau(time);
        let q = self.geometry.window;
        let Some(cur) = self.cur.as_mut() else { return };
        for w in x - q + 1..=x {
            if delta < 0 {
                cur.dec(w, tau);
            } else {
                cur.inc(w);
            }
        }
    }

    /// Window update for a particle moving from `xf` to `xt`.
    #[inline]
    fn window_move(&mut self, time: f64, xf: i64, xt: i64) {
        let q = self.geometry.window;
        if (xt - xf).abs() != 1 {
            self.window_delta(time, xt, 1);
            self.window_delta(time, xf, -1);
            return;
        }
        let tau = self.tau(time);
        let Some(cur) = self.cur.as_mut() else { return };
        // Exactly one window gains the particle and one loses it.
        if xt > xf {
            cur.inc(xt);
            cur.dec(xf - q + 1, tau);
        } else {
            cur.inc(xt - q + 1);
            cur.dec(xf, tau);
        }
    }

    #[inline]
    fn cover_delta(&mut self, time: f64, tag: i32, site: SiteIx, x: i64, delta: i32) {
        if tag == NO_TAG || (self.col[site as usize] - tag).abs() > 3 {
            return;
        }
        let tau = self.tau(time);
        let Some(cov) = self.cov.as_mut() else { return };
        let k = x - cov.lo;
        if k < 0 || k as usize >= cov.cstar.len() {
            return;
        }
        let k = k as usize;
        if delta < 0 {
            cov.cstar[k] -= 1;
            if cov.cstar[k] == 0 && cov.gap[k].is_infinite() {
                cov.gap[k] = tau;
            }
        } else {
            cov.cstar[k] += 1;
        }
    }
}

impl EventSink for BlockSweep {
    #[inline]
    fn on_move(&mut self, time: f64, particle: u32, from: SiteIx, to: SiteIx) {
        let pt = self.slot(particle);
        pt.site = to as u32;
        let tag = pt.tag_cur;
        self.counts[from as usize] -= 1;
        self.counts[to as usize] += 1;
        let xf = self.torus.x_of(from);
        let xt = self.torus.x_of(to);
        self.window_move(time, xf, xt);
        self.cover_delta(time, tag, to, xt, 1);
        self.cover_delta(time, tag, from, xf, -1);
    }

    #[inline]
    fn on_appear(&mut self, time: f64, particle: u32, at: SiteIx) {
        let pt = self.slot(particle);
        pt.site = at as u32;
        let tag = pt.tag_cur;
        self.counts[at as usize] += 1;
        let x = self.torus.x_of(at);
        self.window_delta(time, x, 1);
        self.cover_delta(time, tag, at, x, 1);
    }

    #[inline]
    fn on_vanish(&mut self, time: f64, particle: u32, at: SiteIx) {
        let pt = self.slot(particle);
        pt.site = NO_SITE;
        let tag = pt.tag_cur;
        self.counts[at as usize] -= 1;
        let x = self.torus.x_of(at);
        self.window_delta(time, x, -1);
        self.cover_delta(time, tag, at, x, -1);
    }
}
