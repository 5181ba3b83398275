//! Red-particle fields.
//!
//! Two engines share the [`Environment`] trait:
//!
//! * [`ParticleField`] moves every particle on the torus with one aggregated
//!   exponential clock. It supports event logging and trajectory tracking.
//! * [`LocalField`] produces the same law for every observable inside a
//!   caller-supplied focus region but leaves far-away particles dormant,
//!   sampling only how many jumps they make over a time chunk.

mod field;
mod local;
mod log;
mod snapshot;

pub use field::{ParticleField, TrackHandle, DEFAULT_MAX_EVENTS, DEFAULT_PARTICLE_BUDGET};
pub use local::{LocalField, LocalStats};
pub use log::{EventLog, LoggedEvent, TrackLog, Trajectory};
pub use snapshot::{read_snapshots, write_snapshots, FieldSnapshot, SnapshotMeta, SNAPSHOT_SCHEMA};

use crate::error::Result;
use crate::lattice::{SiteIx, Torus};
use crate::model::MAX_DIM;

/// Receives every change of the counted field.
///
/// `on_appear`/`on_vanish` are only emitted by engines that materialize
/// particles lazily; the full-torus engine emits moves only.
pub trait EventSink {
    fn on_move(&mut self, time: f64, particle: u32, from: SiteIx, to: SiteIx);

    fn on_appear(&mut self, _time: f64, _particle: u32, _at: SiteIx) {}

    fn on_vanish(&mut self, _time: f64, _particle: u32, _at: SiteIx) {}
}

impl EventSink for () {
    #[inline]
    fn on_move(&mut self, _: f64, _: u32, _: SiteIx, _: SiteIx) {}
}

impl<S: EventSink + ?Sized> EventSink for &mut S {
    #[inline]
    fn on_move(&mut self, time: f64, particle: u32, from: SiteIx, to: SiteIx) {
        (**self).on_move(time, particle, from, to)
    }

    #[inline]
    fn on_appear(&mut self, time: f64, particle: u32, at: SiteIx) {
        (**self).on_appear(time, particle, at)
    }

    #[inline]
    fn on_vanish(&mut self, time: f64, particle: u32, at: SiteIx) {
        (**self).on_vanish(time, particle, at)
    }
}

impl<A: EventSink, B: EventSink> EventSink for (A, B) {
    #[inline]
    fn on_move(&mut self, time: f64, particle: u32, from: SiteIx, to: SiteIx) {
        self.0.on_move(time, particle, from, to);
        self.1.on_move(time, particle, from, to);
    }

    #[inline]
    fn on_appear(&mut self, time: f64, particle: u32, at: SiteIx) {
        self.0.on_appear(time, particle, at);
        self.1.on_appear(time, particle, at);
    }

    #[inline]
    fn on_vanish(&mut self, time: f64, particle: u32, at: SiteIx) {
        self.0.on_vanish(time, particle, at);
        self.1.on_vanish(time, particle, at);
    }
}

/// Axis-aligned box of sites `[lo_a, hi_a]` in unwrapped coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FocusBox {
    pub lo: [i64; MAX_DIM],
    pub hi: [i64; MAX_DIM],
}

const UNBOUNDED: i64 = i64::MAX / 4;

impl FocusBox {
    pub fn around(center: &[i64], half_width: i64) -> Self {
        let mut lo = [0; MAX_DIM];
        let mut hi = [0; MAX_DIM];
        for (a, &c) in center.iter().enumerate() {
            lo[a] = c - half_width;
            hi[a] = c + half_width;
        }
        FocusBox { lo, hi }
    }

    /// Covers the 1-d interval `[lo, hi]`.
    pub fn interval(lo: i64, hi: i64) -> Self {
        let mut b = FocusBox::around(&[0], 0);
        b.lo[0] = lo;
        b.hi[0] = hi;
        b
    }

    pub fn everything() -> Self {
        FocusBox {
            lo: [-UNBOUNDED; MAX_DIM],
            hi: [UNBOUNDED; MAX_DIM],
        }
    }

    /// Steps in the + and - direction needed to enter the box along axis `a`.
    #[inline]
    pub fn axis_gaps(&self, torus: &Torus, a: usize, c: i64) -> (i64, i64) {
        let (lo, hi) = (self.lo[a], self.hi[a]);
        if lo <= c && c <= hi {
            return (0, 0);
        }
        let side = torus.side();
        if hi - lo + 1 >= side {
            return (0, 0);
        }
        let off = (c - lo).rem_euclid(side);
        if off <= hi - lo {
            return (0, 0);
        }
        (side - off, off - (hi - lo))
    }

    /// Minimal number of unit steps that bring `coords` into the box.
    #[inline]
    pub fn distance(&self, torus: &Torus, coords: &[i64]) -> i64 {
        if let [x] = coords {
            if self.lo[0] <= *x && *x <= self.hi[0] {
                return 0;
            }
            let (r, l) = self.axis_gaps(torus, 0, *x);
            return r.min(l);
        }
        let mut d = 0;
        for (a, &c) in coords.iter().enumerate() {
            let (r, l) = self.axis_gaps(torus, a, c);
            d += r.min(l);
        }
        d
    }
}

/// Region where a consumer will look at the field.
///
/// `bound(now, until)` must contain every site whose count the consumer may
/// read or whose events it needs at any time in `[now, until]`.
pub trait Focus {
    fn bound(&self, now: f64, until: f64) -> FocusBox;
}

/// Focus covering the whole torus.
#[derive(Debug, Clone, Copy, Default)]
pub struct Everywhere;

impl Focus for Everywhere {
    fn bound(&self, _now: f64, _until: f64) -> FocusBox {
        FocusBox::everything()
    }
}

impl Focus for FocusBox {
    fn bound(&self, _now: f64, _until: f64) -> FocusBox {
        *self
    }
}

/// A red-particle field that can be advanced in time and queried.
pub trait Environment {
    fn torus(&self) -> &Torus;

    fn time(&self) -> f64;

    /// Red particles at `site` at the current time.
    ///
    /// Engines with a focus only guarantee exact counts inside the current focus.
    fn count(&self, site: SiteIx) -> u32;

    /// Advances to `t`, reporting every change of the counted field to `sink`.
    fn advance<F: Focus + ?Sized, S: EventSink + ?Sized>(
        &mut self,
        t: f64,
        focus: &F,
        sink: &mut S,
    ) -> Result<()>;

    /// Visits every counted particle as `(id, site)`.
    fn for_each_explicit(&self, f: &mut dyn FnMut(u32, SiteIx));

    /// Number of particle jumps simulated explicitly so far.
    fn event_count(&self) -> u64;

    /// Total number of red particles, counted or not.
    fn particle_count(&self) -> usize;
}
