//! r-blocks in d = 1.
//!
//! With side `D = C_0^{6r}` and window `q = C_0^r`:
//!
//! ```text
//! B(i,j)      = [iD, (i+1)D) x [jD, (j+1)D)
//! V(i)        = [(i-3)D, (i+4)D)                 (7 block columns)
//! enlarged    = V(i) x [(j-1)D, (j+1)D)
//! pedestal    = V(i) x {(j-1)D}
//! Q(x)        = [x, x+q)
//! ```

use serde::{Deserialize, Serialize};

/// Half-open space-time rectangle `[x0, x1) x [t0, t1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x0: i64,
    pub x1: i64,
    pub t0: f64,
    pub t1: f64,
}

impl Rect {
    pub fn contains(&self, x: i64, t: f64) -> bool {
        self.x0 <= x && x < self.x1 && self.t0 <= t && t < self.t1
    }

    pub fn contains_rect(&self, o: &Rect) -> bool {
        self.x0 <= o.x0 && o.x1 <= self.x1 && self.t0 <= o.t0 && o.t1 <= self.t1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockGeometry {
    pub delta: i64,
    pub window: i64,
}

impl BlockGeometry {
    pub fn new(delta: i64, window: i64) -> Self {
        assert!(delta >= 1 && window >= 1, "block side and window must be positive");
        BlockGeometry { delta, window }
    }

    #[inline]
    pub fn column_of(&self, x: i64) -> i64 {
        x.div_euclid(self.delta)
    }

    #[inline]
    pub fn layer_of(&self, t: f64) -> i64 {
        (t / self.delta as f64).floor() as i64
    }

    pub fn block(&self, i: i64, j: i64) -> Rect {
        let d = self.delta;
        Rect {
            x0: i * d,
            x1: (i + 1) * d,
            t0: (j * d) as f64,
            t1: ((j + 1) * d) as f64,
        }
    }

    /// `V(i)` as a half-open interval.
    pub fn v_interval(&self, i: i64) -> (i64, i64) {
        ((i - 3) * self.delta, (i + 4) * self.delta)
    }

    pub fn enlarged(&self, i: i64, j: i64) -> Rect {
        let (x0, x1) = self.v_interval(i);
        Rect {
            x0,
            x1,
            t0: ((j - 1) * self.delta) as f64,
            t1: ((j + 1) * self.delta) as f64,
        }
    }

    /// Sites and time of the pedestal, the bottom edge of the enlarged block.
    pub fn pedestal(&self, i: i64, j: i64) -> ((i64, i64), f64) {
        (self.v_interval(i), ((j - 1) * self.delta) as f64)
    }

    pub fn q_interval(&self, x: i64) -> (i64, i64) {
        (x, x + self.window)
    }

    /// Window starts `x` with `Q(x)` inside `V(i)`.
    pub fn window_starts(&self, i: i64) -> std::ops::RangeInclusive<i64> {
        let (x0, x1) = self.v_interval(i);
        x0..=(x1 - self.window)
    }
}

/// A rectangular set of blocks: columns `i_lo..=i_hi`, layers `0..layers`.
///
/// Block times are measured from `origin`, the field time at which the green
/// particle starts. The default origin is one block side, so that layer 0 has
/// a pedestal inside the simulated span.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockGrid {
    pub geometry: BlockGeometry,
    pub horizon: f64,
    pub i_lo: i64,
    pub i_hi: i64,
    pub layers: i64,
    pub origin: f64,
}

impl BlockGrid {
    /// Blocks covering `[-t log t, t log t] x [0, t)`.
    pub fn for_horizon(geometry: BlockGeometry, t: f64) -> Self {
        let reach = spatial_bound(t);
        BlockGrid {
            geometry,
            horizon: t,
            i_lo: geometry.column_of(-reach),
            i_hi: geometry.column_of(reach),
            layers: layers_for(geometry, t),
            origin: geometry.delta as f64,
        }
    }

    pub fn new(geometry: BlockGeometry, horizon: f64, i_lo: i64, i_hi: i64) -> Self {
        BlockGrid {
            geometry,
            horizon,
            i_lo,
            i_hi,
            layers: layers_for(geometry, horizon),
            origin: geometry.delta as f64,
        }
    }

    pub fn with_origin(mut self, origin: f64) -> Self {
        self.origin = origin;
        self
    }

    /// Field time span needed to classify every block of the grid.
    pub fn field_span(&self) -> (f64, f64) {
        let d = self.geometry.delta as f64;
        (self.origin - d, self.origin + self.layers as f64 * d)
    }

    pub fn columns(&self) -> i64 {
        self.i_hi - self.i_lo + 1
    }

    pub fn contains(&self, i: i64, j: i64) -> bool {
        (self.i_lo..=self.i_hi).contains(&i) && (0..self.layers).contains(&j)
    }

    pub fn blocks(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        (0..self.layers).flat_map(move |j| (self.i_lo..=self.i_hi).map(move |i| (i, j)))
    }
}

/// Number of layers meeting `[0, t)`.
pub fn layers_for(geometry: BlockGeometry, t: f64) -> i64 {
    (t / geometry.delta as f64).ceil() as i64
}

/// Spatial reach `floor(t log t)` of the path class (at least 1).
pub fn spatial_bound(t: f64) -> i64 {
    if t <= 1.0 {
        return 1;
    }
    ((t * t.ln()).floor() as i64).max(1)
}

/// Paths with at most `ell` nearest-neighbour jumps on `[0, t]` inside the spatial bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathClass {
    pub ell: usize,
    pub t: f64,
    pub bound: i64,
}

impl PathClass {
    pub fn new(ell: usize, t: f64) -> Self {
        PathClass {
            ell,
            t,
            bound: spatial_bound(t),
        }
    }

    pub fn contains(&self, path: &crate::walker::GreenPath) -> bool {
        if path.dim != 1 || path.jumps() > self.ell || path.horizon > self.t {
            return false;
        }
        let mut prev_t = 0.0;
        let mut prev_x = 0i64;
        for k in 0..path.jumps() {
            let s = path.jump_times[k];
            let x = path.positions[k];
            if !(s > prev_t || (k == 0 && s > 0.0)) || s > self.t {
                return false;
            }
            if (x - prev_x).abs() != 1 || x.abs() > self.bound {
                return false;
            }
            prev_t = s;
            prev_x = x;
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn block_inside_enlarged(i in -1000i64..1000, j in -1000i64..1000, r in 0u32..3) {
            let c0: i64 = 2;
            let g = BlockGeometry::new(c0.pow(6 * r), c0.pow(r));
            let b = g.block(i, j);
            let e = g.enlarged(i, j);
            prop_assert!(e.contains_rect(&b));
            let (v0, v1) = g.v_interval(i);
            prop_assert_eq!(v1 - v0, 7 * g.delta);
            let ((p0, p1), pt) = g.pedestal(i, j);
            prop_assert_eq!((p0, p1), (e.x0, e.x1));
            prop_assert_eq!(pt, e.t0);
        }
    }

    #[test]
    fn window_starts_fit() {
        let g = BlockGeometry::new(64, 2);
        let w = g.window_starts(0);
        assert_eq!(*w.start(), -192);
        assert_eq!(*w.end() + 2, 256);
    }
}
