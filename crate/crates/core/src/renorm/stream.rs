//! Block classification along a green trajectory, computed during the run.
//!
//! The field starts one block side before the green particle, so layer 0
//! has a pedestal. Layer `k` tracks window minima over every `V(i)` that
//! blocks of layers `k` and `k + 1` near the path can need. The green
//! schedule's envelope bounds the path ahead of time, so that range is known
//! when the layer starts.

use super::classify::BlockClassification;
use super::geometry::{layers_for, BlockGeometry};
use super::params::RenormParams;
use super::sweep::{BlockSweep, LayerRange};
use crate::environment::{Environment, Focus, FocusBox, LocalField};
use crate::error::Result;
use crate::model::{KernelRule, ModelConfig, MAX_DIM};
use crate::walker::{default_box_radius, GreenPath, GreenSchedule, GreenWalker};

/// Counted region of the streaming tracker.
#[derive(Debug, Clone, Copy)]
pub struct BandFocus<'a> {
    schedule: &'a GreenSchedule,
    start: f64,
    pos: i64,
    done: usize,
    geometry: BlockGeometry,
    margin: i64,
    extra: i64,
    fixed: (i64, i64),
}

impl BandFocus<'_> {
    fn envelope(&self, until_green: f64) -> (i64, i64) {
        let k1 = self.schedule.jumps_through(until_green);
        let mut lo = [0i64; MAX_DIM];
        let mut hi = [0i64; MAX_DIM];
        self.schedule.envelope(self.done, k1, &mut lo, &mut hi);
        (self.pos + lo[0] - self.extra, self.pos + hi[0] + self.extra)
    }
}

impl Focus for BandFocus<'_> {
    fn bound(&self, _now: f64, until: f64) -> FocusBox {
        let d = self.geometry.delta;
        let layer = ((until - self.start) / d as f64).floor() as i64;
        let (lo, hi) = self.envelope(((layer + 2) * d) as f64);
        FocusBox::interval(
            (lo - self.margin).min(self.fixed.0),
            (hi + self.margin).max(self.fixed.1),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StreamOptions {
    /// Extra block columns classified on each side of the path.
    pub margin_columns: i64,
    pub max_events: Option<u64>,
    pub radius: Option<i64>,
}

impl Default for StreamOptions {
    fn default() -> Self {
        StreamOptions {
            margin_columns: 1,
            max_events: Some(STREAM_MAX_EVENTS),
            radius: None,
        }
    }
}

/// Event cap per streamed replica; a dense band at t = 1e4 needs over 1e8.
pub const STREAM_MAX_EVENTS: u64 = 500_000_000;

#[derive(Debug, Clone)]
pub struct StreamOutcome {
    pub path: GreenPath,
    /// Blocks `(i, j)` with `i` within the margin of the path's columns in layer `j`.
    pub classification: BlockClassification,
    pub layers: i64,
    pub red_events: u64,
}

/// Runs one green trajectory of length `t` and classifies the blocks around it.
pub fn stream_classify(
    config: &ModelConfig,
    params: &RenormParams,
    t: f64,
    seed: u64,
    opts: &StreamOptions,
) -> Result<StreamOutcome> {
    let g = params.geometry();
    let d = g.delta;
    let m = opts.margin_columns.max(0);
    let origin = d as f64;
    let layers = layers_for(g, t);
    let env_end = origin + (layers * d) as f64;
    let schedule = GreenSchedule::sample(config, t, seed);
    let base = BandFocus {
        schedule: &schedule,
        start: origin,
        pos: 0,
        done: 0,
        geometry: g,
        margin: (m + 4) * d,
        extra: match config.kernel_rule {
            KernelRule::Departure => 0,
            KernelRule::Destination => config.green_range(),
        },
        fixed: (0, 0),
    };
    let layer_setup = |pos: i64, done: usize, k: i64| -> (LayerRange, (i64, i64)) {
        let f = BandFocus { pos, done, ..base };
        let (lo, hi) = f.envelope(((k + 2) * d) as f64);
        let (clo, chi) = (g.column_of(lo), g.column_of(hi));
        let range = LayerRange {
            win_lo: (clo - m - 3) * d,
            win_hi: (chi + m + 4) * d - g.window,
            cov_lo: (clo - m) * d,
            cov_hi: (chi + m + 1) * d - 1,
        };
        (range, (lo - f.margin, hi + f.margin))
    };

    let (range0, fixed0) = layer_setup(0, 0, -1);
    let focus0 = BandFocus { fixed: fixed0, ..base };
    let radius = opts.radius.unwrap_or_else(|| default_box_radius(env_end));
    let mut env = LocalField::new(config, radius, seed, env_end, &focus0)?;
    if let Some(cap) = opts.max_events {
        env.set_max_events(cap);
    }
    let mut sweep = BlockSweep::new(env.torus(), g, params.bad_threshold(), origin)?;
    sweep.reserve(env.particle_count());
    env.for_each_explicit(&mut |p, s| sweep.place(p, s));
    sweep.start_layer(-1, range0)?;
    env.advance(origin, &focus0, &mut sweep)?;

    let mut walker = Some(GreenWalker::new(config, &schedule, seed, &env));
    let mut path: Option<GreenPath> = None;
    let mut classification = BlockClassification::new(g, params.bad_threshold());
    let (mut pos, mut done) = (0i64, 0usize);
    for k in 0..layers {
        let (range, fixed) = layer_setup(pos, done, k);
        sweep.start_layer(k, range)?;
        let (mut pmin, mut pmax) = (pos, pos);
        let layer_end = origin + ((k + 1) * d) as f64;
        if let Some(w) = walker.as_mut() {
            while let Some(s) = w.next_jump_time() {
                if s >= layer_end {
                    break;
                }
                let focus = BandFocus {
                    pos,
                    done,
                    fixed,
                    ..base
                };
                env.advance(s, &focus, &mut (w.watch_mut(), &mut sweep))?;
                w.jump(&env)?;
                pos = w.position()[0];
                done = w.jumps_done();
                pmin = pmin.min(pos);
                pmax = pmax.max(pos);
            }
            if origin + t <= layer_end {
                let focus = BandFocus {
                    pos,
                    done,
                    fixed,
                    ..base
                };
                env.advance(origin + t, &focus, &mut (w.watch_mut(), &mut sweep))?;
            }
        }
        if origin + t <= layer_end {
            if let Some(w) = walker.take() {
                path = Some(w.finish(origin + t).0);
            }
        }
        let focus = BandFocus {
            pos,
            done,
            fixed,
            ..base
        };
        match walker.as_mut() {
            Some(w) => env.advance(layer_end, &focus, &mut (w.watch_mut(), &mut sweep))?,
            None => env.advance(layer_end, &focus, &mut sweep)?,
        }
        for rec in sweep.classify_current(g.column_of(pmin) - m..=g.column_of(pmax) + m)? {
            classification.insert(&rec);
        }
    }
    Ok(StreamOutcome {
        path: path.expect("the last layer reaches the horizon"),
        classification,
        layers,
        red_events: env.event_count(),
    })
}
