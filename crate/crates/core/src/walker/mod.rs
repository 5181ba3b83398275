//! The green particle.

mod dump;
mod schedule;

pub use dump::{read_path_csv, write_path_csv, PathSidecar, PATH_SCHEMA};
pub use schedule::{GreenSchedule, StepCoupling};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::environment::{Environment, EventSink, Focus, FocusBox, LocalField, ParticleField};
use crate::error::{Error, Result};
use crate::lattice::{SiteIx, Torus};
use crate::model::{EnvironmentMode, KernelRule, ModelConfig, MAX_DIM};
use crate::rng::{replica_seed, rng_for, SimRng, Stream};
use crate::stats::mean_ci;

/// Default torus radius for a run of length `t`.
pub fn default_box_radius(t: f64) -> i64 {
    (t + 6.0 * (t * (t + 2.0).ln()).sqrt() + 64.0).ceil() as i64
}

/// Everything the green particle may look at until a given time.
#[derive(Debug, Clone, Copy)]
pub struct GreenSiteFocus<'a> {
    pos: [i64; MAX_DIM],
    dim: usize,
    schedule: &'a GreenSchedule,
    start: f64,
    done: usize,
    extra: i64,
}

impl<'a> GreenSiteFocus<'a> {
    /// Focus of a walker at `pos` that has made `done` jumps, started at environment time `start`.
    pub fn new(
        pos: &[i64],
        schedule: &'a GreenSchedule,
        start: f64,
        done: usize,
        config: &ModelConfig,
    ) -> Self {
        let mut p = [0; MAX_DIM];
        p[..pos.len()].copy_from_slice(pos);
        let extra = match config.kernel_rule {
            KernelRule::Departure => 0,
            KernelRule::Destination => config.green_range(),
        };
        GreenSiteFocus {
            pos: p,
            dim: pos.len(),
            schedule,
            start,
            done,
            extra,
        }
    }
}

impl Focus for GreenSiteFocus<'_> {
    fn bound(&self, _now: f64, until: f64) -> FocusBox {
        let k1 = self.schedule.jumps_through(until - self.start);
        let mut b = FocusBox::around(&[0], 0);
        self.schedule.envelope(self.done, k1, &mut b.lo, &mut b.hi);
        for a in 0..self.dim {
            b.lo[a] += self.pos[a] - self.extra;
            b.hi[a] += self.pos[a] + self.extra;
        }
        b
    }
}

/// Tracks the red count at the green particle's site and its occupied time.
#[derive(Debug, Clone)]
pub struct SiteWatch {
    site: SiteIx,
    count: u32,
    occupied_since: f64,
    occupied_time: f64,
}

impl SiteWatch {
    fn new(site: SiteIx, count: u32, now: f64) -> Self {
        SiteWatch {
            site,
            count,
            occupied_since: now,
            occupied_time: 0.0,
        }
    }

    #[inline]
    fn change(&mut self, time: f64, delta: i32) {
        let was = self.count > 0;
        self.count = (self.count as i64 + delta as i64) as u32;
        let now = self.count > 0;
        if was && !now {
            self.occupied_time += time - self.occupied_since;
        } else if !was && now {
            self.occupied_since = time;
        }
    }

    fn retarget(&mut self, time: f64, site: SiteIx, count: u32) {
        if self.count > 0 {
            self.occupied_time += time - self.occupied_since;
        }
        self.site = site;
        self.count = count;
        self.occupied_since = time;
    }

    pub fn count(&self) -> u32 {
        self.count
    }

    /// Occupied time accumulated through `time`.
    pub fn occupied_through(&self, time: f64) -> f64 {
        self.occupied_time
            + if self.count > 0 {
                time - self.occupied_since
            } else {
                0.0
            }
    }
}

impl EventSink for SiteWatch {
    #[inline]
    fn on_move(&mut self, time: f64, _particle: u32, from: SiteIx, to: SiteIx) {
        if from == self.site {
            self.change(time, -1);
        }
        if to == self.site {
            self.change(time, 1);
        }
    }

    #[inline]
    fn on_appear(&mut self, time: f64, _particle: u32, at: SiteIx) {
        if at == self.site {
            self.change(time, 1);
        }
    }

    #[inline]
    fn on_vanish(&mut self, time: f64, _particle: u32, at: SiteIx) {
        if at == self.site {
            self.change(time, -1);
        }
    }
}

/// Jump times, positions and occupancy record of one green trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GreenPath {
    pub dim: usize,
    pub horizon: f64,
    /// Strictly increasing, in `(0, horizon]`.
    pub jump_times: Vec<f64>,
    /// Position after each jump, flattened; the walk starts at the origin.
    pub positions: Vec<i64>,
    /// Whether the departure site was occupied at each jump.
    pub saw_red: Vec<bool>,
    pub occupied_time: f64,
}

impl GreenPath {
    pub fn jumps(&self) -> usize {
        self.jump_times.len()
    }

    /// Position after jump `k` (0-based).
    pub fn position(&self, k: usize) -> &[i64] {
        &self.positions[k * self.dim..(k + 1) * self.dim]
    }

    pub fn final_position(&self) -> Vec<i64> {
        match self.jumps() {
            0 => vec![0; self.dim],
            n => self.position(n - 1).to_vec(),
        }
    }

    /// Position at time `t` (right-continuous).
    pub fn position_at(&self, t: f64) -> Vec<i64> {
        let k = self.jump_times.partition_point(|&s| s <= t);
        if k == 0 {
            vec![0; self.dim]
        } else {
            self.position(k - 1).to_vec()
        }
    }

    /// Holding intervals `(start, end, x)` of a 1-d path covering `[0, horizon)`.
    pub fn holding_intervals_1d(&self) -> Vec<(f64, f64, i64)> {
        assert_eq!(self.dim, 1, "holding intervals are defined for d = 1");
        let mut out = Vec::with_capacity(self.jumps() + 1);
        let mut start = 0.0;
        let mut x = 0;
        for k in 0..self.jumps() {
            let s = self.jump_times[k];
            if s > start {
                out.push((start, s, x));
            }
            start = s;
            x = self.positions[k];
        }
        if self.horizon > start {
            out.push((start, self.horizon, x));
        }
        out
    }
}

/// Generator decomposition of the final position.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorTrace {
    /// `v' * occupied_time + v'' * (t - occupied_time)`.
    pub drift_integral: Vec<f64>,
    /// Final position minus the drift integral.
    pub residual: Vec<f64>,
}

impl GeneratorTrace {
    pub fn from_path(path: &GreenPath, config: &ModelConfig) -> Self {
        let v1 = config.v_occupied();
        let v2 = config.v_vacant();
        let occ = path.occupied_time;
        let vac = path.horizon - occ;
        let drift: Vec<f64> = (0..path.dim).map(|a| v1[a] * occ + v2[a] * vac).collect();
        let fin = path.final_position();
        let residual = (0..path.dim).map(|a| fin[a] as f64 - drift[a]).collect();
        GeneratorTrace {
            drift_integral: drift,
            residual,
        }
    }
}

/// Stepwise green particle driven through an [`Environment`].
///
/// The caller advances the environment to [`GreenWalker::next_jump_time`] with
/// [`GreenWalker::focus`] and [`GreenWalker::watch_mut`], then calls [`GreenWalker::jump`].
#[derive(Debug)]
pub struct GreenWalker<'a> {
    config: &'a ModelConfig,
    schedule: &'a GreenSchedule,
    torus: Torus,
    start: f64,
    rng: SimRng,
    pos: Vec<i64>,
    watch: SiteWatch,
    next: usize,
    safety: i64,
    positions: Vec<i64>,
    saw_red: Vec<bool>,
}

impl<'a> GreenWalker<'a> {
    /// Places the walker at the origin at the environment's current time.
    pub fn new<E: Environment>(
        config: &'a ModelConfig,
        schedule: &'a GreenSchedule,
        seed: u64,
        env: &E,
    ) -> Self {
        let torus = env.torus().clone();
        let origin = vec![0; config.dim];
        let site = torus.index(&origin);
        let start = env.time();
        let safety = torus.radius() / 2;
        GreenWalker {
            config,
            schedule,
            start,
            rng: rng_for(seed, Stream::GreenKernel),
            watch: SiteWatch::new(site, env.count(site), start),
            pos: origin,
            next: 0,
            safety,
            positions: Vec::with_capacity(schedule.times().len() * config.dim),
            saw_red: Vec::with_capacity(schedule.times().len()),
            torus,
        }
    }

    pub fn start_time(&self) -> f64 {
        self.start
    }

    /// Environment time of the next jump, if any remain.
    pub fn next_jump_time(&self) -> Option<f64> {
        self.schedule.times().get(self.next).map(|s| self.start + s)
    }

    pub fn focus(&self) -> GreenSiteFocus<'a> {
        GreenSiteFocus::new(&self.pos, self.schedule, self.start, self.next, self.config)
    }

    pub fn watch_mut(&mut self) -> &mut SiteWatch {
        &mut self.watch
    }

    pub fn position(&self) -> &[i64] {
        &self.pos
    }

    pub fn schedule(&self) -> &'a GreenSchedule {
        self.schedule
    }

    pub fn jumps_done(&self) -> usize {
        self.next
    }

    /// Performs the next jump; the environment must sit at its jump time.
    pub fn jump<E: Environment>(&mut self, env: &E) -> Result<()> {
        let s = self.next_jump_time().expect("jump called with no jumps left");
        debug_assert_eq!(env.time(), s);
        let occupied = self.watch.count > 0;
        debug_assert_eq!(self.watch.count, env.count(self.watch.site));
        let d = self.config.dim;
        let mut step = [0i64; MAX_DIM];
        match self.config.kernel_rule {
            KernelRule::Departure => {
                let st = match self.schedule.forced_step(self.next) {
                    Some(st) => st,
                    None => self.schedule.coupling().draw_free(occupied, &mut self.rng),
                };
                step[..d].copy_from_slice(st);
            }
            KernelRule::Destination => {
                let proposal = self.config.kernel_occupied.sample(&mut self.rng);
                let target: Vec<i64> = (0..d).map(|a| self.pos[a] + proposal[a]).collect();
                if env.count(self.torus.index(&target)) > 0 {
                    step[..d].copy_from_slice(proposal);
                } else {
                    step[..d].copy_from_slice(self.config.kernel_vacant.sample(&mut self.rng));
                }
            }
        }
        debug_assert!(self.config.in_combined_support(&step[..d]));
        for a in 0..d {
            self.pos[a] += step[a];
        }
        if self.pos.iter().any(|c| c.abs() > self.safety) {
            return Err(Error::WindowBreach {
                time: s - self.start,
                half_width: self.safety,
            });
        }
        let site = self.torus.index(&self.pos);
        self.watch.retarget(s, site, env.count(site));
        self.positions.extend_from_slice(&self.pos);
        self.saw_red.push(occupied);
        self.next += 1;
        Ok(())
    }

    /// Closes the run at environment time `end`.
    pub fn finish(self, end: f64) -> (GreenPath, GeneratorTrace) {
        let path = GreenPath {
            dim: self.config.dim,
            horizon: end - self.start,
            jump_times: self.schedule.times()[..self.next].to_vec(),
            positions: self.positions,
            saw_red: self.saw_red,
            occupied_time: self.watch.occupied_through(end),
        };
        let trace = GeneratorTrace::from_path(&path, self.config);
        (path, trace)
    }
}

/// Runs the green particle for time `t` from the environment's current time.
///
/// The green schedule and kernel draws derive from `seed`. A [`LocalField`]
/// must have been built by [`local_field_for_green`] with the same `seed` and `t`.
pub fn simulate_green<E: Environment>(
    env: &mut E,
    config: &ModelConfig,
    t: f64,
    seed: u64,
) -> Result<(GreenPath, GeneratorTrace)> {
    if !(t > 0.0) {
        return Err(Error::InvalidParameter(format!("horizon t = {t} must be positive")));
    }
    let schedule = GreenSchedule::sample(config, t, seed);
    let mut walker = GreenWalker::new(config, &schedule, seed, env);
    let end = walker.start_time() + t;
    while let Some(s) = walker.next_jump_time() {
        let focus = walker.focus();
        env.advance(s, &focus, walker.watch_mut())?;
        walker.jump(env)?;
    }
    let focus = walker.focus();
    env.advance(end, &focus, walker.watch_mut())?;
    Ok(walker.finish(end))
}

/// Builds the lazy field for a green run of length `t` started at time 0.
pub fn local_field_for_green(
    config: &ModelConfig,
    radius: i64,
    seed: u64,
    t: f64,
) -> Result<LocalField> {
    let schedule = GreenSchedule::sample(config, t, seed);
    let focus = GreenSiteFocus::new(&vec![0; config.dim], &schedule, 0.0, 0, config);
    LocalField::new(config, radius, seed, t, &focus)
}

/// Which environment engine a replica runs on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    #[default]
    Local,
    Torus,
}

/// Result of one complete replica.
#[derive(Debug, Clone)]
pub struct Replica {
    pub path: GreenPath,
    pub trace: GeneratorTrace,
    pub red_events: u64,
    pub particles: usize,
}

/// Builds an equilibrium field and runs the green particle on it.
pub fn run_replica(
    config: &ModelConfig,
    t: f64,
    seed: u64,
    engine: Engine,
    radius: Option<i64>,
    max_events: Option<u64>,
) -> Result<Replica> {
    let radius = radius.unwrap_or_else(|| default_box_radius(t));
    match engine {
        Engine::Local => {
            let mut env = local_field_for_green(config, radius, seed, t)?;
            if let Some(cap) = max_events {
                env.set_max_events(cap);
            }
            let (path, trace) = simulate_green(&mut env, config, t, seed)?;
            Ok(Replica {
                path,
                trace,
                red_events: env.event_count(),
                particles: env.particle_count(),
            })
        }
        Engine::Torus => {
            let mut env = ParticleField::init_poisson(config, radius, seed)?;
            if let Some(cap) = max_events {
                env.set_max_events(cap);
            }
            let (path, trace) = simulate_green(&mut env, config, t, seed)?;
            Ok(Replica {
                path,
                trace,
                red_events: env.event_count(),
                particles: env.particle_count(),
            })
        }
    }
}

pub fn empirical_speed(path: &GreenPath) -> Vec<f64> {
    path.final_position()
        .iter()
        .map(|&x| x as f64 / path.horizon)
        .collect()
}

/// Fraction of time the green particle's site was occupied.
pub fn rho_hat(path: &GreenPath) -> f64 {
    (path.occupied_time / path.horizon).clamp(0.0, 1.0)
}

/// Fraction of jumps taken from an occupied site; `None` without jumps.
pub fn rho_hat_jumps(path: &GreenPath) -> Option<f64> {
    if path.jumps() == 0 {
        return None;
    }
    Some(path.saw_red.iter().filter(|&&b| b).count() as f64 / path.jumps() as f64)
}

pub fn martingale_residual(trace: &GeneratorTrace, t: f64) -> Vec<f64> {
    trace.residual.iter().map(|r| r / t).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpeedSign {
    Negative,
    ZeroConsistent,
    Positive,
}

impl SpeedSign {
    pub fn symbol(self) -> &'static str {
        match self {
            SpeedSign::Negative => "-",
            SpeedSign::ZeroConsistent => "0",
            SpeedSign::Positive => "+",
        }
    }
}

/// Classifies a mean by whether its two-sided 99% t-interval excludes zero.
pub fn classify_sign(speeds: &[f64]) -> SpeedSign {
    let ci = mean_ci(speeds, 0.99);
    if ci.lo > 0.0 {
        SpeedSign::Positive
    } else if ci.hi < 0.0 {
        SpeedSign::Negative
    } else {
        SpeedSign::ZeroConsistent
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StaticSummary {
    pub p: f64,
    pub mu: f64,
    pub t: f64,
    pub replicas: usize,
    pub breaches: usize,
    pub mean_speed: f64,
    pub se: f64,
    pub ci99: (f64, f64),
    pub sign: SpeedSign,
    pub rho_hat: f64,
    pub rho_se: f64,
    pub speeds: Vec<f64>,
}

/// Solomon walk in a frozen Poisson(mu) environment.
///
/// Replica `i` uses seed `replica_seed(seed, i)`; replicas run on the rayon pool.
pub fn run_static_solomon(p: f64, mu: f64, t: f64, replicas: usize, seed: u64) -> Result<StaticSummary> {
    let config = ModelConfig::solomon(p, mu)?.with_mode(EnvironmentMode::Frozen);
    let results: Vec<Result<Replica>> = (0..replicas as u64)
        .into_par_iter()
        .map(|i| run_replica(&config, t, replica_seed(seed, i), Engine::Local, None, None))
        .collect();
    let mut speeds = Vec::with_capacity(replicas);
    let mut rhos = Vec::with_capacity(replicas);
    let mut breaches = 0;
    for r in results {
        match r {
            Ok(rep) => {
                speeds.push(empirical_speed(&rep.path)[0]);
                rhos.push(rho_hat(&rep.path));
            }
            Err(Error::WindowBreach { .. }) => breaches += 1,
            Err(e) => return Err(e),
        }
    }
    let ci = mean_ci(&speeds, 0.99);
    let rho = mean_ci(&rhos, 0.99);
    Ok(StaticSummary {
        p,
        mu,
        t,
        replicas,
        breaches,
        mean_speed: ci.mean,
        se: ci.se,
        ci99: (ci.lo, ci.hi),
        sign: classify_sign(&speeds),
        rho_hat: rho.mean,
        rho_se: rho.se,
        speeds,
    })
}
