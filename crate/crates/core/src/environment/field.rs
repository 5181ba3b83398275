use std::collections::HashMap;

use rand_distr::{Distribution, Exp1, Poisson};

use super::log::{EventLog, LoggedEvent, TrackLog, Trajectory};
use super::snapshot::FieldSnapshot;
use super::{Environment, EventSink, Focus};
use crate::error::{Error, Result};
use crate::lattice::{CountStore, SiteIx, SiteRange, Torus};
use crate::model::{EnvironmentMode, ModelConfig};
use crate::rng::{rng_for, uniform_below, SimRng, Stream};

pub const DEFAULT_MAX_EVENTS: u64 = 100_000_000;
pub const DEFAULT_PARTICLE_BUDGET: u64 = 50_000_000;

#[derive(Debug)]
struct ActiveTrack {
    index: HashMap<u32, usize>,
    log: TrackLog,
}

/// Identifies an active tracking request and the particles it covers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrackHandle {
    slot: usize,
    pub particles: Vec<u32>,
}

/// Every red particle on the torus, moved by one aggregated exponential clock.
#[derive(Debug)]
pub struct ParticleField {
    torus: Torus,
    mode: EnvironmentMode,
    red_rate: f64,
    coords: Vec<i64>,
    sites: Vec<SiteIx>,
    counts: CountStore,
    time: f64,
    events: u64,
    max_events: u64,
    rng: SimRng,
    log: Option<EventLog>,
    tracks: Vec<Option<ActiveTrack>>,
    tracked: Vec<u16>,
}

impl ParticleField {
    /// I.i.d. Poisson(mu) counts on every site of the torus of radius `radius`.
    pub fn init_poisson(config: &ModelConfig, radius: i64, seed: u64) -> Result<Self> {
        Self::init_poisson_with_budget(config, radius, seed, DEFAULT_PARTICLE_BUDGET)
    }

    pub fn init_poisson_with_budget(
        config: &ModelConfig,
        radius: i64,
        seed: u64,
        particle_budget: u64,
    ) -> Result<Self> {
        config.validate()?;
        let torus = Torus::new(config.dim, radius)?;
        let expected = config.mu * torus.volume() as f64;
        if expected > particle_budget as f64 {
            return Err(Error::Budget(format!(
                "expected {expected:.0} particles exceeds budget {particle_budget}"
            )));
        }
        let mut rng = rng_for(seed, Stream::Environment);
        let mut sites = Vec::new();
        if config.mu > 0.0 {
            let pois = Poisson::new(config.mu)
                .map_err(|e| Error::InvalidParameter(format!("Poisson({}): {e}", config.mu)))?;
            for ix in 0..torus.volume() {
                let k = pois.sample(&mut rng) as u64;
                for _ in 0..k {
                    sites.push(ix);
                }
                if sites.len() as u64 > particle_budget {
                    return Err(Error::Budget(format!(
                        "particle count exceeds budget {particle_budget}"
                    )));
                }
            }
        }
        Ok(Self::assemble(torus, config, sites, rng))
    }

    /// A field with particles at explicitly given sites (one entry per particle).
    pub fn from_sites(config: &ModelConfig, radius: i64, sites: &[Vec<i64>], seed: u64) -> Result<Self> {
        config.validate()?;
        let torus = Torus::new(config.dim, radius)?;
        let mut ix = Vec::with_capacity(sites.len());
        for s in sites {
            if s.len() != torus.dim() {
                return Err(Error::InvalidParameter(format!("site {s:?} has wrong dimension")));
            }
            ix.push(torus.index(s));
        }
        Ok(Self::assemble(torus, config, ix, rng_for(seed, Stream::Environment)))
    }

    fn assemble(torus: Torus, config: &ModelConfig, sites: Vec<SiteIx>, rng: SimRng) -> Self {
        let mut counts = CountStore::for_torus(&torus);
        let mut coords = vec![0; sites.len() * torus.dim()];
        for (k, &s) in sites.iter().enumerate() {
            counts.inc(s);
            torus.coords(s, &mut coords[k * torus.dim()..(k + 1) * torus.dim()]);
        }
        let n = sites.len();
        ParticleField {
            torus,
            mode: config.mode,
            red_rate: config.red_rate,
            coords,
            sites,
            counts,
            time: 0.0,
            events: 0,
            max_events: DEFAULT_MAX_EVENTS,
            rng,
            log: None,
            tracks: Vec::new(),
            tracked: vec![0; n],
        }
    }

    pub fn set_max_events(&mut self, cap: u64) {
        self.max_events = cap;
    }

    pub fn mode(&self) -> EnvironmentMode {
        self.mode
    }

    /// Advances without a consumer.
    pub fn advance_to(&mut self, t: f64) -> Result<()> {
        self.advance(t, &super::Everywhere, &mut ())
    }

    pub fn occupancy(&self, site: &[i64]) -> u32 {
        self.counts.get(self.torus.index(site))
    }

    pub fn positions(&self) -> &[SiteIx] {
        &self.sites
    }

    pub fn particle_site(&self, particle: u32) -> Vec<i64> {
        let d = self.torus.dim();
        self.coords[particle as usize * d..(particle as usize + 1) * d].to_vec()
    }

    pub fn snapshot_window(&self, window: &SiteRange) -> Result<FieldSnapshot> {
        window.check_within(&self.torus)?;
        let mut counts = Vec::with_capacity(window.len() as usize);
        window.for_each(|s| counts.push(self.counts.get(self.torus.index(s))));
        Ok(FieldSnapshot {
            time: self.time,
            range: window.clone(),
            counts,
        })
    }

    /// Starts recording every event from the current time on.
    pub fn start_log(&mut self) {
        self.log = Some(EventLog {
            dim: self.torus.dim(),
            radius: self.torus.radius(),
            start_time: self.time,
            end_time: self.time,
            initial: self.sites.clone(),
            events: Vec::new(),
        });
    }

    pub fn take_log(&mut self) -> Option<EventLog> {
        let mut log = self.log.take()?;
        log.end_time = self.time;
        Some(log)
    }

    /// Tags the particles inside `region` and records their trajectories from now on.
    pub fn tag_and_track(&mut self, region: &SiteRange, from_time: f64) -> Result<TrackHandle> {
        if from_time != self.time {
            return Err(Error::InvalidParameter(format!(
                "tagging time {from_time} differs from field time {}",
                self.time
            )));
        }
        if region.dim() != self.torus.dim() {
            return Err(Error::OutOfRange("region dimension mismatch".into()));
        }
        let d = self.torus.dim();
        let mut index = HashMap::new();
        let mut trajectories = Vec::new();
        let mut particles = Vec::new();
        for k in 0..self.sites.len() {
            let c = &self.coords[k * d..(k + 1) * d];
            if region_contains_wrapped(&self.torus, region, c) {
                index.insert(k as u32, trajectories.len());
                trajectories.push(Trajectory {
                    particle: k as u32,
                    points: vec![(from_time, self.sites[k])],
                });
                particles.push(k as u32);
                self.tracked[k] += 1;
            }
        }
        let track = ActiveTrack {
            index,
            log: TrackLog {
                from_time,
                to_time: from_time,
                trajectories,
            },
        };
        let slot = match self.tracks.iter().position(Option::is_none) {
            Some(s) => {
                self.tracks[s] = Some(track);
                s
            }
            None => {
                self.tracks.push(Some(track));
                self.tracks.len() - 1
            }
        };
        Ok(TrackHandle { slot, particles })
    }

    /// Ends a tracking request and returns its trajectories up to the current time.
    pub fn release(&mut self, handle: TrackHandle) -> Result<TrackLog> {
        let track = self
            .tracks
            .get_mut(handle.slot)
            .and_then(Option::take)
            .ok_or_else(|| Error::InvalidParameter("unknown track handle".into()))?;
        for &p in &handle.particles {
            self.tracked[p as usize] -= 1;
        }
        let mut log = track.log;
        log.to_time = self.time;
        Ok(log)
    }

    #[inline]
    fn step_particle(&mut self, k: usize, dir: usize) -> (SiteIx, SiteIx) {
        let d = self.torus.dim();
        let axis = dir >> 1;
        let delta = if dir & 1 == 0 { 1 } else { -1 };
        let from = self.sites[k];
        let c = &mut self.coords[k * d + axis];
        *c = self.torus.step_wrap(*c, delta);
        let to = if d == 1 {
            self.torus.index1(*c)
        } else {
            self.torus.index(&self.coords[k * d..(k + 1) * d])
        };
        self.sites[k] = to;
        self.counts.dec(from);
        self.counts.inc(to);
        (from, to)
    }
}

fn region_contains_wrapped(torus: &Torus, region: &SiteRange, coords: &[i64]) -> bool {
    coords.iter().enumerate().all(|(a, &c)| {
        let (lo, hi) = (region.lo[a], region.hi[a]);
        if hi - lo + 1 >= torus.side() {
            return true;
        }
        (c - lo).rem_euclid(torus.side()) <= hi - lo
    })
}

impl Environment for ParticleField {
    fn torus(&self) -> &Torus {
        &self.torus
    }

    fn time(&self) -> f64 {
        self.time
    }

    #[inline]
    fn count(&self, site: SiteIx) -> u32 {
        self.counts.get(site)
    }

    fn advance<F: Focus + ?Sized, S: EventSink + ?Sized>(
        &mut self,
        t: f64,
        _focus: &F,
        sink: &mut S,
    ) -> Result<()> {
        if t < self.time {
            return Err(Error::InvalidParameter(format!(
                "cannot advance from {} back to {t}",
                self.time
            )));
        }
        let n = self.sites.len();
        if self.mode == EnvironmentMode::Frozen || n == 0 {
            self.time = t;
            return Ok(());
        }
        let total_rate = n as f64 * self.red_rate;
        let dirs = 2 * self.torus.dim();
        loop {
            let e: f64 = Exp1.sample(&mut self.rng);
            let next = self.time + e / total_rate;
            if next > t {
                self.time = t;
                return Ok(());
            }
            if self.events >= self.max_events {
                return Err(Error::Budget(format!(
                    "event cap {} reached at time {}",
                    self.max_events, self.time
                )));
            }
            self.time = next;
            self.events += 1;
            let r = uniform_below(&mut self.rng, n as u64 * dirs as u64);
            let k = (r / dirs as u64) as usize;
            let dir = (r % dirs as u64) as usize;
            let (from, to) = self.step_particle(k, dir);
            sink.on_move(next, k as u32, from, to);
            if let Some(log) = &mut self.log {
                log.events.push(LoggedEvent {
                    time: next,
                    particle: k as u32,
                    from,
                    to,
                });
            }
            if self.tracked[k] > 0 {
                for tr in self.tracks.iter_mut().flatten() {
                    if let Some(&slot) = tr.index.get(&(k as u32)) {
                        tr.log.trajectories[slot].points.push((next, to));
                    }
                }
            }
        }
    }

    fn for_each_explicit(&self, f: &mut dyn FnMut(u32, SiteIx)) {
        for (k, &s) in self.sites.iter().enumerate() {
            f(k as u32, s);
        }
    }

    fn event_count(&self) -> u64 {
        self.events
    }

    fn particle_count(&self) -> usize {
        self.sites.len()
    }
}
