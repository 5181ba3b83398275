use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, HashMap};

use rand::Rng;
use rand_distr::{Binomial, Distribution, Exp1, Hypergeometric, Poisson};

use super::{Environment, EventSink, Focus, FocusBox};
use crate::error::{Error, Result};
use crate::lattice::{CountStore, SiteIx, Torus};
use crate::model::{EnvironmentMode, ModelConfig};
use crate::rng::{rng_for, uniform_below, SimRng, Stream};
use super::field::{DEFAULT_MAX_EVENTS, DEFAULT_PARTICLE_BUDGET};

/// Particles within this many steps of the focus are always simulated explicitly.
const POOL_RADIUS: i64 = 12;
/// A pool particle is reconsidered for dormancy once it is this far out.
const EXIT_RADIUS: i64 = 20;
/// Shortest chunk worth its bookkeeping, in expected jumps.
const MIN_CHUNK_JUMPS: f64 = 8.0;

/// Focus bounds that stay valid for a whole `advance` call.
struct Window {
    /// Covers every time of the current advance step.
    cover: FocusBox,
    /// Covers everything up to the horizon.
    full: FocusBox,
}

impl Window {
    fn new<F: Focus + ?Sized>(focus: &F, from: f64, to: f64, horizon: f64) -> Self {
        Window {
            cover: focus.bound(from, to),
            full: focus.bound(from, horizon),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum State {
    /// Moved by the aggregated pool clock.
    Pool,
    /// Uncounted until the heap entry at the end of its chunk.
    Dormant,
    /// Counted; `left` jumps remain before the chunk ends at `end`.
    Scheduled { left: u64, end: f64 },
    /// Can no longer reach the focus before the horizon.
    Dropped,
}

#[derive(Debug, Clone, Copy)]
struct Entry {
    time: f64,
    particle: u32,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Entry {}
impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.time
            .total_cmp(&other.time)
            .then(self.particle.cmp(&other.particle))
    }
}

enum Plan {
    Pool,
    /// Invisible over the chunk; the net displacement is already applied.
    Hidden { end: f64 },
    /// Must be replayed explicitly; `steps` holds the directions when they were sampled.
    Visible {
        end: f64,
        jumps: u64,
        steps: Option<Vec<i8>>,
    },
}

/// Work counters of a [`LocalField`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LocalStats {
    pub pool_moves: u64,
    pub scheduled_jumps: u64,
    pub plans: u64,
    pub bound_queries: u64,
    pub chunks: u64,
    pub failed_chunks: u64,
    pub dropped: u64,
    pub max_pool: usize,
}

/// Red-particle field exact in law inside a moving focus region.
///
/// Each particle is either in the explicit pool, or dormant over a time chunk
/// `[s, s + tau]`. Entering a chunk, the number of jumps `n ~ Poisson(tau)` is
/// drawn; if `n` is smaller than the number of steps separating the particle
/// from the focus bound over the whole chunk, the particle cannot be seen and
/// only its net displacement is sampled. Otherwise its `n` jumps are placed at
/// uniform order statistics in the chunk and replayed explicitly.
#[derive(Debug)]
pub struct LocalField {
    torus: Torus,
    mode: EnvironmentMode,
    red_rate: f64,
    horizon: f64,
    coords: Vec<i64>,
    sites: Vec<SiteIx>,
    state: Vec<State>,
    counts: CountStore,
    pool: Vec<u32>,
    pool_slot: Vec<u32>,
    heap: BinaryHeap<Reverse<Entry>>,
    /// Pending step directions (+1/-1, reversed) of scheduled 1-d particles.
    steps: HashMap<u32, Vec<i8>>,
    time: f64,
    events: u64,
    max_events: u64,
    rng: SimRng,
    stats: LocalStats,
}

const NOT_IN_POOL: u32 = u32::MAX;

impl LocalField {
    /// Poisson(mu) equilibrium on the torus of radius `radius`, valid on `[0, horizon]`.
    ///
    /// `focus` must describe the consumer's region from time 0; particles that
    /// start counted emit no events.
    pub fn new<F: Focus + ?Sized>(
        config: &ModelConfig,
        radius: i64,
        seed: u64,
        horizon: f64,
        focus: &F,
    ) -> Result<Self> {
        config.validate()?;
        if !(horizon.is_finite() && horizon >= 0.0) {
            return Err(Error::InvalidParameter(format!("horizon {horizon} invalid")));
        }
        let torus = Torus::new(config.dim, radius)?;
        let expected = config.mu * torus.volume() as f64;
        if expected > DEFAULT_PARTICLE_BUDGET as f64 {
            return Err(Error::Budget(format!(
                "expected {expected:.0} particles exceeds budget {DEFAULT_PARTICLE_BUDGET}"
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
            }
        }
        Self::assemble(torus, config, sites, rng, horizon, focus)
    }

    /// A field with particles at given sites.
    pub fn from_sites<F: Focus + ?Sized>(
        config: &ModelConfig,
        radius: i64,
        sites: &[Vec<i64>],
        seed: u64,
        horizon: f64,
        focus: &F,
    ) -> Result<Self> {
        config.validate()?;
        let torus = Torus::new(config.dim, radius)?;
        let ix = sites.iter().map(|s| torus.index(s)).collect();
        Self::assemble(torus, config, ix, rng_for(seed, Stream::Environment), horizon, focus)
    }

    fn assemble<F: Focus + ?Sized>(
        torus: Torus,
        config: &ModelConfig,
        sites: Vec<SiteIx>,
        rng: SimRng,
        horizon: f64,
        focus: &F,
    ) -> Result<Self> {
        let n = sites.len();
        let d = torus.dim();
        let mut coords = vec![0; n * d];
        for (k, &s) in sites.iter().enumerate() {
            torus.coords(s, &mut coords[k * d..(k + 1) * d]);
        }
        let counts = CountStore::for_torus(&torus);
        let mut field = LocalField {
            torus,
            mode: config.mode,
            red_rate: config.red_rate,
            horizon,
            coords,
            sites,
            state: vec![State::Dropped; n],
            counts,
            pool: Vec::new(),
            pool_slot: vec![NOT_IN_POOL; n],
            heap: BinaryHeap::new(),
            steps: HashMap::new(),
            time: 0.0,
            events: 0,
            max_events: DEFAULT_MAX_EVENTS,
            rng,
            stats: LocalStats::default(),
        };
        if field.mode == EnvironmentMode::Frozen {
            for k in 0..n {
                field.counts.inc(field.sites[k]);
                field.state[k] = State::Pool;
            }
            return Ok(field);
        }
        let win = Window::new(focus, 0.0, 0.0, horizon);
        for k in 0..n {
            field.settle(k, 0.0, focus, &win, false, &mut (), false);
        }
        Ok(field)
    }

    pub fn set_max_events(&mut self, cap: u64) {
        self.max_events = cap;
    }

    pub fn stats(&self) -> LocalStats {
        self.stats
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    fn counted(state: State) -> bool {
        matches!(state, State::Pool | State::Scheduled { .. })
    }

    fn coords_of(&self, k: usize) -> &[i64] {
        let d = self.torus.dim();
        &self.coords[k * d..(k + 1) * d]
    }

    fn plan<F: Focus + ?Sized>(&mut self, k: usize, now: f64, focus: &F, win: &Window) -> Plan {
        let rem = self.horizon - now;
        let rate = self.red_rate;
        self.stats.plans += 1;
        let d0 = win.cover.distance(&self.torus, self.coords_of(k));
        if d0 <= POOL_RADIUS {
            return Plan::Pool;
        }
        let one_d = self.torus.dim() == 1;
        // Distance at which a chunk of length tau rarely fails its certificate.
        let need = |tau: f64| {
            let spread = 3.5 * (rate * tau).sqrt() + 2.0;
            if one_d {
                spread
            } else {
                rate * tau + spread
            }
        };
        let dfull = win.full.distance(&self.torus, self.coords_of(k));
        if dfull as f64 >= need(rem) {
            let full = win.full;
            return self.chunk(k, rem, now, &full);
        }
        let mut tau = (0.5 * rem).min(2.0 * d0 as f64 / rate);
        while rate * tau >= MIN_CHUNK_JUMPS {
            self.stats.bound_queries += 1;
            let b = focus.bound(now, now + tau);
            let dist = b.distance(&self.torus, self.coords_of(k));
            if dist >= 1 && dist as f64 >= need(tau) {
                return self.chunk(k, tau, now, &b);
            }
            tau *= 0.5;
        }
        Plan::Pool
    }

    fn chunk(&mut self, k: usize, tau: f64, now: f64, b: &FocusBox) -> Plan {
        let lambda = self.red_rate * tau;
        let jumps = if lambda > 0.0 {
            Poisson::new(lambda).expect("positive mean").sample(&mut self.rng) as u64
        } else {
            0
        };
        self.stats.chunks += 1;
        let end = now + tau;
        if self.torus.dim() == 1 {
            let ups = if jumps > 0 {
                Binomial::new(jumps, 0.5).expect("valid binomial").sample(&mut self.rng)
            } else {
                0
            };
            let (right, left) = b.axis_gaps(&self.torus, 0, self.coords[k]);
            match self.certify(jumps, ups, right, left) {
                None => {
                    self.shift_1d(k, 2 * ups as i64 - jumps as i64);
                    Plan::Hidden { end }
                }
                Some(steps) => {
                    self.stats.failed_chunks += 1;
                    Plan::Visible {
                        end,
                        jumps,
                        steps: Some(steps),
                    }
                }
            }
        } else {
            let limit = b.distance(&self.torus, self.coords_of(k));
            if (jumps as i64) < limit {
                self.displace(k, jumps);
                Plan::Hidden { end }
            } else {
                self.stats.failed_chunks += 1;
                Plan::Visible {
                    end,
                    jumps,
                    steps: None,
                }
            }
        }
    }

    /// Decides whether a 1-d walk of `n` unit steps, `ups` of them upward, stays
    /// strictly within `(-left, right)` of its start.
    ///
    /// The path is refined as a sequence of bridges: a segment of `j` steps
    /// with `u` ups is split in half with a hypergeometric number of ups in the
    /// first half, until every segment is certified from its step counts alone.
    /// Returns `None` if it never gets there, otherwise the realized step list
    /// (reversed, ready to pop).
    fn certify(&mut self, n: u64, ups: u64, right: i64, left: i64) -> Option<Vec<i8>> {
        let mut leaves: Vec<(u64, u64)> = Vec::new();
        let mut stack: Vec<(i64, u64, u64)> = vec![(0, n, ups)];
        let mut touched = false;
        while let Some((y0, j, u)) = stack.pop() {
            if j == 0 {
                continue;
            }
            let highest = y0 + u as i64;
            let lowest = y0 - (j - u) as i64;
            if (highest < right && -lowest < left) || j == 1 {
                if j == 1 && !(highest < right && -lowest < left) {
                    touched = true;
                }
                leaves.push((j, u));
                continue;
            }
            let j1 = j / 2;
            let u1 = if u == 0 || u == j {
                u * j1 / j
            } else {
                Hypergeometric::new(j, u, j1)
                    .expect("valid hypergeometric")
                    .sample(&mut self.rng)
            };
            let y1 = y0 + 2 * u1 as i64 - j1 as i64;
            stack.push((y1, j - j1, u - u1));
            stack.push((y0, j1, u1));
        }
        if !touched {
            return None;
        }
        let mut steps: Vec<i8> = Vec::with_capacity(n as usize);
        for (j, u) in leaves {
            let from = steps.len();
            steps.extend(std::iter::repeat_n(1i8, u as usize));
            steps.extend(std::iter::repeat_n(-1i8, (j - u) as usize));
            let seg = &mut steps[from..];
            for i in (1..seg.len()).rev() {
                let r = self.rng.random_range(0..=i);
                seg.swap(i, r);
            }
        }
        steps.reverse();
        Some(steps)
    }

    /// Applies the net displacement of `n` simple-random-walk steps in any dimension.
    fn displace(&mut self, k: usize, n: u64) {
        let d = self.torus.dim();
        let mut remaining = n;
        for a in 0..d {
            let m = if a + 1 == d {
                remaining
            } else if remaining == 0 {
                0
            } else {
                let p = 1.0 / (d - a) as f64;
                Binomial::new(remaining, p).expect("valid binomial").sample(&mut self.rng)
            };
            remaining -= m;
            if m > 0 {
                let right = Binomial::new(m, 0.5).expect("valid binomial").sample(&mut self.rng);
                let delta = 2 * right as i64 - m as i64;
                let c = &mut self.coords[k * d + a];
                *c = self.torus.wrap(*c + delta);
            }
        }
        self.sites[k] = self.torus.index(self.coords_of(k));
    }

    fn shift_1d(&mut self, k: usize, delta: i64) {
        self.coords[k] = self.torus.wrap(self.coords[k] + delta);
        self.sites[k] = self.torus.index1(self.coords[k]);
    }

    fn pool_insert(&mut self, k: usize) {
        self.pool_slot[k] = self.pool.len() as u32;
        self.pool.push(k as u32);
        self.stats.max_pool = self.stats.max_pool.max(self.pool.len());
    }

    fn pool_remove(&mut self, k: usize) {
        let slot = self.pool_slot[k] as usize;
        let last = *self.pool.last().expect("pool not empty");
        self.pool.swap_remove(slot);
        if last as usize != k {
            self.pool_slot[last as usize] = slot as u32;
        }
        self.pool_slot[k] = NOT_IN_POOL;
    }

    fn next_jump_time(&mut self, now: f64, end: f64, left: u64) -> f64 {
        // Minimum of `left` uniform points on (now, end).
        let u: f64 = self.rng.random();
        let t = now + (end - now) * (1.0 - u.powf(1.0 / left as f64));
        t.clamp(now, end)
    }

    /// Chooses the next state of particle `k` at time `now`.
    fn settle<F: Focus + ?Sized, S: EventSink + ?Sized>(
        &mut self,
        k: usize,
        now: f64,
        focus: &F,
        win: &Window,
        was_counted: bool,
        sink: &mut S,
        emit: bool,
    ) {
        let was_pool = self.state[k] == State::Pool;
        let old_site = self.sites[k];
        if self.horizon - now <= 0.0 {
            if was_pool {
                self.pool_remove(k);
            }
            if was_counted {
                self.counts.dec(self.sites[k]);
                if emit {
                    sink.on_vanish(now, k as u32, self.sites[k]);
                }
            }
            self.state[k] = State::Dropped;
            self.stats.dropped += 1;
            return;
        }
        match self.plan(k, now, focus, win) {
            Plan::Pool => {
                if !was_counted {
                    self.counts.inc(self.sites[k]);
                    if emit {
                        sink.on_appear(now, k as u32, self.sites[k]);
                    }
                }
                if !was_pool {
                    self.pool_insert(k);
                }
                self.state[k] = State::Pool;
            }
            Plan::Hidden { end } => {
                if was_pool {
                    self.pool_remove(k);
                }
                if was_counted {
                    // The displacement was applied while planning; vanish from the old site.
                    self.counts.dec(old_site);
                    if emit {
                        sink.on_vanish(now, k as u32, old_site);
                    }
                }
                if end >= self.horizon {
                    self.state[k] = State::Dropped;
                    self.stats.dropped += 1;
                } else {
                    self.state[k] = State::Dormant;
                    self.heap.push(Reverse(Entry {
                        time: end,
                        particle: k as u32,
                    }));
                }
            }
            Plan::Visible { end, jumps, steps } => {
                if was_pool {
                    self.pool_remove(k);
                }
                if !was_counted {
                    self.counts.inc(self.sites[k]);
                    if emit {
                        sink.on_appear(now, k as u32, self.sites[k]);
                    }
                }
                if let Some(steps) = steps {
                    if !steps.is_empty() {
                        self.steps.insert(k as u32, steps);
                    }
                }
                let first = if jumps == 0 {
                    end
                } else {
                    self.next_jump_time(now, end, jumps)
                };
                self.state[k] = State::Scheduled { left: jumps, end };
                self.heap.push(Reverse(Entry {
                    time: first,
                    particle: k as u32,
                }));
            }
        }
    }

    #[inline]
    /// Direction of the next jump of a scheduled particle.
    fn scheduled_dir(&mut self, k: usize) -> usize {
        match self.steps.get_mut(&(k as u32)) {
            Some(q) => {
                let s = q.pop().expect("queued step");
                if q.is_empty() {
                    self.steps.remove(&(k as u32));
                }
                usize::from(s < 0)
            }
            None => uniform_below(&mut self.rng, 2 * self.torus.dim() as u64) as usize,
        }
    }

    fn step(&mut self, k: usize, dir: usize) -> (SiteIx, SiteIx) {
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

    fn bump_events(&mut self) -> Result<()> {
        if self.events >= self.max_events {
            return Err(Error::Budget(format!(
                "event cap {} reached at time {}",
                self.max_events, self.time
            )));
        }
        self.events += 1;
        Ok(())
    }
}

impl Environment for LocalField {
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
        focus: &F,
        sink: &mut S,
    ) -> Result<()> {
        if t < self.time {
            return Err(Error::InvalidParameter(format!(
                "cannot advance from {} back to {t}",
                self.time
            )));
        }
        if t > self.horizon {
            return Err(Error::InvalidParameter(format!(
                "time {t} beyond the field horizon {}",
                self.horizon
            )));
        }
        if self.mode == EnvironmentMode::Frozen {
            self.time = t;
            return Ok(());
        }
        let win = Window::new(focus, self.time, t, self.horizon);
        loop {
            let pool_rate = self.pool.len() as f64 * self.red_rate;
            let t_pool = if pool_rate > 0.0 {
                let e: f64 = Exp1.sample(&mut self.rng);
                self.time + e / pool_rate
            } else {
                f64::INFINITY
            };
            let t_heap = self.heap.peek().map_or(f64::INFINITY, |e| e.0.time);
            let next = t_pool.min(t_heap);
            if next > t {
                self.time = t;
                return Ok(());
            }
            self.time = next;
            if t_pool < t_heap {
                self.bump_events()?;
                self.stats.pool_moves += 1;
                let dirs = 2 * self.torus.dim() as u64;
                let r = uniform_below(&mut self.rng, self.pool.len() as u64 * dirs);
                let k = self.pool[(r / dirs) as usize] as usize;
                let (from, to) = self.step(k, (r % dirs) as usize);
                sink.on_move(next, k as u32, from, to);
                let d0 = win.cover.distance(&self.torus, self.coords_of(k));
                if d0 >= EXIT_RADIUS {
                    self.settle(k, next, focus, &win, true, sink, true);
                }
            } else {
                let Reverse(entry) = self.heap.pop().expect("peeked entry");
                let k = entry.particle as usize;
                match self.state[k] {
                    State::Dormant => self.settle(k, next, focus, &win, false, sink, true),
                    State::Scheduled { left: 0, .. } => {
                        self.settle(k, next, focus, &win, true, sink, true)
                    }
                    State::Scheduled { left, end } => {
                        self.bump_events()?;
                        self.stats.scheduled_jumps += 1;
                        let dir = self.scheduled_dir(k);
                        let (from, to) = self.step(k, dir);
                        sink.on_move(next, k as u32, from, to);
                        let left = left - 1;
                        self.state[k] = State::Scheduled { left, end };
                        let at = if left == 0 {
                            end
                        } else {
                            self.next_jump_time(next, end, left)
                        };
                        self.heap.push(Reverse(Entry {
                            time: at,
                            particle: k as u32,
                        }));
                    }
                    State::Pool | State::Dropped => {
                        unreachable!("heap entry for a particle without a chunk")
                    }
                }
            }
        }
    }

    fn for_each_explicit(&self, f: &mut dyn FnMut(u32, SiteIx)) {
        for (k, &s) in self.sites.iter().enumerate() {
            if Self::counted(self.state[k]) {
                f(k as u32, s);
            }
        }
    }

    fn event_count(&self) -> u64 {
        self.events
    }

    fn particle_count(&self) -> usize {
        self.sites.len()
    }
}
