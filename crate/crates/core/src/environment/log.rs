use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{SiteIx, Torus};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoggedEvent {
    pub time: f64,
    pub particle: u32,
    pub from: SiteIx,
    pub to: SiteIx,
}

/// Complete record of a full-torus field over `[start_time, end_time]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventLog {
    pub dim: usize,
    pub radius: i64,
    pub start_time: f64,
    pub end_time: f64,
    /// Site of each particle at `start_time`.
    pub initial: Vec<SiteIx>,
    pub events: Vec<LoggedEvent>,
}

/// Piecewise-constant path of one particle: `(time, site)` change points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub particle: u32,
    pub points: Vec<(f64, SiteIx)>,
}

impl Trajectory {
    /// Site at time `t` (right-continuous).
    pub fn site_at(&self, t: f64) -> SiteIx {
        let k = self.points.partition_point(|p| p.0 <= t);
        self.points[k.saturating_sub(1)].1
    }

    /// Maximal intervals in `[t0, t1)` spent at `site`.
    pub fn intervals_at(&self, site: SiteIx, t0: f64, t1: f64, out: &mut Vec<(f64, f64)>) {
        for (k, &(s, x)) in self.points.iter().enumerate() {
            if x != site {
                continue;
            }
            let e = self.points.get(k + 1).map_or(f64::INFINITY, |p| p.0);
            let (a, b) = (s.max(t0), e.min(t1));
            if a < b {
                out.push((a, b));
            }
        }
    }
}

/// Trajectories of particles tagged at `from_time`, valid through `to_time`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackLog {
    pub from_time: f64,
    pub to_time: f64,
    pub trajectories: Vec<Trajectory>,
}

impl TrackLog {
    /// Tracked particles at `site` at time `t`.
    pub fn occupancy_at(&self, site: SiteIx, t: f64) -> u32 {
        self.trajectories
            .iter()
            .filter(|tr| tr.site_at(t) == site)
            .count() as u32
    }

    pub fn covers(&self, t0: f64, t1: f64) -> Result<()> {
        if t0 < self.from_time || t1 > self.to_time {
            return Err(Error::IncompleteLog {
                from: t0.min(self.from_time),
                to: t1.max(self.to_time),
            });
        }
        Ok(())
    }
}

impl EventLog {
    pub fn torus(&self) -> Result<Torus> {
        Torus::new(self.dim, self.radius)
    }

    /// Per-particle trajectories reconstructed from the event list.
    pub fn trajectories(&self) -> Vec<Trajectory> {
        let mut out: Vec<Trajectory> = self
            .initial
            .iter()
            .enumerate()
            .map(|(k, &x)| Trajectory {
                particle: k as u32,
                points: vec![(self.start_time, x)],
            })
            .collect();
        for e in &self.events {
            out[e.particle as usize].points.push((e.time, e.to));
        }
        out
    }

    pub fn covers(&self, t0: f64, t1: f64) -> Result<()> {
        if t0 < self.start_time || t1 > self.end_time {
            return Err(Error::IncompleteLog {
                from: if t0 < self.start_time { t0 } else { self.end_time },
                to: if t1 > self.end_time { t1 } else { self.start_time },
            });
        }
        Ok(())
    }

    /// Replays the log to produce counts on `sites` at time `t`.
    pub fn counts_at(&self, t: f64) -> Vec<u32> {
        let torus = Torus::new(self.dim, self.radius).expect("log has a valid torus");
        let mut counts = vec![0u32; torus.volume() as usize];
        let mut pos = self.initial.clone();
        for e in self.events.iter().take_while(|e| e.time <= t) {
            pos[e.particle as usize] = e.to;
        }
        for x in pos {
            counts[x as usize] += 1;
        }
        counts
    }
}
