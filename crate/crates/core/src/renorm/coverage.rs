//! Coverage of blocks by particles present at the pedestal.

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::geometry::{BlockGeometry, BlockGrid};
use super::params::RenormParams;
use crate::environment::{FieldSnapshot, ParticleField, TrackLog};
use crate::error::{Error, Result};
use crate::lattice::{SiteRange, Torus};
use crate::model::{Kernel, ModelConfig};
use crate::rng::{replica_seed, rng_for, Stream};
use crate::stats::wilson;

/// Outcome of a coverage check on one block.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverageVerdict {
    /// Some block point is missed by every tracked particle.
    pub occurred: bool,
    /// First missed point `(x, field time)` at the smallest such time.
    pub witness: Option<(i64, f64)>,
}

/// Checks whether the tracked particles leave a point of block `(i, j)` unvisited.
///
/// `track` must hold the particles tagged in `V(i)` at the pedestal time and
/// cover the whole block. For each site the occupation intervals are merged
/// and scanned for a gap.
pub fn coverage_event(track: &TrackLog, torus: &Torus, grid: &BlockGrid, i: i64, j: i64) -> Result<CoverageVerdict> {
    let g = grid.geometry;
    let d = g.delta;
    let pedestal = grid.origin + ((j - 1) * d) as f64;
    let (t0, t1) = (grid.origin + (j * d) as f64, grid.origin + ((j + 1) * d) as f64);
    if track.from_time != pedestal {
        return Err(Error::InvalidParameter(format!(
            "track log starts at {} but block ({i}, {j}) has its pedestal at {pedestal}",
            track.from_time
        )));
    }
    track.covers(t0, t1)?;
    let x0 = i * d;
    let mut per_site: Vec<Vec<(f64, f64)>> = vec![Vec::new(); d as usize];
    for tr in &track.trajectories {
        for (k, &(s, site)) in tr.points.iter().enumerate() {
            let x = torus.x_of(site);
            if x < x0 || x >= x0 + d {
                continue;
            }
            let e = tr.points.get(k + 1).map_or(f64::INFINITY, |p| p.0);
            let (a, b) = (s.max(t0), e.min(t1));
            if a < b {
                per_site[(x - x0) as usize].push((a, b));
            }
        }
    }
    let mut best: Option<(i64, f64)> = None;
    for (k, iv) in per_site.iter_mut().enumerate() {
        iv.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut reach = t0;
        let mut gap = None;
        for &(a, b) in iv.iter() {
            if a > reach {
                gap = Some(reach);
                break;
            }
            reach = reach.max(b);
        }
        if gap.is_none() && reach < t1 {
            gap = Some(reach);
        }
        if let Some(t) = gap {
            if best.is_none_or(|(_, bt)| t < bt) {
                best = Some((x0 + k as i64, t));
            }
        }
    }
    Ok(CoverageVerdict {
        occurred: best.is_some(),
        witness: best,
    })
}

/// Window count `U_r(x, t)` read from a snapshot.
pub fn u_r(snapshot: &FieldSnapshot, x: i64, params: &RenormParams) -> Result<u64> {
    snapshot.interval_sum(x, x + params.window() - 1)
}

/// Whether `V(i)` holds at least `gamma_0 mu D` particles in the pedestal snapshot of block `(i, j)`.
pub fn pedestal_event(snapshot: &FieldSnapshot, params: &RenormParams, i: i64) -> Result<bool> {
    let (lo, hi) = params.geometry().v_interval(i);
    let total = snapshot.interval_sum(lo, hi - 1)?;
    Ok(total as f64 >= params.pedestal_threshold())
}

/// How the `8 D` particles of an `f(r)` trial are placed in `V(0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Placement {
    /// Independent uniform sites.
    Uniform,
    /// All on the leftmost site, three block sides from the block.
    Corner,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Proportion {
    pub successes: u64,
    pub trials: u64,
    pub estimate: f64,
    pub lo: f64,
    pub hi: f64,
}

impl Proportion {
    pub fn new(successes: u64, trials: u64) -> Self {
        let (lo, hi) = wilson(successes, trials, 1.959963984540054);
        Proportion {
            successes,
            trials,
            estimate: if trials == 0 { f64::NAN } else { successes as f64 / trials as f64 },
            lo,
            hi,
        }
    }

    pub fn se(&self) -> f64 {
        let p = self.estimate;
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FEstimate {
    pub r: u32,
    pub c0: u64,
    pub delta: i64,
    pub uniform: Proportion,
    pub corner: Proportion,
}

impl FEstimate {
    /// The smaller of the two scenario estimates.
    pub fn conservative(&self) -> f64 {
        self.uniform.estimate.min(self.corner.estimate)
    }
}

fn free_config() -> ModelConfig {
    let k = Kernel::simple_symmetric(1).expect("the symmetric kernel is valid");
    ModelConfig::new(k.clone(), k, 0.0).expect("a symmetric pair with density 0 is valid")
}

fn trial_radius(d: i64) -> i64 {
    8 * d + 16 * ((2.0 * d as f64).sqrt().ceil() as i64) + 16
}

/// Runs particles from `sites` for `2D` and checks whether block `(0, 0)` above
/// the pedestal at time 0 is fully covered.
pub fn block_covered(sites: &[i64], geometry: BlockGeometry, seed: u64) -> Result<bool> {
    let d = geometry.delta;
    let radius = trial_radius(d);
    let cfg = free_config();
    let coords: Vec<Vec<i64>> = sites.iter().map(|&x| vec![x]).collect();
    let mut field = ParticleField::from_sites(&cfg, radius, &coords, seed)?;
    let (v0, v1) = geometry.v_interval(0);
    let handle = field.tag_and_track(&SiteRange::interval(v0, v1 - 1), 0.0)?;
    field.advance_to((2 * d) as f64)?;
    let track = field.release(handle)?;
    let torus = Torus::new(1, radius)?;
    let grid = BlockGrid::new(geometry, d as f64, 0, 0).with_origin(d as f64);
    Ok(!coverage_event(&track, &torus, &grid, 0, 0)?.occurred)
}

/// Estimates `f(r)`: the probability that `8 D` particles in `V(0)` cover block `(0, 0)`.
pub fn estimate_f_r(params: &RenormParams, replicas: usize, seed: u64) -> Result<FEstimate> {
    let g = params.geometry();
    let d = g.delta;
    let (v0, v1) = g.v_interval(0);
    let n = (8 * d) as usize;
    let run = |placement: Placement, salt: u64| -> Result<u64> {
        let hits: Result<Vec<bool>> = (0..replicas)
            .into_par_iter()
            .map(|k| {
                let s = replica_seed(seed ^ salt, k as u64);
                let sites: Vec<i64> = match placement {
                    Placement::Uniform => {
                        let mut rng = rng_for(s, Stream::Auxiliary);
                        (0..n).map(|_| rng.random_range(v0..v1)).collect()
                    }
                    Placement::Corner => vec![v0; n],
                };
                block_covered(&sites, g, s)
            })
            .collect();
        Ok(hits?.into_iter().filter(|&b| b).count() as u64)
    };
    let u = run(Placement::Uniform, 0x5555)?;
    let c = run(Placement::Corner, 0xAAAA)?;
    Ok(FEstimate {
        r: params.r,
        c0: params.c0,
        delta: d,
        uniform: Proportion::new(u, replicas as u64),
        corner: Proportion::new(c, replicas as u64),
    })
}

/// Density above which the coverage failure probability is at most `eps1`.
pub fn mu_1(eps1: f64, f: f64, gamma0: f64) -> Result<f64> {
    if !(eps1 > 0.0 && eps1 < 1.0) {
        return Err(Error::InvalidParameter(format!("epsilon_1 = {eps1} must lie in (0, 1)")));
    }
    if !(f > 0.0 && f <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "coverage probability {f} must lie in (0, 1]"
        )));
    }
    if f == 1.0 {
        return Ok(8.0 / gamma0);
    }
    Ok(8.0 / gamma0 * (1.0 + eps1.ln() / (-f).ln_1p()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosedLoop {
    pub mu: f64,
    pub eps1: f64,
    pub replicas: usize,
    /// Trials on which the pedestal event held and their uncovered count.
    pub conditional: Proportion,
    pub passes: bool,
}

/// Measures `P(E_r | N_r)` at density `mu` with an equilibrium pedestal in `V(0)`.
///
/// Only particles starting in `V(0)` can enter the event, so the field is
/// restricted to them.
pub fn closed_loop(params: &RenormParams, mu: f64, eps1: f64, replicas: usize, seed: u64) -> Result<ClosedLoop> {
    let g = params.geometry();
    let (v0, v1) = g.v_interval(0);
    let m = params.gamma0 * mu * g.delta as f64;
    let pois = if mu > 0.0 {
        Some(Poisson::new(mu).map_err(|e| Error::InvalidParameter(e.to_string()))?)
    } else {
        None
    };
    let out: Result<Vec<Option<bool>>> = (0..replicas)
        .into_par_iter()
        .map(|k| {
            let s = replica_seed(seed, k as u64);
            let mut rng = rng_for(s, Stream::Auxiliary);
            let mut sites = Vec::new();
            for x in v0..v1 {
                let c = pois.as_ref().map_or(0, |p| p.sample(&mut rng) as usize);
                sites.extend(std::iter::repeat_n(x, c));
            }
            if (sites.len() as f64) < m {
                return Ok(None);
            }
            Ok(Some(!block_covered(&sites, g, s)?))
        })
        .collect();
    let out = out?;
    let cond: Vec<bool> = out.into_iter().flatten().collect();
    let k = cond.iter().filter(|&&b| b).count() as u64;
    let prop = Proportion::new(k, cond.len() as u64);
    let se = if cond.is_empty() { f64::NAN } else { prop.se() };
    Ok(ClosedLoop {
        mu,
        eps1,
        replicas,
        passes: !cond.is_empty() && prop.estimate <= eps1 + 2.0 * se,
        conditional: prop,
    })
}
