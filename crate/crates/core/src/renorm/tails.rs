//! Empirical frequencies of the renormalization tail events.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::animal::lattice_animal;
use super::classify::BlockClassification;
use super::coverage::Proportion;
use super::params::{RenormParams, TheoremParameters};
use super::phi::{phi_sup_dp, PhiDomain, DEFAULT_STATE_BUDGET};
use super::stream::{stream_classify, StreamOptions};
use crate::error::{Error, Result};
use crate::model::ModelConfig;
use crate::rng::replica_seed;
use crate::walker::GreenPath;

pub const TAILS_SCHEMA: &str = "rwdre.tails.v1";

/// Event thresholds for one run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailThresholds {
    /// `eps_0 (t + ell) / D`.
    pub phi: f64,
    /// `3 eps_0 t / D`.
    pub gamma: f64,
    /// `eps_1 t`.
    pub lambda: f64,
}

impl TailThresholds {
    pub fn new(theorem: &TheoremParameters, delta: i64, t: f64, ell: usize) -> Self {
        let d = delta as f64;
        TailThresholds {
            phi: theorem.epsilon0 * (t + ell as f64) / d,
            gamma: 3.0 * theorem.epsilon0 * t / d,
            lambda: theorem.epsilon1 * t,
        }
    }
}

/// Block counts along one path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailCounts {
    pub ell: usize,
    pub animal: usize,
    /// Bad blocks met by the path.
    pub bad_met: usize,
    /// Good blocks met by the path that pedestal particles leave uncovered.
    pub good_vacant_met: usize,
    /// Supremum over the labelled corridor, `None` if over budget.
    pub phi_sup: Option<usize>,
}

pub fn tail_counts(
    path: &GreenPath,
    classification: &BlockClassification,
    layers: i64,
    full_domain: Option<PhiDomain>,
    budget: u64,
) -> Result<TailCounts> {
    let animal = lattice_animal(path, classification.geometry);
    let mut bad_met = 0;
    let mut good_vacant_met = 0;
    for &(i, j) in &animal.blocks {
        match classification.label(i, j) {
            Some(l) if l.bad => bad_met += 1,
            Some(l) if !l.occupied => good_vacant_met += 1,
            _ => {}
        }
    }
    let domain = full_domain.unwrap_or_else(|| PhiDomain::from_labels(classification, layers));
    let phi_sup = match phi_sup_dp(&domain, path.jumps(), budget) {
        Ok(v) => Some(v),
        Err(Error::Budget(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(TailCounts {
        ell: path.jumps(),
        animal: animal.size(),
        bad_met,
        good_vacant_met,
        phi_sup,
    })
}

/// Which tail events occurred; `phi` falls back to the path's own count when the
/// supremum was not computed, which can only under-report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TailEvents {
    pub phi: bool,
    pub gamma: bool,
    pub lambda: bool,
}

impl TailEvents {
    pub fn from_counts(c: &TailCounts, th: &TailThresholds) -> Self {
        let phi = c.phi_sup.unwrap_or(c.bad_met).max(c.bad_met);
        TailEvents {
            phi: phi as f64 >= th.phi,
            gamma: c.bad_met as f64 >= th.gamma,
            lambda: c.good_vacant_met as f64 >= th.lambda,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReplicaStatus {
    Ok,
    Breach,
    Truncated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailSample {
    pub mu: f64,
    pub replica: usize,
    pub seed: u64,
    pub status: ReplicaStatus,
    pub counts: Option<TailCounts>,
    pub events: Option<TailEvents>,
    pub red_events: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailRow {
    pub mu: f64,
    pub r: u32,
    pub c0: u64,
    pub epsilon0: f64,
    pub epsilon1: f64,
    pub replicas: usize,
    pub breaches: usize,
    pub truncated: usize,
    pub phi: Proportion,
    pub gamma: Proportion,
    pub lambda: Proportion,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailReport {
    pub schema: String,
    pub t: f64,
    pub seed: u64,
    pub rows: Vec<TailRow>,
    pub samples: Vec<TailSample>,
}

/// One replica at density `config.mu`.
pub fn tail_replica(
    config: &ModelConfig,
    params: &RenormParams,
    theorem: &TheoremParameters,
    t: f64,
    replica: usize,
    seed: u64,
    opts: &StreamOptions,
) -> Result<TailSample> {
    let mut sample = TailSample {
        mu: config.mu,
        replica,
        seed,
        status: ReplicaStatus::Ok,
        counts: None,
        events: None,
        red_events: 0,
    };
    match stream_classify(config, params, t, seed, opts) {
        Ok(out) => {
            let counts = tail_counts(&out.path, &out.classification, out.layers, None, DEFAULT_STATE_BUDGET)?;
            let th = TailThresholds::new(theorem, params.delta(), t, counts.ell);
            sample.events = Some(TailEvents::from_counts(&counts, &th));
            sample.counts = Some(counts);
            sample.red_events = out.red_events;
        }
        Err(Error::WindowBreach { .. }) => sample.status = ReplicaStatus::Breach,
        Err(Error::Budget(_)) => sample.status = ReplicaStatus::Truncated,
        Err(e) => return Err(e),
    }
    Ok(sample)
}

fn summarize(mu: f64, params: &RenormParams, theorem: &TheoremParameters, samples: &[&TailSample]) -> TailRow {
    let ok: Vec<&TailEvents> = samples.iter().filter_map(|s| s.events.as_ref()).collect();
    let n = ok.len() as u64;
    let count = |f: &dyn Fn(&TailEvents) -> bool| ok.iter().filter(|e| f(e)).count() as u64;
    TailRow {
        mu,
        r: params.r,
        c0: params.c0,
        epsilon0: theorem.epsilon0,
        epsilon1: theorem.epsilon1,
        replicas: samples.len(),
        breaches: samples.iter().filter(|s| s.status == ReplicaStatus::Breach).count(),
        truncated: samples.iter().filter(|s| s.status == ReplicaStatus::Truncated).count(),
        phi: Proportion::new(count(&|e| e.phi), n),
        gamma: Proportion::new(count(&|e| e.gamma), n),
        lambda: Proportion::new(count(&|e| e.lambda), n),
    }
}

/// Tail frequencies at each density, with the same replica seeds at every density.
#[allow(clippy::too_many_arguments)]
pub fn measure_proposition_tails(
    base: &ModelConfig,
    params: &RenormParams,
    theorem: &TheoremParameters,
    t: f64,
    mus: &[f64],
    replicas: usize,
    seed: u64,
    opts: &StreamOptions,
) -> Result<TailReport> {
    if base.dim != 1 {
        return Err(Error::InvalidParameter("block analysis is implemented in one dimension".into()));
    }
    let jobs: Vec<(usize, usize)> = (0..mus.len())
        .flat_map(|m| (0..replicas).map(move |k| (m, k)))
        .collect();
    let mut samples: Vec<TailSample> = jobs
        .par_iter()
        .map(|&(m, k)| {
            let config = base.clone().with_mu(mus[m]);
            let p = params.clone().with_mu(mus[m]);
            tail_replica(&config, &p, theorem, t, k, replica_seed(seed, k as u64), opts)
        })
        .collect::<Result<Vec<_>>>()?;
    samples.sort_by(|a, b| a.mu.total_cmp(&b.mu).then(a.replica.cmp(&b.replica)));
    let rows = mus
        .iter()
        .map(|&mu| {
            let of: Vec<&TailSample> = samples.iter().filter(|s| s.mu == mu).collect();
            summarize(mu, &params.clone().with_mu(mu), theorem, &of)
        })
        .collect();
    Ok(TailReport {
        schema: TAILS_SCHEMA.to_string(),
        t,
        seed,
        rows,
        samples,
    })
}
