//! Replica orchestration and aggregation for every preset.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentSpec, Preset};
use crate::error::{Error, Result};
use crate::model::{solomon_critical_densities, EnvironmentMode, ModelConfig};
use crate::renorm::{
    check_constants, closed_loop, estimate_f_r, measure_proposition_tails, mu_1, ClosedLoop,
    ConstantsReport, FEstimate, ReplicaStatus, StreamOptions, TailReport, STREAM_MAX_EVENTS,
};
use crate::rng::replica_seed;
use crate::stats::mean_ci;
use crate::walker::{
    classify_sign, empirical_speed, martingale_residual, rho_hat, rho_hat_jumps, run_replica, SpeedSign,
};

pub const RESULT_SCHEMA: &str = "rwdre.result.v1";

/// Outcome of one green-particle replica. Vectors have one entry per axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicaRecord {
    /// Index of the grid point the replica belongs to.
    pub point: usize,
    pub replica: usize,
    pub seed: u64,
    pub p: Option<f64>,
    pub mu: f64,
    pub t: f64,
    pub status: ReplicaStatus,
    pub speed: Vec<f64>,
    pub rho_time: Option<f64>,
    pub rho_jumps: Option<f64>,
    pub residual_over_t: Vec<f64>,
    pub ell: Option<usize>,
    pub red_events: u64,
}

/// A grid point of a walker experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkPoint {
    pub p: Option<f64>,
    pub mu: f64,
    pub t: f64,
}

/// Runs `replicas` replicas at each point; replica `k` of every point uses
/// `replica_seed(seed, k)`, so points share random numbers.
pub fn run_walk_points(
    spec: &ExperimentSpec,
    base: &ModelConfig,
    points: &[WalkPoint],
) -> Result<Vec<ReplicaRecord>> {
    let jobs: Vec<(usize, usize)> = (0..points.len())
        .flat_map(|m| (0..spec.replicas).map(move |k| (m, k)))
        .collect();
    let mut records: Vec<ReplicaRecord> = jobs
        .par_iter()
        .map(|&(m, k)| {
            let pt = points[m];
            let config = match pt.p {
                Some(p) => ModelConfig::solomon(p, pt.mu)?
                    .with_mode(base.mode)
                    .with_kernel_rule(base.kernel_rule),
                None => base.clone().with_mu(pt.mu),
            };
            let seed = replica_seed(spec.seed, k as u64);
            walk_record(&config, spec, m, k, seed, pt)
        })
        .collect::<Result<Vec<_>>>()?;
    records.sort_by_key(|r| (r.point, r.replica));
    Ok(records)
}

fn walk_record(
    config: &ModelConfig,
    spec: &ExperimentSpec,
    point: usize,
    replica: usize,
    seed: u64,
    pt: WalkPoint,
) -> Result<ReplicaRecord> {
    let mut rec = ReplicaRecord {
        point,
        replica,
        seed,
        p: pt.p,
        mu: pt.mu,
        t: pt.t,
        status: ReplicaStatus::Ok,
        speed: Vec::new(),
        rho_time: None,
        rho_jumps: None,
        residual_over_t: Vec::new(),
        ell: None,
        red_events: 0,
    };
    match run_replica(config, pt.t, seed, spec.run.engine, spec.run.radius, spec.run.max_events) {
        Ok(rep) => {
            rec.speed = empirical_speed(&rep.path);
            rec.rho_time = Some(rho_hat(&rep.path));
            rec.rho_jumps = rho_hat_jumps(&rep.path);
            rec.residual_over_t = martingale_residual(&rep.trace, pt.t);
            rec.ell = Some(rep.path.jumps());
            rec.red_events = rep.red_events;
        }
        Err(Error::WindowBreach { .. }) => rec.status = ReplicaStatus::Breach,
        Err(Error::Budget(_)) => rec.status = ReplicaStatus::Truncated,
        Err(e) => return Err(e),
    }
    Ok(rec)
}

/// Replica bookkeeping: `total = ok + breaches + truncated`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct ReplicaCounts {
    pub total: usize,
    pub ok: usize,
    pub breaches: usize,
    pub truncated: usize,
}

impl ReplicaCounts {
    pub fn tally<'a>(statuses: impl IntoIterator<Item = &'a ReplicaStatus>) -> Self {
        let mut c = ReplicaCounts::default();
        for s in statuses {
            c.total += 1;
            match s {
                ReplicaStatus::Ok => c.ok += 1,
                ReplicaStatus::Breach => c.breaches += 1,
                ReplicaStatus::Truncated => c.truncated += 1,
            }
        }
        c
    }

    pub fn merge(self, o: ReplicaCounts) -> Self {
        ReplicaCounts {
            total: self.total + o.total,
            ok: self.ok + o.ok,
            breaches: self.breaches + o.breaches,
            truncated: self.truncated + o.truncated,
        }
    }

    pub fn breach_rate(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.breaches as f64 / self.total as f64
        }
    }
}

/// Speed and occupancy statistics at one density.
///
/// The decomposition gap compares the mean speed with the drift implied by the
/// mean occupied fraction; `combined_se` adds both standard errors in quadrature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeedRow {
    pub mu: f64,
    pub replicas: usize,
    pub ok: usize,
    pub breaches: usize,
    pub truncated: usize,
    pub v: f64,
    pub v_se: f64,
    pub v_lo: f64,
    pub v_hi: f64,
    pub rho: f64,
    pub rho_se: f64,
    pub rho_lo: f64,
    pub rho_hi: f64,
    pub rho_jumps: f64,
    pub rho_jumps_se: f64,
    pub v_predicted: f64,
    pub gap: f64,
    pub combined_se: f64,
    pub mean_abs_residual: f64,
    pub mean_ell: f64,
    pub red_events: u64,
}

/// Aggregates axis-0 statistics for one grid point.
///
/// Records are sorted by replica index first, so any input order gives the
/// same bits.
pub fn aggregate_speed(mu: f64, v_occupied: f64, v_vacant: f64, records: &[ReplicaRecord]) -> SpeedRow {
    let mut recs: Vec<&ReplicaRecord> = records.iter().collect();
    recs.sort_by_key(|r| r.replica);
    let counts = ReplicaCounts::tally(recs.iter().map(|r| &r.status));
    let ok: Vec<&&ReplicaRecord> = recs.iter().filter(|r| r.status == ReplicaStatus::Ok).collect();
    let speeds: Vec<f64> = ok.iter().map(|r| r.speed[0]).collect();
    let rhos: Vec<f64> = ok.iter().filter_map(|r| r.rho_time).collect();
    let rho_j: Vec<f64> = ok.iter().filter_map(|r| r.rho_jumps).collect();
    let res: Vec<f64> = ok.iter().map(|r| r.residual_over_t[0].abs()).collect();
    let ells: Vec<f64> = ok.iter().filter_map(|r| r.ell.map(|l| l as f64)).collect();
    let v = mean_ci(&speeds, 0.95);
    let rho = mean_ci(&rhos, 0.95);
    let rj = mean_ci(&rho_j, 0.95);
    let v_predicted = rho.mean * v_occupied + (1.0 - rho.mean) * v_vacant;
    let combined_se = (v.se * v.se + ((v_occupied - v_vacant) * rho.se).powi(2)).sqrt();
    SpeedRow {
        mu,
        replicas: counts.total,
        ok: counts.ok,
        breaches: counts.breaches,
        truncated: counts.truncated,
        v: v.mean,
        v_se: v.se,
        v_lo: v.lo,
        v_hi: v.hi,
        rho: rho.mean,
        rho_se: rho.se,
        rho_lo: rho.lo,
        rho_hi: rho.hi,
        rho_jumps: rj.mean,
        rho_jumps_se: rj.se,
        v_predicted,
        gap: v.mean - v_predicted,
        combined_se,
        mean_abs_residual: mean_of(&res),
        mean_ell: mean_of(&ells),
        red_events: recs.iter().map(|r| r.red_events).sum(),
    }
}

fn mean_of(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        f64::NAN
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

/// One row of the frozen-environment phase table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseRow {
    pub p: f64,
    pub mu: f64,
    pub t: f64,
    pub replicas: usize,
    pub ok: usize,
    pub breaches: usize,
    pub truncated: usize,
    pub v: f64,
    pub v_se: f64,
    /// Two-sided 99% t-interval.
    pub v_lo: f64,
    pub v_hi: f64,
    pub sign: SpeedSign,
    pub mu_minus: f64,
    pub mu_plus: f64,
    /// Sign class predicted by the critical densities.
    pub predicted: SpeedSign,
    pub rho: f64,
}

pub fn predicted_sign(mu: f64, mu_minus: f64, mu_plus: f64) -> SpeedSign {
    if mu < mu_minus {
        SpeedSign::Negative
    } else if mu > mu_plus {
        SpeedSign::Positive
    } else {
        SpeedSign::ZeroConsistent
    }
}

pub fn aggregate_phase(pt: WalkPoint, records: &[ReplicaRecord]) -> Result<PhaseRow> {
    let p = pt.p.ok_or_else(|| Error::Config("phase table needs `p`".into()))?;
    let (mu_minus, mu_plus) = solomon_critical_densities(p)?;
    let mut recs: Vec<&ReplicaRecord> = records.iter().collect();
    recs.sort_by_key(|r| r.replica);
    let counts = ReplicaCounts::tally(recs.iter().map(|r| &r.status));
    let speeds: Vec<f64> = recs
        .iter()
        .filter(|r| r.status == ReplicaStatus::Ok)
        .map(|r| r.speed[0])
        .collect();
    let rhos: Vec<f64> = recs.iter().filter_map(|r| r.rho_time).collect();
    let ci = mean_ci(&speeds, 0.99);
    Ok(PhaseRow {
        p,
        mu: pt.mu,
        t: pt.t,
        replicas: counts.total,
        ok: counts.ok,
        breaches: counts.breaches,
        truncated: counts.truncated,
        v: ci.mean,
        v_se: ci.se,
        v_lo: ci.lo,
        v_hi: ci.hi,
        sign: classify_sign(&speeds),
        mu_minus,
        mu_plus,
        predicted: predicted_sign(pt.mu, mu_minus, mu_plus),
        rho: mean_of(&rhos),
    })
}

/// Coverage probability, density threshold and the closed-loop check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageResult {
    pub f: FEstimate,
    pub f_used: f64,
    pub eps1: f64,
    pub mu1: Option<f64>,
    pub closed_loop: Option<ClosedLoop>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ResultBody {
    Walk {
        records: Vec<ReplicaRecord>,
        rows: Vec<SpeedRow>,
    },
    Phase {
        records: Vec<ReplicaRecord>,
        rows: Vec<PhaseRow>,
    },
    Tails(TailReport),
    Coverage(CoverageResult),
    Constants(ConstantsReport),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub schema: String,
    pub preset: Preset,
    pub spec_hash: String,
    pub seed: u64,
    pub t: f64,
    pub counts: ReplicaCounts,
    pub breach_rate: f64,
    /// Breach rate above the configured limit.
    pub unreliable: bool,
    pub red_events: u64,
    pub body: ResultBody,
    /// Wall time; kept out of every file except the manifest.
    #[serde(skip)]
    pub runtime_seconds: f64,
}

impl RunResult {
    pub fn truncated(&self) -> bool {
        self.counts.truncated > 0
    }
}

/// Executes `spec` on a pool of `spec.workers` threads (all cores by default).
pub fn run_experiment(spec: &ExperimentSpec) -> Result<RunResult> {
    spec.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = spec.workers {
        builder = builder.num_threads(w);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    let start = Instant::now();
    let mut result = pool.install(|| dispatch(spec))?;
    result.runtime_seconds = start.elapsed().as_secs_f64();
    Ok(result)
}

fn dispatch(spec: &ExperimentSpec) -> Result<RunResult> {
    let base = spec.model.to_config()?;
    let (counts, red_events, body) = match spec.preset {
        Preset::SingleRun | Preset::SpeedCurve | Preset::RhoCurve => {
            let body = speed_curve(spec, &base)?;
            let ResultBody::Walk { records, .. } = &body else { unreachable!() };
            let counts = ReplicaCounts::tally(records.iter().map(|r| &r.status));
            let ev = records.iter().map(|r| r.red_events).sum();
            (counts, ev, body)
        }
        Preset::StaticSolomon => {
            let body = static_phase_diagram(spec, &base)?;
            let ResultBody::Phase { records, .. } = &body else { unreachable!() };
            let counts = ReplicaCounts::tally(records.iter().map(|r| &r.status));
            let ev = records.iter().map(|r| r.red_events).sum();
            (counts, ev, body)
        }
        Preset::BlockTails => {
            let params = spec.renorm.params(base.mu)?;
            let opts = StreamOptions {
                margin_columns: spec.renorm.margin_columns,
                max_events: Some(spec.run.max_events.unwrap_or(STREAM_MAX_EVENTS)),
                radius: spec.run.radius,
            };
            let report =
                measure_proposition_tails(&base, &params, &spec.theorem, spec.t, &spec.mus(), spec.replicas, spec.seed, &opts)?;
            let counts = ReplicaCounts::tally(report.samples.iter().map(|s| &s.status));
            let ev = report.samples.iter().map(|s| s.red_events).sum();
            (counts, ev, ResultBody::Tails(report))
        }
        Preset::CoverageProbe | Preset::FEstimate => {
            let res = coverage_probe(spec, spec.preset == Preset::CoverageProbe)?;
            let n = res.closed_loop.as_ref().map_or(0, |c| c.replicas);
            let counts = ReplicaCounts {
                total: n,
                ok: n,
                ..Default::default()
            };
            (counts, 0, ResultBody::Coverage(res))
        }
        Preset::ConstantsReport => {
            let params = spec.renorm.params(spec.model.mu)?;
            let report = check_constants(&params, spec.theorem.c4, spec.renorm.r_max, spec.renorm.c0_range);
            (ReplicaCounts::default(), 0, ResultBody::Constants(report))
        }
    };
    let breach_rate = counts.breach_rate();
    Ok(RunResult {
        schema: RESULT_SCHEMA.to_string(),
        preset: spec.preset,
        spec_hash: spec.hash(),
        seed: spec.seed,
        t: spec.t,
        counts,
        breach_rate,
        unreliable: breach_rate > spec.run.breach_limit,
        red_events,
        body,
        runtime_seconds: 0.0,
    })
}

/// Speed and occupancy at every density of the grid (dynamic or frozen, as configured).
pub fn speed_curve(spec: &ExperimentSpec, base: &ModelConfig) -> Result<ResultBody> {
    let points: Vec<WalkPoint> = spec
        .mus()
        .into_iter()
        .map(|mu| WalkPoint { p: None, mu, t: spec.t })
        .collect();
    let records = run_walk_points(spec, base, &points)?;
    let v1 = base.v_occupied()[0];
    let v2 = base.v_vacant()[0];
    let rows = points
        .iter()
        .enumerate()
        .map(|(m, pt)| {
            let of: Vec<ReplicaRecord> = records.iter().filter(|r| r.point == m).cloned().collect();
            aggregate_speed(pt.mu, v1, v2, &of)
        })
        .collect();
    Ok(ResultBody::Walk { records, rows })
}

/// Frozen-environment speed over the `(p, mu, t)` grid. The environment mode of
/// the model section is overridden to frozen.
pub fn static_phase_diagram(spec: &ExperimentSpec, base: &ModelConfig) -> Result<ResultBody> {
    let ps: Vec<f64> = if spec.grid.p.is_empty() {
        vec![spec
            .model
            .solomon_p()
            .ok_or_else(|| Error::Config("static_solomon needs `model.p` or `grid.p`".into()))?]
    } else {
        spec.grid.p.clone()
    };
    let factors = if spec.grid.t_factors.is_empty() {
        vec![1.0]
    } else {
        spec.grid.t_factors.clone()
    };
    let mut points = Vec::new();
    for &p in &ps {
        for mu in spec.mus() {
            for &f in &factors {
                points.push(WalkPoint {
                    p: Some(p),
                    mu,
                    t: spec.t * f,
                });
            }
        }
    }
    let frozen = base.clone().with_mode(EnvironmentMode::Frozen);
    let records = run_walk_points(spec, &frozen, &points)?;
    let rows = points
        .iter()
        .enumerate()
        .map(|(m, &pt)| {
            let of: Vec<ReplicaRecord> = records.iter().filter(|r| r.point == m).cloned().collect();
            aggregate_phase(pt, &of)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ResultBody::Phase { records, rows })
}

/// Estimates the coverage probability and, with `closed`, checks the coverage
/// failure rate at the resulting density threshold.
pub fn coverage_probe(spec: &ExperimentSpec, closed: bool) -> Result<CoverageResult> {
    let params = spec.renorm.params(spec.model.mu)?;
    let n = if spec.coverage.f_replicas == 0 {
        spec.replicas
    } else {
        spec.coverage.f_replicas
    };
    let f = estimate_f_r(&params, n, spec.seed)?;
    let f_used = f.conservative();
    let eps1 = spec.coverage.eps1;
    let mu1 = if f_used > 0.0 {
        Some(mu_1(eps1, f_used, params.gamma0)?)
    } else {
        None
    };
    let closed_loop = match (closed, mu1) {
        (true, Some(mu)) => Some(closed_loop(&params, mu, eps1, spec.replicas, spec.seed ^ 0xC105ED)?),
        (true, None) => {
            return Err(Error::InvalidParameter(
                "no covered trial: the density threshold is infinite".into(),
            ))
        }
        _ => None,
    };
    Ok(CoverageResult {
        f,
        f_used,
        eps1,
        mu1,
        closed_loop,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::Preset;

    fn spec(preset: Preset) -> ExperimentSpec {
        let mut s = ExperimentSpec::new(preset);
        s.t = 50.0;
        s.replicas = 6;
        s.seed = 11;
        s.workers = Some(1);
        s
    }

    #[test]
    fn counts_add_up() {
        let c = ReplicaCounts::tally(&[ReplicaStatus::Ok, ReplicaStatus::Breach, ReplicaStatus::Truncated, ReplicaStatus::Ok]);
        assert_eq!(c.total, c.ok + c.breaches + c.truncated);
        assert_eq!(c.breach_rate(), 0.25);
        assert_eq!(c.merge(c).total, 8);
    }

    #[test]
    fn aggregation_ignores_order() {
        let mut s = spec(Preset::SpeedCurve);
        s.grid.mu = vec![1.0];
        let base = s.model.to_config().unwrap();
        let ResultBody::Walk { records, rows } = speed_curve(&s, &base).unwrap() else { panic!() };
        let mut rev = records.clone();
        rev.reverse();
        rev.swap(0, 3);
        let again = aggregate_speed(1.0, base.v_occupied()[0], base.v_vacant()[0], &rev);
        assert_eq!(format!("{:?}", rows[0]), format!("{again:?}"));
    }

    #[test]
    fn vacant_environment_drifts_left() {
        let mut s = spec(Preset::SingleRun);
        s.model.mu = 0.0;
        s.t = 1000.0;
        s.replicas = 4;
        let r = run_experiment(&s).unwrap();
        let ResultBody::Walk { rows, .. } = &r.body else { panic!() };
        let row = &rows[0];
        assert_eq!(row.rho, 0.0);
        assert!((row.v + 0.4).abs() <= 3.0 * row.v_se.max(0.02), "{row:?}");
    }

    #[test]
    fn predicted_sign_matches_critical_densities() {
        let (a, b) = solomon_critical_densities(0.7).unwrap();
        assert_eq!(predicted_sign(0.1, a, b), SpeedSign::Negative);
        assert_eq!(predicted_sign(0.7, a, b), SpeedSign::ZeroConsistent);
        assert_eq!(predicted_sign(2.0, a, b), SpeedSign::Positive);
    }

    #[test]
    fn workers_do_not_change_results() {
        let mut s = spec(Preset::SpeedCurve);
        s.grid.mu = vec![0.5, 2.0];
        let a = run_experiment(&s).unwrap();
        s.workers = Some(3);
        let b = run_experiment(&s).unwrap();
        assert_eq!(a.body, b.body);
    }
}
