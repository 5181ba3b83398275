//! Result files: CSV tables, a JSON summary, a manifest and a plot script.
//!
//! Every CSV starts with a `# schema=<name>` line followed by a header row.
//! Apart from the manifest, file contents depend only on the spec and seed.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::{ExperimentSpec, Preset};
use super::run::{PhaseRow, ReplicaCounts, ReplicaRecord, ResultBody, RunResult, SpeedRow};
use crate::error::{Error, Result};
use crate::renorm::{ConstantsRow, ReplicaStatus, TailRow, TailSample};
use crate::rng::replica_seed;

pub const MANIFEST_SCHEMA: &str = "rwdre.manifest.v1";
pub const SEED_RULE: &str =
    "replica_seed(base, i) = mix64(base ^ mix64(i + 0x9E3779B97F4A7C15)), mix64 = SplitMix64 finalizer";

/// A flat CSV row with a fixed column list.
pub trait TableRow: Serialize + DeserializeOwned {
    const SCHEMA: &'static str;
    const HEADER: &'static [&'static str];
}

impl TableRow for SpeedRow {
    const SCHEMA: &'static str = "rwdre.speed_table.v1";
    const HEADER: &'static [&'static str] = &[
        "mu", "replicas", "ok", "breaches", "truncated", "v", "v_se", "v_lo", "v_hi", "rho", "rho_se", "rho_lo",
        "rho_hi", "rho_jumps", "rho_jumps_se", "v_predicted", "gap", "combined_se", "mean_abs_residual", "mean_ell",
        "red_events",
    ];
}

impl TableRow for PhaseRow {
    const SCHEMA: &'static str = "rwdre.phase_table.v1";
    const HEADER: &'static [&'static str] = &[
        "p", "mu", "t", "replicas", "ok", "breaches", "truncated", "v", "v_se", "v_lo", "v_hi", "sign", "mu_minus",
        "mu_plus", "predicted", "rho",
    ];
}

impl TableRow for ConstantsRow {
    const SCHEMA: &'static str = "rwdre.constants.v1";
    const HEADER: &'static [&'static str] =
        &["r", "const3_lhs", "const3_rhs", "const3_ok", "const4_log_lhs", "const4_ok"];
}

/// Axis-0 view of a [`ReplicaRecord`]. Empty cells mark replicas without output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicaCsv {
    pub point: usize,
    pub replica: usize,
    pub seed: u64,
    pub p: Option<f64>,
    pub mu: f64,
    pub t: f64,
    pub status: ReplicaStatus,
    pub speed: Option<f64>,
    pub rho_time: Option<f64>,
    pub rho_jumps: Option<f64>,
    pub residual_over_t: Option<f64>,
    pub ell: Option<usize>,
    pub red_events: u64,
}

impl From<&ReplicaRecord> for ReplicaCsv {
    fn from(r: &ReplicaRecord) -> Self {
        ReplicaCsv {
            point: r.point,
            replica: r.replica,
            seed: r.seed,
            p: r.p,
            mu: r.mu,
            t: r.t,
            status: r.status,
            speed: r.speed.first().copied(),
            rho_time: r.rho_time,
            rho_jumps: r.rho_jumps,
            residual_over_t: r.residual_over_t.first().copied(),
            ell: r.ell,
            red_events: r.red_events,
        }
    }
}

impl TableRow for ReplicaCsv {
    const SCHEMA: &'static str = "rwdre.replicas.v1";
    const HEADER: &'static [&'static str] = &[
        "point", "replica", "seed", "p", "mu", "t", "status", "speed", "rho_time", "rho_jumps", "residual_over_t",
        "ell", "red_events",
    ];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailRowCsv {
    pub mu: f64,
    pub r: u32,
    pub c0: u64,
    pub epsilon0: f64,
    pub epsilon1: f64,
    pub replicas: usize,
    pub breaches: usize,
    pub truncated: usize,
    pub phi_k: u64,
    pub phi_n: u64,
    pub phi_freq: f64,
    pub phi_lo: f64,
    pub phi_hi: f64,
    pub gamma_k: u64,
    pub gamma_freq: f64,
    pub gamma_lo: f64,
    pub gamma_hi: f64,
    pub lambda_k: u64,
    pub lambda_freq: f64,
    pub lambda_lo: f64,
    pub lambda_hi: f64,
}

impl From<&TailRow> for TailRowCsv {
    fn from(r: &TailRow) -> Self {
        TailRowCsv {
            mu: r.mu,
            r: r.r,
            c0: r.c0,
            epsilon0: r.epsilon0,
            epsilon1: r.epsilon1,
            replicas: r.replicas,
            breaches: r.breaches,
            truncated: r.truncated,
            phi_k: r.phi.successes,
            phi_n: r.phi.trials,
            phi_freq: r.phi.estimate,
            phi_lo: r.phi.lo,
            phi_hi: r.phi.hi,
            gamma_k: r.gamma.successes,
            gamma_freq: r.gamma.estimate,
            gamma_lo: r.gamma.lo,
            gamma_hi: r.gamma.hi,
            lambda_k: r.lambda.successes,
            lambda_freq: r.lambda.estimate,
            lambda_lo: r.lambda.lo,
            lambda_hi: r.lambda.hi,
        }
    }
}

impl TableRow for TailRowCsv {
    const SCHEMA: &'static str = "rwdre.tail_table.v1";
    const HEADER: &'static [&'static str] = &[
        "mu", "r", "c0", "epsilon0", "epsilon1", "replicas", "breaches", "truncated", "phi_k", "phi_n", "phi_freq",
        "phi_lo", "phi_hi", "gamma_k", "gamma_freq", "gamma_lo", "gamma_hi", "lambda_k", "lambda_freq", "lambda_lo",
        "lambda_hi",
    ];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailSampleCsv {
    pub mu: f64,
    pub replica: usize,
    pub seed: u64,
    pub status: ReplicaStatus,
    pub ell: Option<usize>,
    pub animal: Option<usize>,
    pub bad_met: Option<usize>,
    pub good_vacant_met: Option<usize>,
    pub phi_sup: Option<usize>,
    pub phi_event: Option<bool>,
    pub gamma_event: Option<bool>,
    pub lambda_event: Option<bool>,
    pub red_events: u64,
}

impl From<&TailSample> for TailSampleCsv {
    fn from(s: &TailSample) -> Self {
        TailSampleCsv {
            mu: s.mu,
            replica: s.replica,
            seed: s.seed,
            status: s.status,
            ell: s.counts.map(|c| c.ell),
            animal: s.counts.map(|c| c.animal),
            bad_met: s.counts.map(|c| c.bad_met),
            good_vacant_met: s.counts.map(|c| c.good_vacant_met),
            phi_sup: s.counts.and_then(|c| c.phi_sup),
            phi_event: s.events.map(|e| e.phi),
            gamma_event: s.events.map(|e| e.gamma),
            lambda_event: s.events.map(|e| e.lambda),
            red_events: s.red_events,
        }
    }
}

impl TableRow for TailSampleCsv {
    const SCHEMA: &'static str = "rwdre.tail_samples.v1";
    const HEADER: &'static [&'static str] = &[
        "mu", "replica", "seed", "status", "ell", "animal", "bad_met", "good_vacant_met", "phi_sup", "phi_event",
        "gamma_event", "lambda_event", "red_events",
    ];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageCsv {
    pub r: u32,
    pub c0: u64,
    pub delta: i64,
    pub trials: u64,
    pub f_uniform: f64,
    pub f_uniform_lo: f64,
    pub f_uniform_hi: f64,
    pub f_corner: f64,
    pub f_corner_lo: f64,
    pub f_corner_hi: f64,
    pub f_used: f64,
    pub eps1: f64,
    pub mu1: Option<f64>,
    pub loop_uncovered: Option<u64>,
    pub loop_trials: Option<u64>,
    pub loop_rate: Option<f64>,
    pub loop_se: Option<f64>,
    pub loop_passes: Option<bool>,
}

impl TableRow for CoverageCsv {
    const SCHEMA: &'static str = "rwdre.coverage.v1";
    const HEADER: &'static [&'static str] = &[
        "r", "c0", "delta", "trials", "f_uniform", "f_uniform_lo", "f_uniform_hi", "f_corner", "f_corner_lo",
        "f_corner_hi", "f_used", "eps1", "mu1", "loop_uncovered", "loop_trials", "loop_rate", "loop_se",
        "loop_passes",
    ];
}

/// Writes `rows` under a schema line and a header, even when `rows` is empty.
pub fn write_table<T: TableRow, W: Write>(mut out: W, rows: &[T]) -> Result<()> {
    writeln!(out, "# schema={}", T::SCHEMA).map_err(|e| Error::io("<table>", e))?;
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(T::HEADER)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io("<table>", e))?;
    Ok(())
}

/// Reads a table written by [`write_table`], checking its schema line.
pub fn read_table<T: TableRow, R: std::io::Read>(input: R) -> Result<Vec<T>> {
    let mut text = String::new();
    let mut input = input;
    input.read_to_string(&mut text).map_err(|e| Error::io("<table>", e))?;
    let (first, rest) = text.split_once('\n').unwrap_or((text.as_str(), ""));
    let schema = first.strip_prefix("# schema=").map(str::trim);
    if schema != Some(T::SCHEMA) {
        return Err(Error::Parse(format!("expected schema {}, found `{first}`", T::SCHEMA)));
    }
    let mut r = csv::ReaderBuilder::new().from_reader(rest.as_bytes());
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != T::HEADER {
        return Err(Error::Parse(format!("unexpected header {header:?}")));
    }
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

/// A file written by [`emit_outputs`] and its SHA-256.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileEntry {
    pub name: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema: String,
    pub preset: Preset,
    pub spec_hash: String,
    pub seed: u64,
    pub seed_rule: String,
    /// Seeds of the first replicas, for spot checks of the rule.
    pub first_replica_seeds: Vec<u64>,
    pub code_version: String,
    pub created_unix: u64,
    pub runtime_seconds: f64,
    pub counts: ReplicaCounts,
    pub unreliable: bool,
    pub truncated: bool,
    pub spec: ExperimentSpec,
    pub files: Vec<FileEntry>,
}

fn write_file(dir: &Path, name: &str, bytes: &[u8], files: &mut Vec<FileEntry>) -> Result<PathBuf> {
    let path = dir.join(name);
    fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
    files.push(FileEntry {
        name: name.to_string(),
        sha256: hex::encode(Sha256::digest(bytes)),
    });
    Ok(path)
}

fn table_bytes<T: TableRow>(rows: &[T]) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    write_table(&mut buf, rows)?;
    Ok(buf)
}

/// Writes every result file of `result` to `dir` and returns their paths, the
/// manifest last.
pub fn emit_outputs(result: &RunResult, spec: &ExperimentSpec, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let name = result.preset.name();
    let mut files = Vec::new();
    let mut paths = Vec::new();
    let mut tables: Vec<(String, Vec<u8>)> = Vec::new();
    match &result.body {
        ResultBody::Walk { records, rows } => {
            tables.push((format!("{name}.csv"), table_bytes(rows)?));
            let reps: Vec<ReplicaCsv> = records.iter().map(ReplicaCsv::from).collect();
            tables.push(("replicas.csv".into(), table_bytes(&reps)?));
        }
        ResultBody::Phase { records, rows } => {
            tables.push((format!("{name}.csv"), table_bytes(rows)?));
            let reps: Vec<ReplicaCsv> = records.iter().map(ReplicaCsv::from).collect();
            tables.push(("replicas.csv".into(), table_bytes(&reps)?));
        }
        ResultBody::Tails(report) => {
            let rows: Vec<TailRowCsv> = report.rows.iter().map(TailRowCsv::from).collect();
            tables.push((format!("{name}.csv"), table_bytes(&rows)?));
            let samples: Vec<TailSampleCsv> = report.samples.iter().map(TailSampleCsv::from).collect();
            tables.push(("tail_samples.csv".into(), table_bytes(&samples)?));
        }
        ResultBody::Coverage(c) => {
            let cl = c.closed_loop.as_ref();
            let row = CoverageCsv {
                r: c.f.r,
                c0: c.f.c0,
                delta: c.f.delta,
                trials: c.f.uniform.trials,
                f_uniform: c.f.uniform.estimate,
                f_uniform_lo: c.f.uniform.lo,
                f_uniform_hi: c.f.uniform.hi,
                f_corner: c.f.corner.estimate,
                f_corner_lo: c.f.corner.lo,
                f_corner_hi: c.f.corner.hi,
                f_used: c.f_used,
                eps1: c.eps1,
                mu1: c.mu1,
                loop_uncovered: cl.map(|l| l.conditional.successes),
                loop_trials: cl.map(|l| l.conditional.trials),
                loop_rate: cl.map(|l| l.conditional.estimate),
                loop_se: cl.map(|l| l.conditional.se()),
                loop_passes: cl.map(|l| l.passes),
            };
            tables.push((format!("{name}.csv"), table_bytes(&[row])?));
        }
        ResultBody::Constants(report) => {
            tables.push((format!("{name}.csv"), table_bytes(&report.rows)?));
        }
    }
    for (file, bytes) in &tables {
        paths.push(write_file(dir, file, bytes, &mut files)?);
    }
    let summary = serde_json::to_vec_pretty(result)?;
    paths.push(write_file(dir, "summary.json", &summary, &mut files)?);
    let script = plot_script(result.preset);
    paths.push(write_file(dir, &format!("plot_{name}.py"), script.as_bytes(), &mut files)?);

    let manifest = Manifest {
        schema: MANIFEST_SCHEMA.to_string(),
        preset: result.preset,
        spec_hash: result.spec_hash.clone(),
        seed: result.seed,
        seed_rule: SEED_RULE.to_string(),
        first_replica_seeds: (0..spec.replicas.min(4) as u64).map(|i| replica_seed(spec.seed, i)).collect(),
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        created_unix: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
        runtime_seconds: result.runtime_seconds,
        counts: result.counts,
        unreliable: result.unreliable,
        truncated: result.truncated(),
        spec: spec.clone(),
        files,
    };
    let path = dir.join("manifest.json");
    let bytes = serde_json::to_vec_pretty(&manifest)?;
    fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
    paths.push(path);
    Ok(paths)
}

const PLOT_PRELUDE: &str = r##"#!/usr/bin/env python3
import csv
import sys
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

HERE = Path(__file__).resolve().parent


def table(name):
    with open(HERE / name, newline="") as fh:
        lines = [l for l in fh if not l.startswith("#")]
    rows = list(csv.DictReader(lines))
    for r in rows:
        for k, v in r.items():
            try:
                r[k] = float(v)
            except (TypeError, ValueError):
                pass
    return rows


"##;

/// A matplotlib script that reads only the CSV files next to it.
pub fn plot_script(preset: Preset) -> String {
    let body = match preset {
        Preset::SingleRun => {
            r##"rows = table("replicas.csv")
speeds = [r["speed"] for r in rows if r["status"] == "ok"]
fig, ax = plt.subplots()
ax.hist(speeds, bins=30)
ax.set_xlabel("speed")
ax.set_ylabel("replicas")
fig.savefig(HERE / "single_run.png", dpi=120)
"##
        }
        Preset::SpeedCurve => {
            r##"rows = table("speed_curve.csv")
mu = [r["mu"] for r in rows]
fig, ax = plt.subplots()
ax.errorbar(mu, [r["v"] for r in rows], yerr=[r["v_hi"] - r["v"] for r in rows], fmt="o-", label="speed")
ax.plot(mu, [r["v_predicted"] for r in rows], "x--", label="occupancy drift")
ax.set_xscale("log")
ax.set_xlabel("density")
ax.set_ylabel("speed")
ax.legend()
fig.savefig(HERE / "speed_curve.png", dpi=120)
"##
        }
        Preset::RhoCurve => {
            r##"rows = table("rho_curve.csv")
mu = [r["mu"] for r in rows]
fig, ax = plt.subplots()
ax.errorbar(mu, [r["rho"] for r in rows], yerr=[r["rho_hi"] - r["rho"] for r in rows], fmt="o-", label="time fraction")
ax.plot(mu, [r["rho_jumps"] for r in rows], "x--", label="jump fraction")
ax.set_xscale("log")
ax.set_xlabel("density")
ax.set_ylabel("occupied fraction")
ax.legend()
fig.savefig(HERE / "rho_curve.png", dpi=120)
"##
        }
        Preset::StaticSolomon => {
            r##"rows = table("static_solomon.csv")
fig, ax = plt.subplots()
for p in sorted({r["p"] for r in rows}):
    sub = [r for r in rows if r["p"] == p]
    for t in sorted({r["t"] for r in sub}):
        s = [r for r in sub if r["t"] == t]
        ax.errorbar([r["mu"] for r in s], [r["v"] for r in s], yerr=[r["v_hi"] - r["v"] for r in s],
                    fmt="o-", label=f"p={p:g}, t={t:g}")
    ax.axvline(sub[0]["mu_minus"], ls=":", c="grey")
    ax.axvline(sub[0]["mu_plus"], ls=":", c="grey")
ax.axhline(0.0, c="k", lw=0.5)
ax.set_xscale("log")
ax.set_xlabel("density")
ax.set_ylabel("speed (frozen field)")
ax.legend()
fig.savefig(HERE / "static_solomon.png", dpi=120)
"##
        }
        Preset::BlockTails => {
            r##"rows = table("block_tails.csv")
mu = [r["mu"] for r in rows]
fig, ax = plt.subplots()
for ev in ("phi", "gamma", "lambda"):
    f = [r[f"{ev}_freq"] for r in rows]
    err = [[r[f"{ev}_freq"] - r[f"{ev}_lo"] for r in rows], [r[f"{ev}_hi"] - r[f"{ev}_freq"] for r in rows]]
    ax.errorbar(mu, f, yerr=err, fmt="o-", label=ev)
ax.set_xlabel("density")
ax.set_ylabel("event frequency")
ax.legend()
fig.savefig(HERE / "block_tails.png", dpi=120)
"##
        }
        Preset::CoverageProbe | Preset::FEstimate => {
            r##"name = "coverage_probe.csv" if (HERE / "coverage_probe.csv").exists() else "f_estimate.csv"
rows = table(name)
r = rows[0]
fig, ax = plt.subplots()
ax.bar(["uniform", "corner"], [r["f_uniform"], r["f_corner"]],
       yerr=[[r["f_uniform"] - r["f_uniform_lo"], r["f_corner"] - r["f_corner_lo"]],
             [r["f_uniform_hi"] - r["f_uniform"], r["f_corner_hi"] - r["f_corner"]]])
ax.set_ylabel("coverage probability")
fig.savefig(HERE / (name[:-4] + ".png"), dpi=120)
"##
        }
        Preset::ConstantsReport => {
            r##"rows = table("constants_report.csv")
r = [x["r"] for x in rows]
fig, ax = plt.subplots()
ax.plot(r, [x["const3_lhs"] - x["const3_rhs"] for x in rows], "o-", label="scale condition margin")
ax.plot(r, [x["const4_log_lhs"] for x in rows], "s-", label="log of density condition")
ax.axhline(0.0, c="k", lw=0.5)
ax.set_xlabel("r")
ax.legend()
fig.savefig(HERE / "constants_report.png", dpi=120)
"##
        }
    };
    format!("{PLOT_PRELUDE}{body}\nif __name__ == \"__main__\":\n    sys.exit(0)\n")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::run::run_experiment;
    use crate::walker::SpeedSign;

    fn header_of<T: Serialize>(row: &T) -> Vec<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.serialize(row).unwrap();
        let text = String::from_utf8(w.into_inner().unwrap()).unwrap();
        text.lines().next().unwrap().split(',').map(str::to_string).collect()
    }

    fn phase_row() -> PhaseRow {
        PhaseRow {
            p: 0.7,
            mu: 0.1,
            t: 100.0,
            replicas: 3,
            ok: 3,
            breaches: 0,
            truncated: 0,
            v: -0.25,
            v_se: 0.01,
            v_lo: -0.3,
            v_hi: -0.2,
            sign: SpeedSign::Negative,
            mu_minus: 0.356675,
            mu_plus: 1.203973,
            predicted: SpeedSign::Negative,
            rho: 0.1,
        }
    }

    #[test]
    fn headers_match_fields() {
        assert_eq!(header_of(&phase_row()), PhaseRow::HEADER);
        let rec = ReplicaRecord {
            point: 0,
            replica: 0,
            seed: 1,
            p: None,
            mu: 1.0,
            t: 1.0,
            status: ReplicaStatus::Ok,
            speed: vec![0.1],
            rho_time: Some(0.5),
            rho_jumps: None,
            residual_over_t: vec![0.0],
            ell: Some(3),
            red_events: 9,
        };
        assert_eq!(header_of(&ReplicaCsv::from(&rec)), ReplicaCsv::HEADER);
        let row = ConstantsRow {
            r: 1,
            const3_lhs: 0.0,
            const3_rhs: 0.0,
            const3_ok: true,
            const4_log_lhs: 0.0,
            const4_ok: true,
        };
        assert_eq!(header_of(&row), ConstantsRow::HEADER);
    }

    #[test]
    fn empty_table_is_header_only() {
        let bytes = table_bytes::<PhaseRow>(&[]).unwrap();
        let text = String::from_utf8(bytes.clone()).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert!(read_table::<PhaseRow, _>(&bytes[..]).unwrap().is_empty());
    }

    #[test]
    fn table_round_trip() {
        let rows = vec![phase_row(), PhaseRow { mu: 2.0, ..phase_row() }];
        let bytes = table_bytes(&rows).unwrap();
        assert_eq!(read_table::<PhaseRow, _>(&bytes[..]).unwrap(), rows);
        assert!(read_table::<SpeedRow, _>(&bytes[..]).is_err());
    }

    #[test]
    fn rerun_is_byte_identical() {
        let mut spec = ExperimentSpec::new(Preset::SpeedCurve);
        spec.t = 40.0;
        spec.replicas = 3;
        spec.grid.mu = vec![0.5, 2.0];
        spec.workers = Some(2);
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        emit_outputs(&run_experiment(&spec).unwrap(), &spec, a.path()).unwrap();
        emit_outputs(&run_experiment(&spec).unwrap(), &spec, b.path()).unwrap();
        for f in ["speed_curve.csv", "replicas.csv", "summary.json", "plot_speed_curve.py"] {
            let x = fs::read(a.path().join(f)).unwrap();
            let y = fs::read(b.path().join(f)).unwrap();
            assert_eq!(x, y, "{f} differs");
        }
        let rows: Vec<SpeedRow> = read_table(&fs::read(a.path().join("speed_curve.csv")).unwrap()[..]).unwrap();
        let ResultBody::Walk { rows: mem, .. } = run_experiment(&spec).unwrap().body else { panic!() };
        assert_eq!(rows, mem);
        let m: Manifest = serde_json::from_slice(&fs::read(a.path().join("manifest.json")).unwrap()).unwrap();
        assert_eq!(m.spec, spec);
        assert_eq!(m.files.len(), 4);
    }
}
