//! Command-line behaviour and output reproducibility.

use std::process::Command;

use rand::Rng;
use rwdre::harness::{ExperimentSpec, Preset};
use rwdre::rng::rng_from_seed;

fn rwdre() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rwdre"))
}

fn write_config(dir: &std::path::Path, body: &str) -> std::path::PathBuf {
    let p = dir.join("run.toml");
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let ok = rwdre()
        .args(["simulate", "--replicas", "2", "--seed", "3", "--out"])
        .arg(dir.path().join("a"))
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));

    let bad = rwdre().args(["simulate", "--replicas", "0"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));

    let cfg = write_config(dir.path(), "schema = \"rwdre.config.v0\"\npreset = \"single_run\"\n");
    let old = rwdre().arg("simulate").arg("--config").arg(&cfg).output().unwrap();
    assert_eq!(old.status.code(), Some(2));

    let cfg = write_config(
        dir.path(),
        "schema = \"rwdre.config.v1\"\npreset = \"single_run\"\nt = 200.0\n[model]\np = 0.7\nmu = 4.0\n[run]\nmax_events = 10\n",
    );
    let capped = rwdre()
        .arg("simulate")
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path().join("b"))
        .output()
        .unwrap();
    assert_eq!(capped.status.code(), Some(3), "{}", String::from_utf8_lossy(&capped.stderr));
}

#[test]
fn reruns_are_byte_identical_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, workers: &str| {
        let out = dir.path().join(name);
        let st = rwdre()
            .args(["speed-curve", "--replicas", "4", "--seed", "9", "--workers", workers, "--out"])
            .arg(&out)
            .output()
            .unwrap();
        assert!(st.status.success(), "{}", String::from_utf8_lossy(&st.stderr));
        out
    };
    let a = run("a", "1");
    let b = run("b", "2");
    for f in ["speed_curve.csv", "replicas.csv", "summary.json"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn spec_hash_separates_perturbed_specs() {
    let mut rng = rng_from_seed(77);
    let base = ExperimentSpec::new(Preset::SpeedCurve);
    let mut seen = std::collections::HashSet::new();
    seen.insert(base.hash());
    for k in 0..1000 {
        let mut s = base.clone();
        match k % 6 {
            0 => s.seed = rng.random(),
            1 => s.t = rng.random_range(1.0..1e6),
            2 => s.replicas = rng.random_range(2..1_000_000),
            3 => s.model.mu = rng.random_range(0.0..100.0),
            4 => s.grid.mu = vec![rng.random_range(0.0..64.0)],
            _ => s.renorm.gamma0 = rng.random_range(1e-6..1.0),
        }
        assert!(seen.insert(s.hash()), "collision at perturbation {k}");
        let mut same = s.clone();
        same.workers = Some(7);
        same.out = Some("elsewhere".into());
        assert_eq!(same.hash(), s.hash());
    }
}
