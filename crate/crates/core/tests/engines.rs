//! Cross-checks between the two field engines and the green walker.

use rwdre::environment::{EventLog, ParticleField};
use rwdre::lattice::Torus;
use rwdre::model::{Kernel, ModelConfig};
use rwdre::rng::replica_seed;
use rwdre::stats::ks_two_sample;
use rwdre::walker::{rho_hat, run_replica, simulate_green, Engine};

fn samples(engine: Engine, mu: f64, t: f64, n: u64, base: u64) -> (Vec<f64>, Vec<f64>) {
    let config = ModelConfig::solomon(0.7, mu).unwrap();
    (0..n)
        .map(|k| {
            let rep = run_replica(&config, t, replica_seed(base, k), engine, Some(200), None).unwrap();
            (rep.path.final_position()[0] as f64, rho_hat(&rep.path))
        })
        .unzip()
}

#[test]
fn lazy_and_full_torus_agree_in_law() {
    for (mu, base) in [(0.5, 11), (2.0, 12)] {
        let (x_local, rho_local) = samples(Engine::Local, mu, 60.0, 400, base);
        let (x_torus, rho_torus) = samples(Engine::Torus, mu, 60.0, 400, base + 100);
        let (d, p) = ks_two_sample(&x_local, &x_torus);
        assert!(p > 1e-3, "final position at mu = {mu}: KS D = {d:.3}, p = {p:.2e}");
        let (d, p) = ks_two_sample(&rho_local, &rho_torus);
        assert!(p > 1e-3, "occupied fraction at mu = {mu}: KS D = {d:.3}, p = {p:.2e}");
    }
}

#[test]
fn equal_kernels_make_the_field_irrelevant() {
    let k = Kernel::nearest_neighbor_1d(0.7).unwrap();
    let reference = {
        let config = ModelConfig::new(k.clone(), k.clone(), 0.0).unwrap();
        run_replica(&config, 200.0, 5, Engine::Local, None, None).unwrap().path
    };
    for mu in [0.5, 3.0] {
        let config = ModelConfig::new(k.clone(), k.clone(), mu).unwrap();
        for engine in [Engine::Local, Engine::Torus] {
            let path = run_replica(&config, 200.0, 5, engine, Some(300), None).unwrap().path;
            assert_eq!(path.jump_times, reference.jump_times);
            assert_eq!(path.positions, reference.positions);
        }
    }
}

/// Replays `log` and returns, for each holding interval `[a, b)` at site `x`, the
/// occupancy at time `a` and the time in `[a, b)` during which `x` is occupied.
fn replay_holding(log: &EventLog, torus: &Torus, holds: &[(f64, f64, i64)]) -> Vec<(bool, f64)> {
    let mut counts = vec![0u32; torus.volume() as usize];
    for &s in &log.initial {
        counts[s as usize] += 1;
    }
    let mut events = log.events.iter().peekable();
    let mut out = Vec::new();
    for &(a, b, x) in holds {
        while let Some(e) = events.next_if(|e| e.time < a) {
            counts[e.from as usize] -= 1;
            counts[e.to as usize] += 1;
        }
        let site = torus.index1(x) as usize;
        let at_start = counts[site] > 0;
        let (mut occupied, mut since) = (0.0, a);
        while let Some(e) = events.next_if(|e| e.time < b) {
            if counts[site] > 0 {
                occupied += e.time - since;
            }
            since = e.time;
            counts[e.from as usize] -= 1;
            counts[e.to as usize] += 1;
        }
        if counts[site] > 0 {
            occupied += b - since;
        }
        out.push((at_start, occupied));
    }
    out
}

#[test]
fn recorded_occupancy_matches_the_event_log() {
    let config = ModelConfig::solomon(0.7, 1.0).unwrap();
    let mut field = ParticleField::init_poisson(&config, 60, 21).unwrap();
    field.start_log();
    let (path, _) = simulate_green(&mut field, &config, 40.0, 21).unwrap();
    let log = field.take_log().unwrap();
    let torus = Torus::new(1, 60).unwrap();
    assert!(path.jumps() > 10);
    let holds = path.holding_intervals_1d();
    let replay = replay_holding(&log, &torus, &holds);
    // The departure site of jump k is the site held just before it, seen at the jump time.
    let mut counts_at_jump = Vec::new();
    for k in 0..path.jumps() {
        let (_, b, x) = holds[k];
        let after = replay_holding(&log, &torus, &[(b, b + 1e-12, x)]);
        counts_at_jump.push(after[0].0);
    }
    assert_eq!(path.saw_red, counts_at_jump);
    let total: f64 = replay.iter().map(|r| r.1).sum();
    assert!(
        (total - path.occupied_time).abs() < 1e-9,
        "replayed occupied time {total} vs recorded {}",
        path.occupied_time
    );
}
