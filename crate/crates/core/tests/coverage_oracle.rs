//! Coverage probability and streamed runs against independent references.

use rand::Rng;
use rand_distr::{Distribution, Exp};
use rwdre::environment::ParticleField;
use rwdre::model::ModelConfig;
use rwdre::renorm::{classify_with_threshold, estimate_f_r, stream_classify, BlockGrid, RenormParams, StreamOptions};
use rwdre::rng::{replica_seed, rng_from_seed};
use rwdre::stats::ks_two_sample;

/// Eight rate-one symmetric walkers started at `sites`; is site 0 occupied for all of `[1, 2)`?
fn covered_directly(sites: &[i64], rng: &mut impl Rng) -> bool {
    let mut pos = sites.to_vec();
    let n = pos.len();
    let clock = Exp::new(n as f64).unwrap();
    let mut t = 0.0;
    loop {
        let dt = clock.sample(rng);
        let next = t + dt;
        let here = pos.iter().any(|&x| x == 0);
        // The state is constant on [t, next); it matters where it meets [1, 2).
        if next > 1.0 && t < 2.0 && !here {
            return false;
        }
        if next >= 2.0 {
            return true;
        }
        t = next;
        let k = rng.random_range(0..n);
        pos[k] += if rng.random_bool(0.5) { 1 } else { -1 };
    }
}

#[test]
fn f_at_unit_scale_matches_a_direct_simulation() {
    let params = RenormParams::new(16, 0.1, 0, 1.0).unwrap();
    let n = 20_000u64;
    let est = estimate_f_r(&params, n as usize, 31).unwrap();
    let mut rng = rng_from_seed(32);
    let mut uniform = 0u64;
    let mut corner = 0u64;
    for _ in 0..n {
        let sites: Vec<i64> = (0..8).map(|_| rng.random_range(-3..4)).collect();
        uniform += covered_directly(&sites, &mut rng) as u64;
        corner += covered_directly(&[-3; 8], &mut rng) as u64;
    }
    for (name, lib, direct) in [
        ("uniform", est.uniform.estimate, uniform as f64 / n as f64),
        ("corner", est.corner.estimate, corner as f64 / n as f64),
    ] {
        let se = ((lib * (1.0 - lib) + direct * (1.0 - direct)) / n as f64).sqrt().max(1e-4);
        assert!(
            (lib - direct).abs() < 4.0 * se,
            "{name}: library {lib:.4}, direct {direct:.4}, se {se:.4}"
        );
    }
}

#[test]
fn streamed_labels_have_the_law_of_batch_labels() {
    let mu = 6.0;
    let config = ModelConfig::solomon(0.7, mu).unwrap();
    let params = RenormParams::new(2, 0.1, 1, mu).unwrap();
    let g = params.geometry();
    let t = 2.0 * g.delta as f64;
    let reps = 150u64;
    let mut streamed = Vec::new();
    let mut batch = Vec::new();
    for k in 0..reps {
        let out = stream_classify(&config, &params, t, replica_seed(41, k), &StreamOptions::default()).unwrap();
        let mut field = ParticleField::init_poisson(&config, 400, replica_seed(42, k)).unwrap();
        field.start_log();
        field.advance_to(3.0 * g.delta as f64).unwrap();
        let log = field.take_log().unwrap();
        let grid = BlockGrid::new(g, t, 0, 0);
        let c = classify_with_threshold(&log, &grid, params.bad_threshold()).unwrap();
        for j in 0..2 {
            streamed.push(out.classification.label(0, j).expect("block under the path").min_u as f64);
            batch.push(c.label(0, j).unwrap().min_u as f64);
        }
    }
    let (d, p) = ks_two_sample(&streamed, &batch);
    assert!(p > 1e-3, "min window count: KS D = {d:.3}, p = {p:.2e}");
}

#[test]
fn streamed_green_path_has_the_law_of_a_plain_replica() {
    use rwdre::walker::{rho_hat, run_replica, Engine};
    let mu = 1.0;
    let config = ModelConfig::solomon(0.7, mu).unwrap();
    let params = RenormParams::new(2, 0.1, 1, mu).unwrap();
    // Several layer boundaries, where the occupancy watch must follow the field.
    let t = 300.0;
    let reps = 200u64;
    let (mut rho_s, mut rho_p) = (Vec::new(), Vec::new());
    for k in 0..reps {
        let out = stream_classify(&config, &params, t, replica_seed(51, k), &StreamOptions::default()).unwrap();
        rho_s.push(rho_hat(&out.path));
        let rep = run_replica(&config, t, replica_seed(52, k), Engine::Local, None, None).unwrap();
        rho_p.push(rho_hat(&rep.path));
    }
    let (d, p) = ks_two_sample(&rho_s, &rho_p);
    assert!(p > 1e-3, "occupied fraction: KS D = {d:.3}, p = {p:.2e}");
}
