//! The lazy local field against the full-torus simulation: same law, very
//! different cost.

use std::time::Instant;

use rwdre::model::ModelConfig;
use rwdre::rng::replica_seed;
use rwdre::stats::ks_two_sample;
use rwdre::walker::{run_replica, Engine};

fn main() -> rwdre::Result<()> {
    let config = ModelConfig::solomon(0.7, 2.0)?;
    let t = 200.0;
    for engine in [Engine::Local, Engine::Torus] {
        let start = Instant::now();
        let mut events = 0;
        let mut xs = Vec::new();
        for k in 0..100 {
            let rep = run_replica(&config, t, replica_seed(8, k), engine, None, None)?;
            events += rep.red_events;
            xs.push(rep.path.final_position()[0] as f64);
        }
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        println!(
            "{engine:?}: mean X_t / t = {:+.4}, {events} field events, {:.2}s",
            mean / t,
            start.elapsed().as_secs_f64()
        );
    }
    let sample = |engine, base| -> rwdre::Result<Vec<f64>> {
        (0..200)
            .map(|k| Ok(run_replica(&config, 50.0, replica_seed(base, k), engine, Some(150), None)?.path.final_position()[0] as f64))
            .collect()
    };
    let (d, p) = ks_two_sample(&sample(Engine::Local, 1)?, &sample(Engine::Torus, 2)?);
    println!("KS on X_50: D = {d:.3}, p = {p:.3}");
    Ok(())
}
