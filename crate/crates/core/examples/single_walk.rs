//! One green trajectory in a dynamic field: speed, occupied fraction and the
//! generator-identity residual.
//!
//! cargo run --release --example single_walk -- [mu] [t] [seed]

use rwdre::model::ModelConfig;
use rwdre::walker::{empirical_speed, martingale_residual, rho_hat, run_replica, Engine};

fn main() -> rwdre::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let mu: f64 = args.first().map_or(2.0, |s| s.parse().expect("mu"));
    let t: f64 = args.get(1).map_or(2000.0, |s| s.parse().expect("t"));
    let seed: u64 = args.get(2).map_or(1, |s| s.parse().expect("seed"));

    let config = ModelConfig::solomon(0.7, mu)?;
    let rep = run_replica(&config, t, seed, Engine::Local, None, None)?;
    let v = empirical_speed(&rep.path)[0];
    let rho = rho_hat(&rep.path);
    let predicted = rho * config.v_occupied()[0] + (1.0 - rho) * config.v_vacant()[0];
    println!("mu = {mu}, t = {t}, jumps = {}", rep.path.jumps());
    println!("X_t / t          = {v:+.5}");
    println!("occupied at jumps= {:.4}", rep.path.saw_red.iter().filter(|&&b| b).count() as f64 / rep.path.jumps().max(1) as f64);
    println!("occupied time    = {rho:.4}");
    println!("rho v' + (1-rho) v'' = {predicted:+.5}");
    println!("residual / t     = {:+.2e}", martingale_residual(&rep.trace, t)[0]);
    println!("field events     = {} ({} particles in the box)", rep.red_events, rep.particles);
    Ok(())
}
