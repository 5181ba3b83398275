//! Occupied-time and occupied-at-jump fractions over densities.
//!
//! The two estimators agree in law because the clock is independent of the field.

use rwdre::harness::{run_experiment, ExperimentSpec, Preset, ResultBody};

fn main() -> rwdre::Result<()> {
    let mut spec = ExperimentSpec::new(Preset::RhoCurve);
    spec.replicas = 12;
    spec.t = 800.0;
    spec.grid.mu = vec![0.1, 0.5, 1.0, 2.0, 4.0];
    let result = run_experiment(&spec)?;
    if let ResultBody::Walk { rows, .. } = &result.body {
        println!("{:>5} {:>13} {:>13} {:>9}", "mu", "rho (time)", "rho (jumps)", "1-e^-mu");
        for r in rows {
            println!(
                "{:>5} {:>7.4}±{:.4} {:>7.4}±{:.4} {:>9.4}",
                r.mu,
                r.rho,
                r.rho_se,
                r.rho_jumps,
                r.rho_jumps_se,
                -(-r.mu).exp_m1()
            );
        }
    }
    Ok(())
}
