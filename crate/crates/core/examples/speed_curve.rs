//! Speed against density for the dynamic field, through the experiment harness.
//!
//! cargo run --release --example speed_curve

use rwdre::harness::{run_experiment, ExperimentSpec, Preset, ResultBody};

fn main() -> rwdre::Result<()> {
    let mut spec = ExperimentSpec::new(Preset::SpeedCurve);
    spec.seed = 3;
    spec.replicas = 16;
    spec.t = 1000.0;
    spec.grid.mu = vec![0.25, 1.0, 4.0, 16.0];
    let result = run_experiment(&spec)?;
    let ResultBody::Walk { rows, .. } = &result.body else {
        unreachable!("speed_curve yields walk rows")
    };
    println!("{:>6} {:>9} {:>16} {:>7} {:>9}", "mu", "v", "95% CI", "rho", "gap");
    for r in rows {
        println!(
            "{:>6} {:>+9.4} [{:+.4}, {:+.4}] {:>7.4} {:>+9.1e}",
            r.mu, r.v, r.v_lo, r.v_hi, r.rho, r.gap
        );
    }
    println!("breach rate {:.3}, {:.1}s", result.breach_rate, result.runtime_seconds);
    Ok(())
}
