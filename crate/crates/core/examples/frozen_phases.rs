//! Frozen field: sign of the speed below, between and above the two critical
//! densities of the Solomon walk.

use rwdre::model::solomon_critical_densities;
use rwdre::walker::run_static_solomon;

fn main() -> rwdre::Result<()> {
    let p = 0.7;
    let (lo, hi) = solomon_critical_densities(p)?;
    println!("p = {p}: speed < 0 for mu < {lo:.4}, > 0 for mu > {hi:.4}");
    for mu in [0.1, 0.3, 0.5, 0.7, 1.0, 1.5, 2.0] {
        let s = run_static_solomon(p, mu, 1e5, 32, 11)?;
        println!(
            "mu = {mu:>4}: v = {:+.5} ± {:.5}  sign {}  (breaches {})",
            s.mean_speed,
            s.se,
            s.sign.symbol(),
            s.breaches
        );
    }
    Ok(())
}
