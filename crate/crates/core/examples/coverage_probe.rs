//! Coverage probability f(r), the density threshold mu_1 and the closed-loop
//! check of the coverage failure rate at that threshold.

use rwdre::renorm::{closed_loop, estimate_f_r, mu_1, RenormParams};

fn main() -> rwdre::Result<()> {
    let eps1 = 0.1;
    let params = RenormParams::new(16, 0.1, 0, 1.0)?;
    let f = estimate_f_r(&params, 20_000, 1)?;
    println!(
        "f: uniform {:.4} [{:.4}, {:.4}], corner {:.4} [{:.4}, {:.4}]",
        f.uniform.estimate, f.uniform.lo, f.uniform.hi, f.corner.estimate, f.corner.lo, f.corner.hi
    );
    let mu = mu_1(eps1, f.conservative(), params.gamma0)?;
    println!("mu_1 = {mu:.3}");
    let lp = closed_loop(&params, mu, eps1, 20_000, 2)?;
    println!(
        "P(uncovered | pedestal) = {:.4} ± {:.4} over {} trials: {}",
        lp.conditional.estimate,
        lp.conditional.se(),
        lp.conditional.trials,
        if lp.passes { "within eps_1" } else { "above eps_1" }
    );
    Ok(())
}
