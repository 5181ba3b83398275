//! Frequencies of the three block tail events at two densities.

use rwdre::model::ModelConfig;
use rwdre::renorm::{measure_proposition_tails, RenormParams, StreamOptions, TheoremParameters};

fn main() -> rwdre::Result<()> {
    let base = ModelConfig::solomon(0.7, 1.0)?;
    let params = RenormParams::new(2, 0.1, 1, 1.0)?;
    let theorem = TheoremParameters::default();
    let report = measure_proposition_tails(&base, &params, &theorem, 1000.0, &[1.0, 8.0], 8, 5, &StreamOptions::default())?;
    for r in &report.rows {
        println!(
            "mu = {:>4}: phi {:.3}, gamma {:.3}, lambda {:.3} ({} replicas, {} breaches)",
            r.mu, r.phi.estimate, r.gamma.estimate, r.lambda.estimate, r.replicas, r.breaches
        );
    }
    Ok(())
}
