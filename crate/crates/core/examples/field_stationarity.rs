//! The Poisson product measure is invariant: chi-square of site counts on the
//! full torus at a few later times.

use rwdre::environment::ParticleField;
use rwdre::model::ModelConfig;
use rwdre::stats::chi_square_poisson;

fn main() -> rwdre::Result<()> {
    let mu = 4.0;
    let radius = 2000;
    let config = ModelConfig::solomon(0.7, mu)?;
    let mut field = ParticleField::init_poisson(&config, radius, 5)?;
    println!("{} particles on {} sites", field.positions().len(), 2 * radius + 1);
    for t in [0.0, 10.0, 50.0, 200.0] {
        field.advance_to(t)?;
        let counts: Vec<u32> = (-radius..=radius).map(|x| field.occupancy(&[x])).collect();
        let (stat, df, p) = chi_square_poisson(&counts, mu);
        println!("t = {t:>5}: chi2 = {stat:7.2} on {df} df, p = {p:.3}");
    }
    Ok(())
}
