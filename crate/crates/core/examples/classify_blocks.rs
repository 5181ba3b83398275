//! Classify r-blocks from a full-torus event log and write the labels as CSV.

use rwdre::environment::ParticleField;
use rwdre::model::ModelConfig;
use rwdre::renorm::{classify_blocks, BlockGrid, RenormParams};

fn main() -> rwdre::Result<()> {
    let mu = 8.0;
    let params = RenormParams::new(2, 0.1, 1, mu)?;
    let g = params.geometry();
    println!("block side {}, window {}, bad below {} particles", g.delta, g.window, params.bad_threshold());
    let grid = BlockGrid::new(g, 4.0 * g.delta as f64, -2, 2);
    let (_, end) = grid.field_span();
    let config = ModelConfig::solomon(0.7, mu)?;
    let mut field = ParticleField::init_poisson(&config, 7 * g.delta, 17)?;
    field.start_log();
    field.advance_to(end)?;
    let log = field.take_log().expect("logging was started");
    println!("{} events logged", log.events.len());
    let c = classify_blocks(&log, &grid, &params)?;
    for j in (0..grid.layers).rev() {
        let row: String = (grid.i_lo..=grid.i_hi)
            .map(|i| match c.label(i, j) {
                Some(l) if l.bad => 'B',
                Some(l) if !l.occupied => 'v',
                Some(_) => '.',
                None => ' ',
            })
            .collect();
        println!("layer {j}: {row}");
    }
    c.write_csv(params.r, std::io::stdout().lock())?;
    Ok(())
}
