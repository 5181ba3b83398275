//! Bad-block count along a path and its supremum over the path class.

use rwdre::model::ModelConfig;
use rwdre::renorm::{phi_r, phi_sup_dp, stream_classify, PhiDomain, RenormParams, StreamOptions, DEFAULT_STATE_BUDGET};

fn main() -> rwdre::Result<()> {
    let mu = 1.5;
    let config = ModelConfig::solomon(0.7, mu)?;
    let params = RenormParams::new(2, 0.1, 1, mu)?;
    let t = 640.0;
    let out = stream_classify(&config, &params, t, 23, &StreamOptions::default())?;
    let ell = out.path.jumps();
    let domain = PhiDomain::from_labels(&out.classification, out.layers);
    println!("{} labelled blocks, {} bad", out.classification.labels.len(), out.classification.bad_count());
    println!("this path meets {} bad blocks", phi_r(&out.path, &out.classification));
    for budget in [ell / 4, ell / 2, ell] {
        let sup = phi_sup_dp(&domain, budget, DEFAULT_STATE_BUDGET)?;
        println!("sup over paths with <= {budget} jumps: {sup}");
    }
    Ok(())
}
