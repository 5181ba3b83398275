//! Build an experiment spec, save it as TOML, run it and write the result
//! tables, summary, plot script and manifest to a directory.
//!
//! cargo run --release --example experiment_files -- out/example

use std::path::PathBuf;

use rwdre::harness::{emit_outputs, run_experiment, ExperimentSpec, Preset};

fn main() -> rwdre::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "out/example".into()));
    let mut spec = ExperimentSpec::new(Preset::SpeedCurve);
    spec.replicas = 6;
    spec.t = 300.0;
    spec.grid.mu = vec![0.5, 4.0];
    std::fs::create_dir_all(&dir).map_err(|e| rwdre::Error::io(&dir, e))?;
    let toml = spec.to_toml_string()?;
    std::fs::write(dir.join("spec.toml"), &toml).map_err(|e| rwdre::Error::io(&dir, e))?;
    let again = ExperimentSpec::from_toml_str(&toml)?;
    assert_eq!(again.hash(), spec.hash());
    let result = run_experiment(&spec)?;
    for p in emit_outputs(&result, &spec, &dir)? {
        println!("wrote {}", p.display());
    }
    Ok(())
}
