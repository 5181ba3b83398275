//! Persist a green path as CSV plus a JSON sidecar and reload it.

use rwdre::model::ModelConfig;
use rwdre::walker::{read_path_csv, run_replica, write_path_csv, Engine, PathSidecar};

fn main() -> rwdre::Result<()> {
    let config = ModelConfig::solomon(0.7, 1.0)?;
    let rep = run_replica(&config, 100.0, 4, Engine::Local, None, None)?;
    let mut csv = Vec::new();
    write_path_csv(&mut csv, &rep.path)?;
    let sidecar = PathSidecar::new(&rep.path, &rep.trace, "example", 4);
    let json = serde_json::to_string_pretty(&sidecar).expect("sidecar serializes");
    let back = read_path_csv(&csv[..], &sidecar)?;
    assert_eq!(back.positions, rep.path.positions);
    println!("{json}");
    println!("{} csv bytes, {} jumps round-tripped", csv.len(), back.jumps());
    Ok(())
}
