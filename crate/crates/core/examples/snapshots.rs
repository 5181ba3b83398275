//! Write field snapshots in a window, read them back and compare.

use rwdre::environment::{read_snapshots, write_snapshots, ParticleField, SnapshotMeta};
use rwdre::lattice::SiteRange;
use rwdre::model::ModelConfig;

fn main() -> rwdre::Result<()> {
    let mu = 1.5;
    let config = ModelConfig::solomon(0.7, mu)?;
    let mut field = ParticleField::init_poisson(&config, 100, 9)?;
    let window = SiteRange::interval(-10, 10);
    let mut snaps = Vec::new();
    for t in [0.0, 1.0, 5.0] {
        field.advance_to(t)?;
        snaps.push(field.snapshot_window(&window)?);
    }
    let meta = SnapshotMeta {
        dim: 1,
        radius: 100,
        mu,
        seed: 9,
    };
    let mut buf = Vec::new();
    write_snapshots(&mut buf, &meta, &snaps).expect("writing to memory");
    let (meta2, back) = read_snapshots(&buf[..])?;
    assert_eq!(meta2, meta);
    assert_eq!(back, snaps);
    for s in &back {
        println!("t = {:>3}: {} particles in [-10, 10]", s.time, s.total());
    }
    print!("{}", String::from_utf8_lossy(&buf[..buf.len().min(200)]));
    Ok(())
}
