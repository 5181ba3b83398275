use std::collections::{BTreeSet, HashMap};

use petgraph::unionfind::UnionFind;

use super::geometry::BlockGeometry;
use crate::walker::GreenPath;

/// Blocks `(i, j)` met by the space-time graph of a 1-d path on `[0, horizon)`.
pub fn visited_blocks(path: &GreenPath, geometry: BlockGeometry) -> BTreeSet<(i64, i64)> {
    let d = geometry.delta as f64;
    let mut out = BTreeSet::new();
    for (t0, t1, x) in path.holding_intervals_1d() {
        if t1 <= t0 {
            continue;
        }
        let i = geometry.column_of(x);
        let j0 = (t0 / d).floor() as i64;
        // Last layer j with j * D < t1.
        let j1 = (t1 / d).ceil() as i64 - 1;
        for j in j0..=j1 {
            out.insert((i, j));
        }
    }
    out
}

/// The visited-block set together with its structural checks.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeAnimal {
    pub blocks: BTreeSet<(i64, i64)>,
    pub connected: bool,
    pub contains_origin: bool,
    /// `jumps + floor(t / D) + 1`.
    pub size_bound: usize,
}

impl LatticeAnimal {
    pub fn size(&self) -> usize {
        self.blocks.len()
    }

    pub fn within_bound(&self) -> bool {
        self.size() <= self.size_bound
    }
}

/// Whether a set of lattice points is connected under nearest-neighbour adjacency.
pub fn is_connected(points: &BTreeSet<(i64, i64)>) -> bool {
    if points.is_empty() {
        return true;
    }
    let index: HashMap<(i64, i64), usize> = points.iter().enumerate().map(|(k, &p)| (p, k)).collect();
    let mut uf = UnionFind::<usize>::new(points.len());
    for (&(i, j), &k) in &index {
        for nb in [(i + 1, j), (i, j + 1)] {
            if let Some(&m) = index.get(&nb) {
                uf.union(k, m);
            }
        }
    }
    let root = uf.find(0);
    (1..points.len()).all(|k| uf.find(k) == root)
}

pub fn lattice_animal(path: &GreenPath, geometry: BlockGeometry) -> LatticeAnimal {
    let blocks = visited_blocks(path, geometry);
    let connected = is_connected(&blocks);
    let contains_origin = blocks.contains(&(0, 0));
    let size_bound = path.jumps() + (path.horizon / geometry.delta as f64).floor() as usize + 1;
    LatticeAnimal {
        blocks,
        connected,
        contains_origin,
        size_bound,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(times: &[f64], xs: &[i64], horizon: f64) -> GreenPath {
        GreenPath {
            dim: 1,
            horizon,
            jump_times: times.to_vec(),
            positions: xs.to_vec(),
            saw_red: vec![false; times.len()],
            occupied_time: 0.0,
        }
    }

    #[test]
    fn stationary_three_layers() {
        let g = BlockGeometry::new(64, 2);
        let a = lattice_animal(&path(&[], &[], 192.0), g);
        let want: BTreeSet<_> = [(0, 0), (0, 1), (0, 2)].into_iter().collect();
        assert_eq!(a.blocks, want);
        assert!(a.connected && a.contains_origin && a.within_bound());
    }

    #[test]
    fn crossing_columns() {
        let g = BlockGeometry::new(2, 1);
        let p = path(&[0.5, 1.0, 3.5], &[-1, -2, -3], 4.0);
        let a = lattice_animal(&p, g);
        let want: BTreeSet<_> = [(0, 0), (-1, 0), (-1, 1), (-2, 1)].into_iter().collect();
        assert_eq!(a.blocks, want);
        assert!(a.connected);
    }

    #[test]
    fn disconnected_set() {
        let s: BTreeSet<_> = [(0, 0), (2, 0)].into_iter().collect();
        assert!(!is_connected(&s));
    }
}
