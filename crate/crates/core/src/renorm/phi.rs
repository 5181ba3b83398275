//! Bad-block counts along paths and their supremum over the path class.

use std::collections::BTreeMap;

use super::animal::visited_blocks;
use super::classify::BlockClassification;
use super::geometry::{BlockGeometry, BlockGrid};
use crate::error::{Error, Result};
use crate::walker::GreenPath;

/// Default cap on frontier operations in [`phi_sup_dp`].
pub const DEFAULT_STATE_BUDGET: u64 = 2_000_000_000;

/// Number of distinct bad blocks met by `path`.
pub fn phi_r(path: &GreenPath, classification: &BlockClassification) -> usize {
    visited_blocks(path, classification.geometry)
        .into_iter()
        .filter(|&(i, j)| classification.is_bad(i, j))
        .count()
}

/// Total time `path` spends inside bad blocks.
pub fn time_in_bad(path: &GreenPath, classification: &BlockClassification) -> f64 {
    let d = classification.geometry.delta as f64;
    let mut total = 0.0;
    for (t0, t1, x) in path.holding_intervals_1d() {
        let i = classification.geometry.column_of(x);
        let mut s = t0;
        while s < t1 {
            let j = (s / d).floor() as i64;
            let e = (((j + 1) as f64) * d).min(t1);
            if classification.is_bad(i, j) {
                total += e - s;
            }
            s = e;
        }
    }
    total
}

/// Columns a path may use in one layer and which of them are bad.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerDomain {
    pub lo: i64,
    pub hi: i64,
    pub bad: Vec<bool>,
}

/// Per-layer column corridors for the supremum.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiDomain {
    pub geometry: BlockGeometry,
    pub layers: Vec<LayerDomain>,
}

impl PhiDomain {
    /// Every column of `grid` in every layer.
    pub fn from_grid(classification: &BlockClassification, grid: &BlockGrid) -> Self {
        let layers = (0..grid.layers)
            .map(|j| LayerDomain {
                lo: grid.i_lo.min(0),
                hi: grid.i_hi.max(0),
                bad: (grid.i_lo.min(0)..=grid.i_hi.max(0))
                    .map(|i| classification.is_bad(i, j))
                    .collect(),
            })
            .collect();
        PhiDomain {
            geometry: grid.geometry,
            layers,
        }
    }

    /// Layer `j` spans the labelled columns of that layer.
    pub fn from_labels(classification: &BlockClassification, layers: i64) -> Self {
        let mut span: BTreeMap<i64, (i64, i64)> = BTreeMap::new();
        for &(i, j) in classification.labels.keys() {
            let e = span.entry(j).or_insert((i, i));
            e.0 = e.0.min(i);
            e.1 = e.1.max(i);
        }
        let layers = (0..layers)
            .map(|j| {
                let (lo, hi) = span.get(&j).copied().unwrap_or((0, 0));
                LayerDomain {
                    lo,
                    hi,
                    bad: (lo..=hi).map(|i| classification.is_bad(i, j)).collect(),
                }
            })
            .collect();
        PhiDomain {
            geometry: classification.geometry,
            layers,
        }
    }
}

/// A path position at an edge of a block column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Edge {
    col: i64,
    right: bool,
}

impl Edge {
    fn site(self, d: i64) -> i64 {
        if self.right {
            (self.col + 1) * d - 1
        } else {
            self.col * d
        }
    }
}

type Frontier = Vec<(u32, u32)>;

/// Inserts `(k, v)` into a frontier with jumps and values both strictly increasing.
fn frontier_insert(f: &mut Frontier, k: u32, v: u32) {
    let pos = f.partition_point(|&(kk, _)| kk < k);
    if pos > 0 && f[pos - 1].1 >= v {
        return;
    }
    if pos < f.len() && f[pos].0 == k && f[pos].1 >= v {
        return;
    }
    let mut end = pos;
    while end < f.len() && f[end].1 <= v {
        end += 1;
    }
    f.splice(pos..end, std::iter::once((k, v)));
}

/// Jumps for a nearest-neighbour walk from `s` visiting `lo..=hi` and ending at `e`.
fn tour_cost(s: i64, e: i64, lo: i64, hi: i64) -> i64 {
    (hi - lo) + ((s - lo).abs() + (e - hi).abs()).min((s - hi).abs() + (e - lo).abs())
}

/// Supremum of the bad-block count over nearest-neighbour paths from the origin
/// with at most `ell` jumps that stay inside the per-layer corridors.
///
/// Within one layer a path covers a contiguous interval of columns, so its
/// contribution is a range sum. Between column crossings the position inside a
/// column is irrelevant, so positions are reduced to the column edges where a
/// crossing lands. The value function over jump counts is kept as a Pareto
/// frontier per edge state.
pub fn phi_sup_dp(domain: &PhiDomain, ell: usize, budget: u64) -> Result<usize> {
    let d = domain.geometry.delta;
    let ell = ell.min(u32::MAX as usize) as u32;
    let Some(first) = domain.layers.first() else {
        return Ok(0);
    };
    if !(first.lo..=first.hi).contains(&0) {
        return Err(Error::InvalidParameter("layer 0 corridor must contain column 0".into()));
    }
    let sides: &[bool] = if d == 1 { &[false] } else { &[false, true] };
    let mut states: BTreeMap<Edge, Frontier> = BTreeMap::new();
    states.insert(Edge { col: 0, right: false }, vec![(0, 0)]);
    let mut ops: u64 = 0;
    for (j, layer) in domain.layers.iter().enumerate() {
        let mut prefix = vec![0u32; layer.bad.len() + 1];
        for (k, &b) in layer.bad.iter().enumerate() {
            prefix[k + 1] = prefix[k] + b as u32;
        }
        let next_dom = domain.layers.get(j + 1);
        let mut next: BTreeMap<Edge, Frontier> = BTreeMap::new();
        for (&s, front) in &states {
            if !(layer.lo..=layer.hi).contains(&s.col) || front.is_empty() {
                continue;
            }
            let ss = s.site(d);
            let kmin = front[0].0;
            for a in layer.lo..=s.col {
                let need_lo = if a < s.col { (a + 1) * d - 1 } else { ss };
                if (ss - need_lo) as u64 + kmin as u64 > ell as u64 {
                    continue;
                }
                for b in s.col..=layer.hi {
                    let need_hi = if b > s.col { b * d } else { ss };
                    let base = (need_hi - need_lo) as u64;
                    if base + kmin as u64 > ell as u64 {
                        break;
                    }
                    let gain = prefix[(b - layer.lo + 1) as usize] - prefix[(a - layer.lo) as usize];
                    for c in a..=b {
                        if let Some(nd) = next_dom {
                            if !(nd.lo..=nd.hi).contains(&c) {
                                continue;
                            }
                        }
                        for &right in sides {
                            let e = Edge { col: c, right };
                            let es = e.site(d);
                            // Other ends are weakly dominated: a left edge is only
                            // worth reaching by a crossing from the column before it.
                            // With D = 1 both edges are the same site and are kept.
                            if d > 1 && e != s && es != ss && !(if right { c < b } else { c > a }) {
                                continue;
                            }
                            let lo = need_lo.min(es).min(ss);
                            let hi = need_hi.max(es).max(ss);
                            let cost = tour_cost(ss, es, lo, hi) as u64;
                            if cost + kmin as u64 > ell as u64 {
                                continue;
                            }
                            let dst = next.entry(e).or_default();
                            for &(k, v) in front {
                                ops += 1;
                                let nk = k as u64 + cost;
                                if nk > ell as u64 {
                                    break;
                                }
                                frontier_insert(dst, nk as u32, v + gain);
                            }
                            if ops > budget {
                                return Err(Error::Budget(format!(
                                    "supremum search exceeded {budget} frontier operations"
                                )));
                            }
                        }
                    }
                }
            }
        }
        states = next;
    }
    Ok(states
        .values()
        .filter_map(|f| f.last().map(|&(_, v)| v as usize))
        .max()
        .unwrap_or(0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn domain(d: i64, bad: &[Vec<bool>], lo: i64) -> PhiDomain {
        PhiDomain {
            geometry: BlockGeometry::new(d, 1),
            layers: bad
                .iter()
                .map(|row| LayerDomain {
                    lo,
                    hi: lo + row.len() as i64 - 1,
                    bad: row.clone(),
                })
                .collect(),
        }
    }

    #[test]
    fn all_good_is_zero() {
        let dm = domain(4, &vec![vec![false; 5]; 3], -2);
        for ell in 0..10 {
            assert_eq!(phi_sup_dp(&dm, ell, DEFAULT_STATE_BUDGET).unwrap(), 0);
        }
    }

    #[test]
    fn all_bad_stationary() {
        let dm = domain(64, &vec![vec![true; 3]; 2], -1);
        // Column -1 is one jump away, column 1 is 64 jumps away.
        for (ell, want) in [(0, 2), (1, 3), (2, 4), (65, 4), (66, 5), (130, 5), (131, 6)] {
            assert_eq!(phi_sup_dp(&dm, ell, DEFAULT_STATE_BUDGET).unwrap(), want, "ell = {ell}");
        }
    }

    #[test]
    fn frontier_keeps_pareto() {
        let mut f = Vec::new();
        frontier_insert(&mut f, 3, 2);
        frontier_insert(&mut f, 5, 2);
        frontier_insert(&mut f, 1, 1);
        frontier_insert(&mut f, 4, 5);
        frontier_insert(&mut f, 2, 5);
        assert_eq!(f, vec![(1, 1), (2, 5)]);
    }
}
