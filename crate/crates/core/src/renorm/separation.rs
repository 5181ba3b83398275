//! Separation conditions on sets of block indices.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeparationMode {
    /// All points share one layer and column gaps are at least 8.
    SameRowGe8,
    /// Pairwise l1 distance at least 10 and all layer indices of one parity.
    GeneralGe10SameParity,
}

fn pair_ok(a: (i64, i64), b: (i64, i64), mode: SeparationMode) -> bool {
    match mode {
        SeparationMode::SameRowGe8 => a.1 == b.1 && (a.0 - b.0).abs() >= 8,
        SeparationMode::GeneralGe10SameParity => {
            (a.0 - b.0).abs() + (a.1 - b.1).abs() >= 10 && (a.1 - b.1).rem_euclid(2) == 0
        }
    }
}

pub fn separated_family(points: &[(i64, i64)], mode: SeparationMode) -> bool {
    for (k, &a) in points.iter().enumerate() {
        for &b in &points[k + 1..] {
            if a == b || !pair_ok(a, b, mode) {
                return false;
            }
        }
    }
    true
}

/// Greedy maximal sub-family in the general mode.
///
/// Points of the more frequent layer parity are kept; they are then scanned in
/// lexicographic order and taken when compatible with everything taken so far.
pub fn greedy_separated(points: &[(i64, i64)]) -> Vec<(i64, i64)> {
    let mut pts: Vec<(i64, i64)> = points.to_vec();
    pts.sort_unstable_by_key(|p| (p.1, p.0));
    pts.dedup();
    let even = pts.iter().filter(|p| p.1.rem_euclid(2) == 0).count();
    let parity = if 2 * even >= pts.len() { 0 } else { 1 };
    let mut out: Vec<(i64, i64)> = Vec::new();
    for p in pts.into_iter().filter(|p| p.1.rem_euclid(2) == parity) {
        if out
            .iter()
            .all(|&q| pair_ok(p, q, SeparationMode::GeneralGe10SameParity))
        {
            out.push(p);
        }
    }
    out
}
