//! Oracles shared by the integration tests.

#![allow(dead_code)]

use rwdre::renorm::PhiDomain;

fn in_layer(dom: &PhiDomain, j: usize, col: i64) -> bool {
    dom.layers.get(j).is_some_and(|l| l.lo <= col && col <= l.hi)
}

fn bad_at(dom: &PhiDomain, j: usize, col: i64) -> bool {
    let l = &dom.layers[j];
    l.bad[(col - l.lo) as usize]
}

/// Best distinct bad-block count over every continuation, `None` if none survives.
fn enumerate(dom: &PhiDomain, j: usize, x: i64, left: usize, seen: &mut Vec<(i64, usize)>) -> Option<usize> {
    let d = dom.geometry.delta;
    let mut best: Option<usize> = None;
    let visit = |seen: &mut Vec<(i64, usize)>, j: usize, x: i64, left: usize| {
        let b = (x.div_euclid(d), j);
        let fresh = !seen.contains(&b);
        if fresh {
            seen.push(b);
        }
        let v = enumerate(dom, j, x, left, seen);
        if fresh {
            seen.pop();
        }
        v
    };
    if left > 0 {
        for nx in [x - 1, x + 1] {
            if in_layer(dom, j, nx.div_euclid(d)) {
                best = best.max(visit(seen, j, nx, left - 1));
            }
        }
    }
    if j + 1 == dom.layers.len() {
        let count = seen.iter().filter(|&&(c, l)| bad_at(dom, l, c)).count();
        best = best.max(Some(count));
    } else if in_layer(dom, j + 1, x.div_euclid(d)) {
        best = best.max(visit(seen, j + 1, x, left));
    }
    best
}

/// Supremum of distinct bad blocks over nearest-neighbour paths from site 0 with at
/// most `ell` jumps, by listing every such path. Empty classes give 0.
pub fn phi_by_enumeration(dom: &PhiDomain, ell: usize) -> usize {
    if dom.layers.is_empty() {
        return 0;
    }
    enumerate(dom, 0, 0, ell, &mut vec![(0, 0)]).unwrap_or(0)
}
