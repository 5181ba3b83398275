mod common;

use proptest::prelude::*;
use rwdre::renorm::{phi_sup_dp, BlockGeometry, LayerDomain, PhiDomain, DEFAULT_STATE_BUDGET};

fn domain() -> impl Strategy<Value = PhiDomain> {
    let layer = (-4i64..=1, 1i64..=6).prop_flat_map(|(lo, w)| {
        proptest::collection::vec(any::<bool>(), w as usize).prop_map(move |bad| LayerDomain { lo, hi: lo + w - 1, bad })
    });
    (1i64..=3, proptest::collection::vec(layer, 1..=4)).prop_map(|(d, mut layers)| {
        // The first corridor must hold the starting column.
        let first = &mut layers[0];
        if first.lo > 0 || first.hi < 0 {
            let w = first.bad.len() as i64;
            first.lo = -((w - 1) / 2);
            first.hi = first.lo + w - 1;
        }
        PhiDomain {
            geometry: BlockGeometry::new(d, 1),
            layers,
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn dp_matches_enumeration(dom in domain(), ell in 0usize..=6) {
        let got = phi_sup_dp(&dom, ell, DEFAULT_STATE_BUDGET).unwrap();
        prop_assert_eq!(got, common::phi_by_enumeration(&dom, ell));
    }

    #[test]
    fn more_jumps_never_lower_the_supremum(dom in domain(), ell in 0usize..=5) {
        let a = phi_sup_dp(&dom, ell, DEFAULT_STATE_BUDGET).unwrap();
        let b = phi_sup_dp(&dom, ell + 1, DEFAULT_STATE_BUDGET).unwrap();
        prop_assert!(b >= a);
    }
}

#[test]
fn stationary_path_counts_its_column() {
    let dom = PhiDomain {
        geometry: BlockGeometry::new(4, 1),
        layers: (0..3).map(|_| LayerDomain { lo: 0, hi: 0, bad: vec![true] }).collect(),
    };
    assert_eq!(phi_sup_dp(&dom, 0, DEFAULT_STATE_BUDGET).unwrap(), 3);
}

#[test]
fn tiny_budget_is_reported() {
    let dom = PhiDomain {
        geometry: BlockGeometry::new(1, 1),
        layers: (0..4).map(|_| LayerDomain { lo: -3, hi: 3, bad: vec![true; 7] }).collect(),
    };
    assert!(matches!(phi_sup_dp(&dom, 6, 3), Err(rwdre::Error::Budget(_))));
}
