// Copyright 2026 The lrsim Authors
// SPDX-License-Identifier: Apache-2.0

use lrsim::lattice::{InteractionHypergraph, LatticeGeometry, Metric, Region};
use proptest::prelude::*;

fn region(n: usize) -> impl Strategy<Value = Region> {
    proptest::collection::btree_set(0..n, 1..=n).prop_map(Region::new)
}

fn grid_hypergraph(w: usize, h: usize, onsite: bool) -> (LatticeGeometry, InteractionHypergraph) {
    let geom = LatticeGeometry::grid(w, h, Metric::L1);
    let mut supports = geom.nearest_neighbor_bonds();
    if onsite {
        supports.extend((0..w * h).map(Region::single));
    }
    (geom, InteractionHypergraph::new(supports).unwrap())
}

proptest! {
    #[test]
    fn metric_axioms_on_random_coordinates(
        coords in proptest::collection::vec(proptest::collection::vec(-5i64..5, 2), 2..8),
        linf in any::<bool>(),
    ) {
        let geom = LatticeGeometry::from_coords(coords, if linf { Metric::LInf } else { Metric::L1 });
        let n = geom.n_sites();
        for x in 0..n {
            for y in 0..n {
                prop_assert_eq!(geom.site_distance(x, y), geom.site_distance(y, x));
                for z in 0..n {
                    prop_assert!(
                        geom.site_distance(x, z) <= geom.site_distance(x, y) + geom.site_distance(y, z) + 1e-12
                    );
                }
            }
        }
    }

    #[test]
    fn balls_grow_with_radius(w in 1usize..5, h in 1usize..5, c in 0usize..25, r1 in 0.0f64..4.0, dr in 0.0f64..3.0) {
        let geom = LatticeGeometry::grid(w, h, Metric::L1);
        let center = Region::single(c % (w * h));
        let small = geom.ball(&center, r1).unwrap();
        let big = geom.ball(&center, r1 + dr).unwrap();
        prop_assert!(center.is_subset(&small));
        prop_assert!(small.is_subset(&big));
    }

    #[test]
    fn extension_and_volume_are_monotone(a in region(9), b in region(9), onsite in any::<bool>()) {
        let (_, hg) = grid_hypergraph(3, 3, onsite);
        let inner = a.intersection(&b);
        prop_assume!(!inner.is_empty());
        prop_assert!(hg.extension(&inner).is_subset(&hg.extension(&a)));
        prop_assert!(inner.is_subset(&hg.extension(&inner)) || !onsite);
        prop_assert!(hg.volume(&inner) <= hg.volume(&a));
        prop_assert!(hg.volume(&a) <= hg.volume(&a.union(&b)));
    }

    #[test]
    fn region_and_complement_partition(v in region(12)) {
        let all = LatticeGeometry::chain(12).all_sites();
        let rest = all.difference(&v);
        prop_assert!(!rest.intersects(&v));
        prop_assert_eq!(rest.union(&v), all);
        prop_assert_eq!(rest.len() + v.len(), 12);
    }

    #[test]
    fn closure_stays_inside_v(w in region(8), v in region(8)) {
        let geom = LatticeGeometry::chain(8);
        let hg = InteractionHypergraph::new(geom.nearest_neighbor_bonds()).unwrap();
        let c = hg.closure(&w, &v);
        prop_assert!(w.is_subset(&c));
        prop_assert!(c.difference(&w).is_subset(&v));
    }
}
