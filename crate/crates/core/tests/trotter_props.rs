// Copyright 2026 The lrsim Authors
// SPDX-License-Identifier: Apache-2.0

use lrsim::lattice::{LatticeGeometry, Region};
use lrsim::liouvillian::presets;
use lrsim::trotter::{build_circuit, light_cone_schedule, Ordering, TrotterCircuit};
use proptest::prelude::*;

fn ordering() -> impl Strategy<Value = Ordering> {
    prop_oneof![
        Just(Ordering::Lexicographic),
        Just(Ordering::EvenOdd),
        any::<u64>().prop_map(|seed| Ordering::SeededRandom { seed }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn schedules_nest_and_circuits_round_trip(
        n in 4usize..14, y in 0usize..14, dt in 0.05f64..0.4, steps in 1usize..6,
        d0 in 1u64..4, v in 0.0f64..6.0, ord in ordering(), averaged in any::<bool>(),
    ) {
        let spec = presets::dissipative_ising(LatticeGeometry::chain(n), &Default::default()).unwrap();
        let y = Region::single(y % n);
        let sched = light_cone_schedule(&spec, &y, dt * steps as f64, dt, d0, v).unwrap();
        prop_assert_eq!(sched.len(), steps);
        for w in sched.regions().windows(2) {
            prop_assert!(w[0].is_subset(&w[1]));
        }
        for (r, e) in sched.regions().iter().zip(sched.extended()) {
            prop_assert!(y.is_subset(r) && r.is_subset(e));
        }
        let circuit = build_circuit(&spec, &sched, ord, averaged).unwrap();
        prop_assert_eq!(circuit.slices(), steps);
        let text = circuit.to_text(&spec);
        let back = TrotterCircuit::from_text(&spec, &text).unwrap();
        prop_assert_eq!(back.to_text(&spec), text);
        // Every channel of slice k is a term inside the extended region of slice k.
        for c in circuit.channels() {
            prop_assert!(c.support.is_subset(&sched.extended()[c.slice - 1]));
        }
    }
}
