// Copyright 2026 The lrsim Authors
// SPDX-License-Identifier: Apache-2.0

use lrsim::algebra::{
    adjoint, cpt_check, hs_inner, inf_norm, random, schatten_one, spectral_norm, Op, SiteDims, SuperOp,
    C64,
};
use lrsim::lattice::Region;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn operator_norms_are_consistent(seed in any::<u64>(), d in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random::ginibre(d, d, &mut rng);
        let b = random::ginibre(d, d, &mut rng);
        let (na, nb) = (spectral_norm(&a), spectral_norm(&b));
        prop_assert!(spectral_norm(&(&a * &b)) <= na * nb * (1.0 + 1e-12));
        prop_assert!(spectral_norm(&(&a + &b)) <= (na + nb) * (1.0 + 1e-12));
        prop_assert!(na <= schatten_one(&a) * (1.0 + 1e-12));
        prop_assert!(schatten_one(&a) <= d as f64 * na * (1.0 + 1e-12));
        // Hölder: |Tr(A†B)| <= ‖A‖_1 ‖B‖_∞
        prop_assert!(hs_inner(&a, &b).norm() <= schatten_one(&a) * nb * (1.0 + 1e-12));
    }

    #[test]
    fn embedding_preserves_norm_and_products(seed in any::<u64>(), site in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dims = SiteDims::qubits();
        let a = Op::qubits(Region::single(site), random::ginibre(2, 2, &mut rng)).unwrap();
        let b = Op::qubits(Region::single(site), random::ginibre(2, 2, &mut rng)).unwrap();
        let host = Region::new(0..3);
        let ea = a.embed(&host, &dims).unwrap();
        let eb = b.embed(&host, &dims).unwrap();
        prop_assert!((inf_norm(&ea) - inf_norm(&a)).abs() <= 1e-12 * inf_norm(&a).max(1.0));
        let lhs = a.product(&b).unwrap().embed(&host, &dims).unwrap();
        let rhs = ea.product(&eb).unwrap();
        prop_assert!((lhs.matrix() - rhs.matrix()).norm() <= 1e-12);
    }

    #[test]
    fn adjoint_is_hilbert_schmidt_dual(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random::superop(2, &mut rng);
        let x = random::ginibre(2, 2, &mut rng);
        let y = random::ginibre(2, 2, &mut rng);
        let lhs = hs_inner(&y, &t.apply_matrix(&x));
        let rhs = hs_inner(&adjoint(&t).apply_matrix(&y), &x);
        prop_assert!((lhs - rhs).norm() <= 1e-10 * (1.0 + lhs.norm()));
        let back = adjoint(&adjoint(&t));
        prop_assert_eq!(back.matrix(), t.matrix());
    }

    #[test]
    fn random_channels_are_cpt_and_compose(seed in any::<u64>(), k in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random::cpt_channel(2, k, &mut rng);
        let b = random::cpt_channel(2, 1 + (k % 3), &mut rng);
        prop_assert!(cpt_check(&a, 1e-10).unwrap().is_cpt);
        prop_assert!(cpt_check(&a.compose(&b).unwrap(), 1e-10).unwrap().is_cpt);
        let id = SuperOp::identity(Region::single(0), vec![2]);
        let mixed = a.scaled(C64::new(0.3, 0.0)).plus(&id.scaled(C64::new(0.7, 0.0))).unwrap();
        prop_assert!(cpt_check(&mixed, 1e-10).unwrap().is_cpt);
    }
}
