// Copyright 2026 The lrsim Authors
// SPDX-License-Identifier: Apache-2.0

use lrsim::algebra::{cpt_check, random, schatten_one, spectral_norm, Matrix, Op, C64};
use lrsim::lattice::LatticeGeometry;
use lrsim::liouvillian::presets::{self, RandomParams};
use lrsim::propagator::{dense_channel, dense_propagator, evolve_observable, propagate_state, SolverConfig};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn small_channels_are_cpt(seed in any::<u64>(), t in 0.0f64..1.5) {
        let spec = presets::random_model(LatticeGeometry::chain(2), &RandomParams { seed, strength: 0.8 }).unwrap();
        let all = spec.all_sites();
        let ch = dense_channel(&spec, &all, &all, 0.0, t).unwrap();
        let report = cpt_check(&ch, 1e-9).unwrap();
        prop_assert!(report.is_cpt, "{:?}", report);
    }

    #[test]
    fn integrator_matches_matrix_exponential(seed in any::<u64>(), s in 0.0f64..0.5, lag in 0.0f64..0.8) {
        let spec = presets::random_model(LatticeGeometry::chain(2), &RandomParams { seed, strength: 0.8 }).unwrap();
        let all = spec.all_sites();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 5);
        let o = Op::qubits(all.clone(), random::hermitian(4, &mut rng)).unwrap();
        let ev = evolve_observable(&spec, &all, &o, s, s + lag, &SolverConfig::default()).unwrap();
        let exact = dense_propagator(&spec, &all, &all, s, s + lag).unwrap().apply(&o).unwrap();
        prop_assert!((ev.op.matrix() - exact.matrix()).norm() <= 1e-8 * (1.0 + exact.matrix().norm()));
    }

    #[test]
    fn heisenberg_maps_contract_and_fix_identity(seed in any::<u64>(), lag in 0.0f64..1.0) {
        let spec = presets::random_model(LatticeGeometry::chain(3), &RandomParams { seed, strength: 0.6 }).unwrap();
        let all = spec.all_sites();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 6);
        let solver = SolverConfig::default();
        let o = Op::qubits(all.clone(), random::ginibre(8, 8, &mut rng)).unwrap();
        let ev = evolve_observable(&spec, &all, &o, 0.0, lag, &solver).unwrap();
        prop_assert!(spectral_norm(ev.op.matrix()) <= spectral_norm(o.matrix()) + 1e-7);
        let id = Op::qubits(all.clone(), Matrix::identity(8, 8)).unwrap();
        let ev = evolve_observable(&spec, &all, &id, 0.0, lag, &solver).unwrap();
        prop_assert!((ev.op.matrix() - id.matrix()).norm() <= 1e-9);
    }

    #[test]
    fn states_stay_states(seed in any::<u64>(), lag in 0.0f64..1.0) {
        let spec = presets::random_model(LatticeGeometry::chain(3), &RandomParams { seed, strength: 0.6 }).unwrap();
        let all = spec.all_sites();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 7);
        let g = random::ginibre(8, 8, &mut rng);
        let rho = &g * g.adjoint();
        let tr = rho.trace();
        let rho = Op::qubits(all.clone(), rho / tr).unwrap();
        let out = propagate_state(&spec, &all, &rho, 0.0, lag, &SolverConfig::default()).unwrap().op;
        prop_assert!((out.trace() - C64::new(1.0, 0.0)).norm() <= 1e-9);
        let h = (out.matrix() + out.matrix().adjoint()) * C64::new(0.5, 0.0);
        let min = h.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
        prop_assert!(min >= -1e-9);
        prop_assert!((schatten_one(out.matrix()) - 1.0).abs() <= 1e-8);
    }
}
