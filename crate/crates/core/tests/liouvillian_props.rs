// Copyright 2026 The lrsim Authors
// SPDX-License-Identifier: Apache-2.0

use lrsim::algebra::{random, Matrix, Op, SiteDims, C64};
use lrsim::lattice::{LatticeGeometry, Region};
use lrsim::liouvillian::presets::{self, RandomParams};
use lrsim::liouvillian::{LiouvillianSpec, LocalTerm, TimeProfile};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn model(seed: u64, n: usize) -> LiouvillianSpec {
    presets::random_model(LatticeGeometry::chain(n), &RandomParams { seed, strength: 0.7 }).unwrap()
}

/// Dense `O ↦ i[H,O] + Σ L†OL - ½{L†L,O}` of the whole lattice, term by
/// term embedded with Kronecker products.
fn dense_oracle(spec: &LiouvillianSpec, o: &Matrix) -> Matrix {
    let dims = SiteDims::qubits();
    let all = spec.all_sites();
    let mut out = Matrix::zeros(o.nrows(), o.ncols());
    let i = C64::new(0.0, 1.0);
    for term in spec.terms() {
        let lift = |m: &Matrix| {
            Op::qubits(term.support().clone(), m.clone())
                .unwrap()
                .embed(&all, &dims)
                .unwrap()
                .into_matrix()
        };
        let h = lift(term.hamiltonian());
        out += (&h * o - o * &h) * i;
        for l in term.lindblads() {
            let l = lift(l);
            let ld = l.adjoint();
            out += &ld * o * &l - (&ld * &l * o + o * &ld * &l) * C64::new(0.5, 0.0);
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn generator_is_unital_hermiticity_preserving_and_linear(seed in any::<u64>(), n in 2usize..5) {
        let spec = model(seed, n);
        let all = spec.all_sites();
        let d = 1usize << n;
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        let id = Op::qubits(all.clone(), Matrix::identity(d, d)).unwrap();
        prop_assert!(spec.apply(0.3, &id).unwrap().matrix().norm() <= 1e-12);

        let x = Op::qubits(all.clone(), random::ginibre(d, d, &mut rng)).unwrap();
        let y = Op::qubits(all.clone(), random::ginibre(d, d, &mut rng)).unwrap();
        let lx = spec.apply(0.3, &x).unwrap();
        let lxd = spec.apply(0.3, &x.adjoint()).unwrap();
        prop_assert!((lx.matrix().adjoint() - lxd.matrix()).norm() <= 1e-10 * (1.0 + lx.matrix().norm()));

        let c = C64::new(0.4, -1.1);
        let combo = x.scaled(c).plus(&y).unwrap();
        let lhs = spec.apply(0.3, &combo).unwrap();
        let rhs = lx.scaled(c).plus(&spec.apply(0.3, &y).unwrap()).unwrap();
        prop_assert!((lhs.matrix() - rhs.matrix()).norm() <= 1e-10 * (1.0 + lhs.matrix().norm()));

        let oracle = dense_oracle(&spec, x.matrix());
        prop_assert!((lx.matrix() - &oracle).norm() <= 1e-10 * (1.0 + oracle.norm()));
    }

    #[test]
    fn dense_generator_matches_apply(seed in any::<u64>(), n in 2usize..4) {
        let spec = model(seed, n);
        let all = spec.all_sites();
        let d = 1usize << n;
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 2);
        let x = Op::qubits(all.clone(), random::ginibre(d, d, &mut rng)).unwrap();
        let dense = spec.dense_generator(&all, &all, 0.0).unwrap();
        let via_dense = dense.apply(&x).unwrap();
        let direct = spec.apply(0.0, &x).unwrap();
        prop_assert!((via_dense.matrix() - direct.matrix()).norm() <= 1e-10 * (1.0 + direct.matrix().norm()));
    }

    #[test]
    fn truncation_keeps_only_terms_inside(seed in any::<u64>(), lo in 0usize..3, len in 1usize..4) {
        let spec = model(seed, 5);
        let all = spec.all_sites();
        let v = Region::new(lo..(lo + len).min(5));
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 3);
        let x = Op::qubits(all.clone(), random::ginibre(32, 32, &mut rng)).unwrap();
        let truncated = spec.apply_truncated(&v, 0.0, &x).unwrap();
        let inside = spec.restricted(&spec.terms_within(&v)).unwrap();
        let oracle = dense_oracle(&inside, x.matrix());
        prop_assert!((truncated.matrix() - &oracle).norm() <= 1e-10 * (1.0 + oracle.norm()));
    }

    #[test]
    fn profile_scales_term_linearly(value in -2.0f64..2.0, t in 0.0f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let (h, ls) = random::lindblad_data(2, 1, 1.0, &mut rng);
        let base = LocalTerm::qubits(Region::single(0), h, ls, TimeProfile::default()).unwrap();
        let scaled = base.with_profile(TimeProfile::constant(value));
        let a = base.superop_at(t).scaled(C64::new(value, 0.0));
        let b = scaled.superop_at(t);
        prop_assert!((a.matrix() - b.matrix()).norm() <= 1e-12 * (1.0 + a.matrix().norm()));
    }
}
