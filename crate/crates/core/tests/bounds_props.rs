// Copyright 2026 The lrsim Authors
// SPDX-License-Identifier: Apache-2.0

use lrsim::bounds::{
    check_tail_range, exp_tail_sum, lr_bound, neumaier_sum, partial_exp_sum, quasi_locality_bound,
    slice_trotter_bound, trotter_total_bound, BoundParams, ConeDepth,
};
use proptest::prelude::*;

fn params() -> impl Strategy<Value = BoundParams> {
    (0.5f64..3.0, 1.0f64..8.0, 0.1f64..3.0, 0.5f64..10.0, 0.0f64..2.0)
        .prop_map(|(a, z_max, ell_norm, m, kappa)| BoundParams { a, z_max, ell_norm, m, kappa })
}

proptest! {
    #[test]
    fn lr_bound_grows_with_time_and_decays_with_distance(
        p in params(), d in 0.0f64..10.0, dd in 0.0f64..5.0, lag in 0.0f64..2.0, dl in 0.0f64..1.0,
        vx in 1usize..20, vy in 1usize..20,
    ) {
        let b = lr_bound(&p, vx, vy, d, 0.0, lag, 2.0, 1.0).unwrap();
        prop_assert!(b <= lr_bound(&p, vx, vy, d, 0.0, lag + dl, 2.0, 1.0).unwrap());
        prop_assert!(lr_bound(&p, vx, vy, d + dd, 0.0, lag, 2.0, 1.0).unwrap() <= b);
        prop_assert_eq!(b, lr_bound(&p, vy, vx, d, 0.0, lag, 2.0, 1.0).unwrap());
        prop_assert!(lr_bound(&p, vx, vy, d, 1.0, 0.5, 2.0, 1.0).is_err());
    }

    #[test]
    fn quasi_locality_bound_orders(p in params(), d in 1u64..40, lag in 0.0f64..2.0, dl in 0.0f64..1.0) {
        match quasi_locality_bound(&p, d, 0.0, lag, 1.0) {
            Ok(b) => {
                prop_assert!(d as f64 > 2.0 * p.kappa + 1.0);
                prop_assert!(b <= quasi_locality_bound(&p, d, 0.0, lag + dl, 1.0).unwrap());
                if d as f64 > p.kappa {
                    prop_assert!(quasi_locality_bound(&p, d + 1, 0.0, lag, 1.0).unwrap() <= b);
                }
            }
            Err(_) => prop_assert!(d as f64 <= 2.0 * p.kappa + 1.0),
        }
    }

    #[test]
    fn trotter_total_is_sum_of_parts(p in params(), dts in proptest::collection::vec(0.0f64..0.3, 1..6), depth in 4u64..12) {
        let mut times = vec![0.0];
        for dt in &dts {
            times.push(times.last().unwrap() + dt);
        }
        let n = dts.len();
        let depths: Vec<ConeDepth> = (0..n)
            .map(|k| if k % 3 == 2 { ConeDepth::Saturated } else { ConeDepth::Finite(depth + k as u64) })
            .collect();
        let vols: Vec<usize> = (0..n).map(|k| 5 + k).collect();
        let total = trotter_total_bound(&p, &times, &depths, &vols);
        if depths.iter().filter_map(|d| d.finite()).all(|d| d as f64 > 2.0 * p.kappa + 1.0) {
            let total = total.unwrap();
            for k in 0..n {
                prop_assert_eq!(
                    total.splitting[k],
                    slice_trotter_bound(times[k + 1] - times[k], p.z_max, vols[k], p.ell_norm).unwrap()
                );
                if depths[k] == ConeDepth::Saturated {
                    prop_assert_eq!(total.truncation[k], 0.0);
                }
            }
            let parts = neumaier_sum(total.truncation.iter().chain(&total.splitting).copied());
            prop_assert!((total.total - parts).abs() <= 1e-12 * parts.max(1e-300));
        } else {
            prop_assert!(total.is_err());
        }
    }

    #[test]
    fn series_lemmas_hold(x in 0.0f64..8.0, n in 0u64..60, kappa in 0.0f64..3.0, d in 1u64..60) {
        let (tail, bound) = partial_exp_sum(x, n).unwrap();
        prop_assert!(tail >= 0.0 && tail <= bound * (1.0 + 1e-12));
        prop_assert!(tail <= x.exp() * (1.0 + 1e-12));
        if check_tail_range(kappa, d).is_ok() {
            let (tail, bound) = exp_tail_sum(kappa, d).unwrap();
            prop_assert!(tail > 0.0 && tail <= bound);
            let (next, _) = exp_tail_sum(kappa, d + 1).unwrap();
            prop_assert!(next < tail);
        }
    }
}
