// Copyright 2026 The lrsim Authors
// SPDX-License-Identifier: Apache-2.0

//! Seeded random operators, channels and generators.

use nalgebra::DVector;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{Matrix, SuperOp, C64};
use crate::lattice::Region;

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

pub fn unit_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DVector<C64> {
    loop {
        let v = DVector::from_fn(dim, |_, _| complex_gaussian(rng));
        let n = v.norm();
        if n > 1e-12 {
            return v / C64::new(n, 0.0);
        }
    }
}

pub fn hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Matrix {
    let g = ginibre(dim, dim, rng);
    (&g + g.adjoint()) * C64::new(0.5, 0.0)
}

/// Haar-random unitary (QR of a Ginibre matrix with the phase fix).
pub fn unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Matrix {
    let qr = ginibre(dim, dim, rng).qr();
    let (mut q, r) = qr.unpack();
    for k in 0..dim {
        let d = r[(k, k)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        let mut col = q.column_mut(k);
        col *= phase;
    }
    q
}

/// Random rank-one operator `|ψ><φ|` with unit vectors.
pub fn rank_one<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Matrix {
    let psi = unit_vector(dim, rng);
    let phi = unit_vector(dim, rng);
    psi * phi.adjoint()
}

/// Superoperator with Ginibre matrix on a single site of dimension `dim`.
pub fn superop<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> SuperOp {
    SuperOp::new(Region::single(0), vec![dim], ginibre(dim * dim, dim * dim, rng))
        .expect("consistent dimensions")
}

/// Random CPT map (Schrödinger picture) with `n_kraus` Kraus operators,
/// taken from the blocks of a Haar-random isometry.
pub fn cpt_channel<R: Rng + ?Sized>(dim: usize, n_kraus: usize, rng: &mut R) -> SuperOp {
    let u = unitary(dim * n_kraus, rng);
    let mut m = Matrix::zeros(dim * dim, dim * dim);
    for k in 0..n_kraus {
        let kraus = u.view((k * dim, 0), (dim, dim)).into_owned();
        // vec(K X K†) = (conj(K) ⊗ K) vec(X)
        m += kraus.conjugate().kronecker(&kraus);
    }
    SuperOp::new(Region::single(0), vec![dim], m).expect("consistent dimensions")
}

/// Random Hermitian Hamiltonian and Lindblad operators on a space of
/// dimension `dim`, scaled by `strength`.
pub fn lindblad_data<R: Rng + ?Sized>(
    dim: usize,
    n_lindblad: usize,
    strength: f64,
    rng: &mut R,
) -> (Matrix, Vec<Matrix>) {
    let h = hermitian(dim, rng) * C64::new(strength, 0.0);
    let ls = (0..n_lindblad)
        .map(|_| ginibre(dim, dim, rng) * C64::new(strength.sqrt() * 0.5, 0.0))
        .collect();
    (h, ls)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::cpt_check;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u = unitary(4, &mut rng);
        let err = (&u * u.adjoint() - Matrix::identity(4, 4)).norm();
        assert!(err < 1e-12);
    }

    #[test]
    fn random_channels_are_cpt() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n_kraus in 1..4 {
            let t = cpt_channel(2, n_kraus, &mut rng);
            assert!(cpt_check(&t, 1e-10).unwrap().is_cpt);
        }
    }
}
