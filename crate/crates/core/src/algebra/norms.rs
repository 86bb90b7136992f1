// Copyright 2026 The lrsim Authors
// SPDX-License-Identifier: Apache-2.0

//! Induced superoperator norms, Choi matrices and CPT checks.
//!
//! The `1 -> 1` norm is a supremum of a convex function over the trace-norm
//! unit ball, so it is attained at an extreme point `|ψ><φ|`. We maximize
//! `‖T(|ψ><φ|)‖_1` by alternating ascent: the polar unitary `U` of
//! `T(|ψ><φ|)` gives a linear lower bound `Re Tr(U† T(|ψ><φ|))`, which is
//! maximized over unit vectors by the top singular pair of `T†(U)`. Every
//! step is monotone and every reported value is attained, hence a certified
//! lower bound.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{adjoint, random, schatten_one, Matrix, SuperOp, C64, CHOI_DIM_LIMIT, ZERO};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormMode {
    /// Dense grid over pairs of unit vectors followed by ascent from the
    /// best grid points. Single site of dimension at most 2.
    ExactSmall,
    /// Alternating ascent from seeded random restarts.
    Estimate,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormOptions {
    pub mode: NormMode,
    pub restarts: usize,
    pub seed: u64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for NormOptions {
    fn default() -> Self {
        NormOptions {
            mode: NormMode::Estimate,
            restarts: 32,
            seed: 0x5eed,
            tol: 1e-10,
            max_iter: 2000,
        }
    }
}

impl NormOptions {
    pub fn exact_small() -> Self {
        NormOptions {
            mode: NormMode::ExactSmall,
            ..Self::default()
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Result of a norm search. `value` is attained by an explicit input and is
/// therefore a lower bound on the true norm.
#[derive(Clone, Debug, PartialEq)]
pub struct NormEstimate {
    pub value: f64,
    /// Local maxima found by the individual restarts.
    pub restart_values: Vec<f64>,
    /// Restarts that met the convergence tolerance before `max_iter`.
    pub converged: usize,
    /// Restarts whose local maximum is within `1e-8` (relative) of `value`.
    pub agreeing: usize,
}

impl NormEstimate {
    fn from_runs(runs: Vec<(f64, bool)>) -> Self {
        let value = runs.iter().map(|r| r.0).fold(0.0, f64::max);
        let agreeing = runs
            .iter()
            .filter(|r| value - r.0 <= 1e-8 * value.max(1.0))
            .count();
        NormEstimate {
            value,
            converged: runs.iter().filter(|r| r.1).count(),
            agreeing,
            restart_values: runs.into_iter().map(|r| r.0).collect(),
        }
    }

    fn scaled(mut self, s: f64) -> Self {
        self.value *= s;
        for v in &mut self.restart_values {
            *v *= s;
        }
        self
    }
}

struct TopPair {
    sigma: f64,
    left: DVector<C64>,
    right: DVector<C64>,
}

/// Largest singular value with its singular vectors: `m right = sigma left`.
fn top_singular(m: &Matrix) -> TopPair {
    let svd = m.clone().svd(true, true);
    let (k, &sigma) = svd
        .singular_values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty matrix");
    let u = svd.u.expect("requested u");
    let v_t = svd.v_t.expect("requested v_t");
    TopPair {
        sigma,
        left: u.column(k).into_owned(),
        right: v_t.row(k).adjoint(),
    }
}

/// Polar unitary `W V†` of `X = W Σ V†` together with `‖X‖_1`.
fn polar(m: &Matrix) -> (Matrix, f64) {
    let svd = m.clone().svd(true, true);
    let norm = svd.singular_values.sum();
    let u = svd.u.expect("requested u");
    let v_t = svd.v_t.expect("requested v_t");
    (u * v_t, norm)
}

fn outer(psi: &DVector<C64>, phi: &DVector<C64>) -> Matrix {
    psi * phi.adjoint()
}

/// Alternating ascent for `‖T‖_{1->1}` from the rank-one start `|ψ><φ|`.
fn ascend_rank_one(
    t: &SuperOp,
    t_adj: &SuperOp,
    mut psi: DVector<C64>,
    mut phi: DVector<C64>,
    opts: &NormOptions,
) -> (f64, bool) {
    let (mut u, mut value) = polar(&t.apply_matrix(&outer(&psi, &phi)));
    for _ in 0..opts.max_iter {
        let top = top_singular(&t_adj.apply_matrix(&u));
        psi = top.left;
        phi = top.right;
        let (next_u, next_value) = polar(&t.apply_matrix(&outer(&psi, &phi)));
        let gain = next_value - value;
        u = next_u;
        value = value.max(next_value);
        if gain <= opts.tol * value.max(1.0) {
            return (value, true);
        }
    }
    (value, false)
}

fn check_region(t: &SuperOp, opts: &NormOptions) -> Result<()> {
    if opts.mode == NormMode::ExactSmall && (t.dims().len() != 1 || t.dim() > 2) {
        return Err(Error::NormMode(format!(
            "exact-small mode needs a single site of dimension <= 2, got region {} with dims {:?}",
            t.region(),
            t.dims()
        )));
    }
    if opts.restarts == 0 {
        return Err(Error::NormMode("at least one restart is required".into()));
    }
    Ok(())
}

fn bloch_vector(theta: f64, phase: f64) -> DVector<C64> {
    DVector::from_vec(vec![
        C64::new((theta / 2.0).cos(), 0.0),
        C64::from_polar((theta / 2.0).sin(), phase),
    ])
}

/// `‖X‖_1` of a 2x2 matrix: `sqrt(‖X‖_F^2 + 2 |det X|)`.
fn trace_norm_2x2(x: &[C64]) -> f64 {
    let frob: f64 = x.iter().map(|z| z.norm_sqr()).sum();
    let det = x[0] * x[3] - x[2] * x[1];
    (frob + 2.0 * det.norm()).max(0.0).sqrt()
}

const GRID_THETA: usize = 24;
const GRID_PHASE: usize = 48;
const GRID_POLISH: usize = 8;

fn exact_small_one_to_one(t: &SuperOp, opts: &NormOptions) -> NormEstimate {
    let d = t.dim();
    if d == 1 {
        let v = t.matrix()[(0, 0)].norm();
        return NormEstimate::from_runs(vec![(v, true)]);
    }
    let mut grid = Vec::with_capacity(GRID_THETA * GRID_PHASE);
    for a in 0..=GRID_THETA {
        let theta = std::f64::consts::PI * a as f64 / GRID_THETA as f64;
        // Poles carry a single point.
        let phases = if a == 0 || a == GRID_THETA { 1 } else { GRID_PHASE };
        for b in 0..phases {
            let phase = 2.0 * std::f64::consts::PI * b as f64 / GRID_PHASE as f64;
            grid.push(bloch_vector(theta, phase));
        }
    }
    let m = t.matrix();
    let mut scored: Vec<(f64, usize, usize)> = Vec::with_capacity(grid.len() * grid.len());
    let mut x = [ZERO; 4];
    let mut image = [ZERO; 4];
    for (i, psi) in grid.iter().enumerate() {
        for (j, phi) in grid.iter().enumerate() {
            // vec(|ψ><φ|) column-major
            x[0] = psi[0] * phi[0].conj();
            x[1] = psi[1] * phi[0].conj();
            x[2] = psi[0] * phi[1].conj();
            x[3] = psi[1] * phi[1].conj();
            for (r, out) in image.iter_mut().enumerate() {
                *out = (0..4).map(|c| m[(r, c)] * x[c]).sum();
            }
            scored.push((trace_norm_2x2(&image), i, j));
        }
    }
    scored.sort_by(|a, b| b.0.total_cmp(&a.0));
    let t_adj = adjoint(t);
    let mut runs: Vec<(f64, bool)> = vec![(scored[0].0, true)];
    for &(_, i, j) in scored.iter().take(GRID_POLISH) {
        runs.push(ascend_rank_one(t, &t_adj, grid[i].clone(), grid[j].clone(), opts));
    }
    NormEstimate::from_runs(runs)
}

/// `‖T‖_{1->1} = sup_O ‖T O‖_1 / ‖O‖_1`.
pub fn one_to_one_norm(t: &SuperOp, opts: &NormOptions) -> Result<NormEstimate> {
    check_region(t, opts)?;
    let scale = t.matrix().iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Ok(NormEstimate::from_runs(vec![(0.0, true)]));
    }
    // Work with a unit-size map so the tolerances are relative.
    let unit = t.scaled(C64::new(1.0 / scale, 0.0));
    let est = match opts.mode {
        NormMode::ExactSmall => exact_small_one_to_one(&unit, opts),
        NormMode::Estimate => {
            let d = unit.dim();
            let unit_adj = adjoint(&unit);
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            let runs = (0..opts.restarts)
                .map(|_| {
                    let psi = random::unit_vector(d, &mut rng);
                    let phi = random::unit_vector(d, &mut rng);
                    ascend_rank_one(&unit, &unit_adj, psi, phi, opts)
                })
                .collect();
            NormEstimate::from_runs(runs)
        }
    };
    Ok(est.scaled(scale))
}

/// `‖T‖_{∞->∞}`, computed through duality as `‖T†‖_{1->1}`.
pub fn inf_inf_norm(t: &SuperOp, opts: &NormOptions) -> Result<NormEstimate> {
    one_to_one_norm(&adjoint(t), opts)
}

/// `‖T‖_{∞->∞}` maximized directly over unitary inputs (the extreme points
/// of the operator-norm ball), without going through the adjoint's
/// `1 -> 1` norm. Always runs the seeded ascent; `mode` is ignored.
pub fn inf_inf_norm_direct(t: &SuperOp, opts: &NormOptions) -> Result<NormEstimate> {
    if opts.restarts == 0 {
        return Err(Error::NormMode("at least one restart is required".into()));
    }
    let scale = t.matrix().iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Ok(NormEstimate::from_runs(vec![(0.0, true)]));
    }
    let unit = t.scaled(C64::new(1.0 / scale, 0.0));
    let unit_adj = adjoint(&unit);
    let d = unit.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x9e37_79b9_7f4a_7c15);
    let runs = (0..opts.restarts)
        .map(|_| {
            let mut u = random::unitary(d, &mut rng);
            let mut value = top_singular(&unit.apply_matrix(&u)).sigma;
            for _ in 0..opts.max_iter {
                let top = top_singular(&unit.apply_matrix(&u));
                let (next_u, _) = polar(&unit_adj.apply_matrix(&outer(&top.left, &top.right)));
                let next_value = top_singular(&unit.apply_matrix(&next_u)).sigma;
                let gain = next_value - value;
                u = next_u;
                value = value.max(next_value);
                if gain <= opts.tol * value.max(1.0) {
                    return (value, true);
                }
            }
            (value, false)
        })
        .collect();
    Ok(NormEstimate::from_runs(runs).scaled(scale))
}

/// Unnormalized Choi matrix `Σ_ij T(|i><j|) ⊗ |i><j|` (output factor first).
pub fn choi(t: &SuperOp) -> Result<Matrix> {
    let d = t.dim();
    if d * d > CHOI_DIM_LIMIT {
        return Err(Error::ScaleLimit(format!(
            "Choi matrix of operator-space dimension {} exceeds {CHOI_DIM_LIMIT}",
            d * d
        )));
    }
    let m = t.matrix();
    Ok(DMatrix::from_fn(d * d, d * d, |row, col| {
        let (a, i) = (row / d, row % d);
        let (b, j) = (col / d, col % d);
        m[(a + d * b, i + d * j)]
    }))
}

/// Outcome of a complete-positivity and trace-preservation test of a
/// Schrödinger-picture map.
#[derive(Clone, Debug, PartialEq)]
pub struct CptReport {
    pub min_choi_eigenvalue: f64,
    pub choi_hermiticity_defect: f64,
    /// Largest entry of `Tr_out(Choi) - 1`.
    pub trace_defect: f64,
    pub is_cpt: bool,
}

pub fn cpt_check(t: &SuperOp, tol: f64) -> Result<CptReport> {
    let c = choi(t)?;
    let d = t.dim();
    let hermiticity = super::hermiticity_defect(&c);
    let h = (&c + c.adjoint()) * C64::new(0.5, 0.0);
    let min_eig = h
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let mut trace_defect: f64 = 0.0;
    for i in 0..d {
        for j in 0..d {
            let partial: C64 = (0..d).map(|a| c[(a * d + i, a * d + j)]).sum();
            let target = if i == j { 1.0 } else { 0.0 };
            trace_defect = trace_defect.max((partial - C64::new(target, 0.0)).norm());
        }
    }
    Ok(CptReport {
        min_choi_eigenvalue: min_eig,
        choi_hermiticity_defect: hermiticity,
        trace_defect,
        is_cpt: min_eig >= -tol && trace_defect <= tol && hermiticity <= tol,
    })
}

/// `‖T‖_{1->1}` lower bound from a single input, used in tests.
pub fn one_to_one_ratio(t: &SuperOp, input: &Matrix) -> f64 {
    schatten_one(&t.apply_matrix(input)) / schatten_one(input)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{lindblad_generator, pauli};
    use crate::lattice::Region;
    use approx::assert_abs_diff_eq;

    fn qubit_identity() -> SuperOp {
        SuperOp::identity(Region::single(0), vec![2])
    }

    #[test]
    fn identity_and_scaling() {
        for opts in [NormOptions::default(), NormOptions::exact_small()] {
            let id = qubit_identity();
            assert_abs_diff_eq!(one_to_one_norm(&id, &opts).unwrap().value, 1.0, epsilon = 1e-9);
            assert_abs_diff_eq!(inf_inf_norm(&id, &opts).unwrap().value, 1.0, epsilon = 1e-9);
            let two = id.scaled(C64::new(2.0, 0.0));
            assert_abs_diff_eq!(one_to_one_norm(&two, &opts).unwrap().value, 2.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn exact_small_rejects_large_regions() {
        let t = SuperOp::identity(Region::new([0, 1]), vec![2, 2]);
        assert!(matches!(
            one_to_one_norm(&t, &NormOptions::exact_small()),
            Err(Error::NormMode(_))
        ));
        assert!(one_to_one_norm(&t, &NormOptions::default()).is_ok());
    }

    #[test]
    fn commutator_with_sigma_z_has_norm_two() {
        let s = lindblad_generator(&pauli::sigma_z(), &[]);
        let t = SuperOp::qubit(s).unwrap();
        let est = inf_inf_norm(&t, &NormOptions::default()).unwrap();
        assert_abs_diff_eq!(est.value, 2.0, epsilon = 1e-8);
        assert!(est.agreeing >= 1);
        let direct = inf_inf_norm_direct(&t, &NormOptions::default()).unwrap();
        assert_abs_diff_eq!(direct.value, 2.0, epsilon = 1e-8);
    }

    #[test]
    fn amplitude_damping_channel_is_cpt_with_unit_norm() {
        let gamma: f64 = 0.8;
        let s = lindblad_generator(&Matrix::zeros(2, 2), &[pauli::sigma_minus() * C64::new(gamma.sqrt(), 0.0)]);
        let heisenberg = SuperOp::qubit(s).unwrap();
        let schrodinger = adjoint(&heisenberg).exp_scaled(C64::new(0.3, 0.0));
        let report = cpt_check(&schrodinger, 1e-9).unwrap();
        assert!(report.is_cpt, "{report:?}");
        let est = one_to_one_norm(&schrodinger, &NormOptions::default()).unwrap();
        assert_abs_diff_eq!(est.value, 1.0, epsilon = 1e-9);
        // Heisenberg propagator is norm non-increasing.
        let prop = heisenberg.exp_scaled(C64::new(0.3, 0.0));
        assert!(inf_inf_norm(&prop, &NormOptions::default()).unwrap().value <= 1.0 + 1e-9);
    }

    #[test]
    fn transpose_is_not_completely_positive() {
        let t = SuperOp::from_map(Region::single(0), vec![2], |x| x.transpose());
        let report = cpt_check(&t, 1e-9).unwrap();
        assert_abs_diff_eq!(report.min_choi_eigenvalue, -1.0, epsilon = 1e-12);
        assert!(!report.is_cpt);
        assert!(report.trace_defect < 1e-14);
    }

    #[test]
    fn identity_choi_is_maximally_entangled_projector() {
        let c = choi(&qubit_identity()).unwrap();
        // |Ω><Ω| with |Ω> = |00> + |11>
        let mut omega = DVector::<C64>::zeros(4);
        omega[0] = C64::new(1.0, 0.0);
        omega[3] = C64::new(1.0, 0.0);
        assert_eq!(c, &omega * omega.adjoint());
        assert!(cpt_check(&qubit_identity(), 1e-9).unwrap().is_cpt);
    }

    #[test]
    fn grid_value_is_attained() {
        // exact-small returns a value attained by an explicit rank-one input
        let s = lindblad_generator(&(pauli::sigma_x() * C64::new(0.4, 0.0)), &[pauli::sigma_minus()]);
        let t = SuperOp::qubit(s).unwrap();
        let est = one_to_one_norm(&t, &NormOptions::exact_small()).unwrap();
        let probe = one_to_one_ratio(&t, &pauli::sigma_plus());
        assert!(est.value + 1e-12 >= probe);
    }
}
