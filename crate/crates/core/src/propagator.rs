// Copyright 2026 The lrsim Authors
// SPDX-License-Identifier: Apache-2.0

//! Reference propagation: observables backward under `ℒ_V` (Heisenberg
//! picture), states forward under the adjoint generator.
//!
//! Fixed-step classical Runge-Kutta with steps aligned to profile
//! breakpoints and to requested output times. With halving enabled every
//! run is repeated at half the step; the half-step result is returned and
//! the difference of the two is reported as the numerical error.

use serde::{Deserialize, Serialize};

use crate::algebra::{adjoint, spectral_norm, Matrix, Op, SuperOp, C64, ZERO};
use crate::error::{Error, Result};
use crate::lattice::Region;
use crate::liouvillian::{HostGenerator, LiouvillianSpec, LocalTerm, DEFAULT_NORM_GRID};

/// Integrator settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    /// Target for `‖ℓ‖ 𝒵 h`.
    pub step_budget: f64,
    /// Hard cap on the step.
    pub max_step: f64,
    /// Accept once the Richardson error estimate of the half-step result
    /// (halving difference over 15) is below this.
    pub tolerance: f64,
    pub halving: bool,
    /// Further halvings when the tolerance is missed.
    pub max_refinements: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            step_budget: 0.05,
            max_step: 0.05,
            tolerance: 1e-9,
            halving: true,
            max_refinements: 3,
        }
    }
}

impl SolverConfig {
    /// Base step for a model on the window `[s, t]`.
    pub fn step_for(&self, spec: &LiouvillianSpec, window: (f64, f64)) -> f64 {
        let z = spec.max_neighbors().unwrap_or(0) as f64;
        let rate = spec.ell_norm(window, DEFAULT_NORM_GRID) * z;
        if rate > 0.0 {
            (self.step_budget / rate).min(self.max_step)
        } else {
            self.max_step
        }
    }
}

/// Result of one propagation.
#[derive(Clone, Debug)]
pub struct Evolution {
    pub op: Op,
    /// `∞`-norm of the difference between the two finest runs (Frobenius
    /// norm for large regions); `NaN` without halving.
    pub error_estimate: f64,
    /// Step used for the returned result.
    pub step: f64,
}

/// Integrate `dX/du = G(start + dir u) X` from `u = 0`, returning `X` at each
/// of the increasing `marks` (the last one is the endpoint).
fn rk4_marks(
    gen: &HostGenerator,
    x0: &[C64],
    start: f64,
    dir: f64,
    marks: &[f64],
    h_max: f64,
) -> Vec<Vec<C64>> {
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut out = Vec::with_capacity(marks.len());
    if gen.is_empty() {
        return marks.iter().map(|_| x.clone()).collect();
    }
    let total = marks.last().copied().unwrap_or(0.0);
    let mut edges: Vec<f64> = gen
        .breakpoints()
        .into_iter()
        .map(|b| dir * (b - start))
        .filter(|&u| u > 0.0 && u < total)
        .collect();
    edges.extend(marks.iter().copied());
    edges.push(0.0);
    edges.sort_by(f64::total_cmp);
    edges.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * (1.0 + b.abs()));

    let autonomous = gen.is_autonomous();
    let fixed = autonomous.then(|| gen.coefficients(start, None));
    let mut k1 = vec![ZERO; n];
    let mut k2 = vec![ZERO; n];
    let mut k3 = vec![ZERO; n];
    let mut k4 = vec![ZERO; n];
    let mut tmp = vec![ZERO; n];
    let mut mark = 0;
    while mark < marks.len() && marks[mark] <= 0.0 {
        out.push(x.clone());
        mark += 1;
    }
    for w in edges.windows(2) {
        let (u0, u1) = (w[0], w[1]);
        let len = u1 - u0;
        if len > 0.0 {
            let (a, b) = (start + dir * u0, start + dir * u1);
            let seg = (a.min(b), a.max(b));
            let steps = (len / h_max).ceil().max(1.0) as usize;
            let h = len / steps as f64;
            for k in 0..steps {
                let u = u0 + h * k as f64;
                let coeff = |uu: f64| -> Vec<f64> {
                    match &fixed {
                        Some(c) => c.clone(),
                        None => gen.coefficients(start + dir * uu, Some(seg)),
                    }
                };
                let c1 = coeff(u);
                let c2 = coeff(u + 0.5 * h);
                let c4 = coeff(u + h);
                gen.apply(&c1, &x, &mut k1);
                axpy_into(&x, 0.5 * h, &k1, &mut tmp);
                gen.apply(&c2, &tmp, &mut k2);
                axpy_into(&x, 0.5 * h, &k2, &mut tmp);
                gen.apply(&c2, &tmp, &mut k3);
                axpy_into(&x, h, &k3, &mut tmp);
                gen.apply(&c4, &tmp, &mut k4);
                let s = h / 6.0;
                for i in 0..n {
                    x[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * s;
                }
            }
        }
        while mark < marks.len() && marks[mark] <= u1 + 1e-14 * (1.0 + u1.abs()) {
            out.push(x.clone());
            mark += 1;
        }
    }
    while out.len() < marks.len() {
        out.push(x.clone());
    }
    out
}

fn axpy_into(x: &[C64], a: f64, y: &[C64], out: &mut [C64]) {
    for ((o, xi), yi) in out.iter_mut().zip(x).zip(y) {
        *o = xi + yi * a;
    }
}

/// Largest operator dimension for which differences are measured in the
/// `∞`-norm; above it the Frobenius norm (an upper bound) is used.
const SPECTRAL_DIFF_LIMIT: usize = 1024;

fn operator_diff(a: &[C64], b: &[C64], d: usize) -> f64 {
    if d <= SPECTRAL_DIFF_LIMIT {
        let diff = Matrix::from_fn(d, d, |i, j| a[i + d * j] - b[i + d * j]);
        spectral_norm(&diff)
    } else {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// Run with halving and refinement; returns the finest results, the error
/// estimate per mark and the step used.
fn integrate(
    gen: &HostGenerator,
    x0: &[C64],
    start: f64,
    dir: f64,
    marks: &[f64],
    h: f64,
    solver: &SolverConfig,
) -> (Vec<Vec<C64>>, Vec<f64>, f64) {
    let mut h = h;
    let mut coarse = rk4_marks(gen, x0, start, dir, marks, h);
    if !solver.halving || gen.is_empty() {
        let errs = if gen.is_empty() { 0.0 } else { f64::NAN };
        return (coarse, vec![errs; marks.len()], h);
    }
    let mut refinements = 0;
    loop {
        h *= 0.5;
        let fine = rk4_marks(gen, x0, start, dir, marks, h);
        let errs: Vec<f64> = coarse
            .iter()
            .zip(&fine)
            .map(|(c, f)| operator_diff(c, f, gen.dim()))
            .collect();
        let worst = errs.iter().copied().fold(0.0, f64::max);
        // Richardson: the half-step result is off by about diff / 15.
        if worst / 15.0 <= solver.tolerance || refinements >= solver.max_refinements {
            return (fine, errs, h);
        }
        refinements += 1;
        coarse = fine;
    }
}

fn check_order(s: f64, t: f64) -> Result<()> {
    if s > t || !s.is_finite() || !t.is_finite() {
        return Err(Error::TimeOrder { start: s, end: t });
    }
    Ok(())
}

/// Region on which `τ_V O` is computed: the closure of the region of `O`
/// under the supports inside `V`.
pub fn working_region(spec: &LiouvillianSpec, v: &Region, op_region: &Region) -> Region {
    spec.hypergraph().closure(op_region, v)
}

/// `τ_V(s, t) O`, computed on the working region.
pub fn evolve_observable(
    spec: &LiouvillianSpec,
    v: &Region,
    op: &Op,
    s: f64,
    t: f64,
    solver: &SolverConfig,
) -> Result<Evolution> {
    Ok(evolve_observable_at(spec, v, op, &[s], t, solver)?.remove(0))
}

/// `τ_V(s_k, t) O` for several start times `s_k ≤ t` from one backward run.
pub fn evolve_observable_at(
    spec: &LiouvillianSpec,
    v: &Region,
    op: &Op,
    starts: &[f64],
    t: f64,
    solver: &SolverConfig,
) -> Result<Vec<Evolution>> {
    let host = working_region(spec, v, op.region());
    let gen = spec.generator_on(&host, v)?;
    evolve_with(spec, &gen, op, starts, t, solver)
}

/// Backward evolution with a precompiled generator on the region of `gen`.
pub fn evolve_with(
    spec: &LiouvillianSpec,
    gen: &HostGenerator,
    op: &Op,
    starts: &[f64],
    t: f64,
    solver: &SolverConfig,
) -> Result<Vec<Evolution>> {
    for &s in starts {
        check_order(s, t)?;
    }
    let o = op.embed(gen.region(), spec.site_dims())?;
    let earliest = starts.iter().copied().fold(t, f64::min);
    let h = solver.step_for(spec, (earliest, t));
    let mut lags: Vec<f64> = starts.iter().map(|s| t - s).collect();
    lags.sort_by(f64::total_cmp);
    lags.dedup();
    let (xs, errs, step) = integrate(gen, o.matrix().as_slice(), t, -1.0, &lags, h, solver);
    let d = gen.dim();
    starts
        .iter()
        .map(|s| {
            let k = lags
                .iter()
                .position(|&l| l == t - s)
                .expect("lag recorded");
            Ok(Evolution {
                op: Op::new(
                    gen.region().clone(),
                    gen.dims().to_vec(),
                    Matrix::from_column_slice(d, d, &xs[k]),
                )?,
                error_estimate: errs[k],
                step,
            })
        })
        .collect()
}

/// Tolerance for density-matrix validation.
pub const STATE_TOL: f64 = 1e-9;

pub fn check_state(rho: &Op) -> Result<()> {
    let m = rho.matrix();
    let herm = crate::algebra::hermiticity_defect(m);
    if herm > STATE_TOL {
        return Err(Error::InvalidState(format!("not Hermitian ({herm:e})")));
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
        return Err(Error::InvalidState(format!("trace {tr}")));
    }
    let sym = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let min = sym
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    if min < -STATE_TOL {
        return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
    }
    Ok(())
}

/// `ρ(t) = τ_V(s, t)† ρ` on the region of `ρ`. Terms inside `V` meeting that
/// region must lie inside it.
pub fn propagate_state(
    spec: &LiouvillianSpec,
    v: &Region,
    rho: &Op,
    s: f64,
    t: f64,
    solver: &SolverConfig,
) -> Result<Evolution> {
    check_order(s, t)?;
    check_state(rho)?;
    let gen = spec.generator_on(rho.region(), v)?.adjoint();
    let h = solver.step_for(spec, (s, t));
    let (xs, errs, step) = integrate(&gen, rho.matrix().as_slice(), s, 1.0, &[t - s], h, solver);
    let d = gen.dim();
    Ok(Evolution {
        op: Op::new(
            rho.region().clone(),
            rho.dims().to_vec(),
            Matrix::from_column_slice(d, d, &xs[0]),
        )?,
        error_estimate: errs[0],
        step,
    })
}

/// `(Tr[ρ τ(s,t) O], Tr[τ(s,t)†ρ O])` under the full Liouvillian, both on
/// the region of `ρ`.
pub fn pairing_check(
    spec: &LiouvillianSpec,
    rho: &Op,
    op: &Op,
    s: f64,
    t: f64,
    solver: &SolverConfig,
) -> Result<(f64, f64)> {
    check_state(rho)?;
    let all = spec.all_sites();
    let host = rho.region();
    let o = op.embed(host, spec.site_dims())?;
    let gen = spec.generator_on(host, &all)?;
    let heis = evolve_with(spec, &gen, &o, &[s], t, solver)?.remove(0).op;
    let schr = propagate_state(spec, &all, rho, s, t, solver)?.op;
    let a = (rho.matrix() * heis.matrix()).trace().re;
    let b = (schr.matrix() * o.matrix()).trace().re;
    Ok((a, b))
}

/// `τ_Z(r, t)` of a single term as a superoperator on its support. Constant
/// profiles use the matrix exponential; otherwise each matrix unit is
/// integrated.
pub fn term_channel(term: &LocalTerm, r: f64, t: f64, solver: &SolverConfig) -> Result<SuperOp> {
    check_order(r, t)?;
    let base = term.unscaled_superop();
    if term.profile().is_constant() {
        let c = term.profile().value(r) * (t - r);
        return Ok(base.exp_scaled(C64::new(c, 0.0)));
    }
    let gen = HostGenerator::for_term(term);
    let rate = term.base_norm() * term.profile().sup_abs(r, t, DEFAULT_NORM_GRID);
    let h = if rate > 0.0 {
        (solver.step_budget / rate).min(solver.max_step)
    } else {
        solver.max_step
    };
    let d = gen.dim();
    let dims = term.dims().to_vec();
    let mut matrix = Matrix::zeros(d * d, d * d);
    let mut unit = vec![ZERO; d * d];
    for k in 0..d * d {
        unit[k] = C64::new(1.0, 0.0);
        let (xs, _, _) = integrate(&gen, &unit, t, -1.0, &[t - r], h, solver);
        matrix.column_mut(k).copy_from_slice(&xs[0]);
        unit[k] = ZERO;
    }
    SuperOp::new(term.support().clone(), dims, matrix)
}

/// Dense `τ_V(s, t)` on a small host region for a time-independent model.
pub fn dense_propagator(
    spec: &LiouvillianSpec,
    host: &Region,
    v: &Region,
    s: f64,
    t: f64,
) -> Result<SuperOp> {
    check_order(s, t)?;
    let gen = spec.generator_on(host, v)?;
    if !gen.is_autonomous() {
        return Err(Error::Model(
            "dense propagator needs time-independent profiles".into(),
        ));
    }
    let l = gen.materialize(&gen.coefficients(s, None));
    Ok(l.exp_scaled(C64::new(t - s, 0.0)))
}

/// Schrödinger-picture channel `τ_V(s, t)†` on a small host region.
pub fn dense_channel(
    spec: &LiouvillianSpec,
    host: &Region,
    v: &Region,
    s: f64,
    t: f64,
) -> Result<SuperOp> {
    Ok(adjoint(&dense_propagator(spec, host, v, s, t)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::pauli::{sigma_minus, sigma_z};
    use crate::algebra::{cpt_check, SiteDims};
    use crate::lattice::LatticeGeometry;
    use crate::liouvillian::{presets, TimeProfile};
    use approx::assert_abs_diff_eq;

    fn damping(gamma: f64) -> LiouvillianSpec {
        let term = LocalTerm::qubits(
            Region::single(0),
            Matrix::zeros(2, 2),
            vec![sigma_minus() * C64::new(gamma.sqrt(), 0.0)],
            TimeProfile::default(),
        )
        .unwrap();
        LiouvillianSpec::new(LatticeGeometry::chain(1), SiteDims::qubits(), vec![term]).unwrap()
    }

    #[test]
    fn damping_closed_form() {
        let gamma = 0.6;
        let spec = damping(gamma);
        let o = Op::qubits(Region::single(0), sigma_z()).unwrap();
        let delta = 1.3;
        let ev = evolve_observable(&spec, &spec.all_sites(), &o, 0.2, 0.2 + delta, &SolverConfig::default())
            .unwrap();
        let e = (-gamma * delta).exp();
        let want = sigma_z() * C64::new(e, 0.0) + Matrix::identity(2, 2) * C64::new(e - 1.0, 0.0);
        assert_abs_diff_eq!((ev.op.matrix() - want).norm(), 0.0, epsilon = 1e-9);
        assert!(ev.error_estimate / 15.0 <= 1e-9);
    }

    #[test]
    fn same_time_is_identity_map() {
        let spec = damping(1.0);
        let o = Op::qubits(Region::single(0), sigma_z()).unwrap();
        let ev = evolve_observable(&spec, &spec.all_sites(), &o, 0.5, 0.5, &SolverConfig::default()).unwrap();
        assert_eq!(ev.op.matrix(), o.matrix());
        assert!(evolve_observable(&spec, &spec.all_sites(), &o, 0.6, 0.5, &SolverConfig::default()).is_err());
    }

    #[test]
    fn damping_reaches_ground_state() {
        let spec = damping(2.0);
        let mut rho = Matrix::zeros(2, 2);
        rho[(0, 0)] = C64::new(1.0, 0.0);
        let rho = Op::qubits(Region::single(0), rho).unwrap();
        let ev = propagate_state(&spec, &spec.all_sites(), &rho, 0.0, 12.0, &SolverConfig::default()).unwrap();
        assert_abs_diff_eq!(ev.op.matrix()[(1, 1)].re, 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(ev.op.trace().re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn quench_steps_align_with_breakpoint() {
        // c = 1 before t = 0.5, 0 after: only the first half evolves.
        let gamma = 1.0;
        let term = LocalTerm::qubits(
            Region::single(0),
            Matrix::zeros(2, 2),
            vec![sigma_minus() * C64::new(gamma, 0.0)],
            TimeProfile::Quench {
                time: 0.5,
                before: 1.0,
                after: 0.0,
            },
        )
        .unwrap();
        let spec = LiouvillianSpec::new(LatticeGeometry::chain(1), SiteDims::qubits(), vec![term.clone()]).unwrap();
        let o = Op::qubits(Region::single(0), sigma_z()).unwrap();
        let ev = evolve_observable(&spec, &spec.all_sites(), &o, 0.0, 1.0, &SolverConfig::default()).unwrap();
        let e = (-0.5f64).exp();
        assert_abs_diff_eq!(ev.op.matrix()[(0, 0)].re, 2.0 * e - 1.0, epsilon = 1e-9);
        let ch = term_channel(&term, 0.0, 1.0, &SolverConfig::default()).unwrap();
        let img = ch.apply_matrix(&sigma_z());
        assert_abs_diff_eq!(img[(0, 0)].re, 2.0 * e - 1.0, epsilon = 1e-9);
    }

    #[test]
    fn two_site_channel_is_cpt() {
        let spec = presets::dissipative_ising(LatticeGeometry::chain(2), &Default::default()).unwrap();
        let all = spec.all_sites();
        let ch = dense_channel(&spec, &all, &all, 0.0, 0.3).unwrap();
        assert!(cpt_check(&ch, 1e-9).unwrap().is_cpt);
    }
}
