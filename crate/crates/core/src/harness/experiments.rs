// Copyright 2026 The lrsim Authors
// SPDX-License-Identifier: Apache-2.0

//! Experiment drivers. Each returns typed rows; [`super::Report`] turns them
//! into CSV.

use std::collections::HashMap;

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::config::{Config, ObservableConfig};
use crate::algebra::{
    adjoint, cpt_check, inf_inf_norm_direct, one_to_one_norm, random, spectral_norm, Matrix,
    NormOptions, Op, C64,
};
use crate::bounds::{
    check_tail_range, exp_tail_sum, lr_bound, partial_exp_sum, quasi_locality_bound,
    trotter_total_bound, BoundParams, ConeDepth,
};
use crate::error::{Error, Result};
use crate::lattice::{ceil_ratio, Region};
use crate::liouvillian::LiouvillianSpec;
use crate::propagator::{evolve_observable_at, pairing_check, term_channel, working_region};
use crate::trotter::{
    build_circuit, light_cone_schedule, measure_error_with, reference_images, ReferenceImages,
};

/// Slack added to every bound comparison.
pub const BOUND_SLACK: f64 = 1e-7;

/// Refuse exact propagation on regions above the configured size.
pub fn guard(cfg: &Config, region: &Region) -> Result<()> {
    if region.len() > cfg.limits.max_qubits {
        return Err(Error::ScaleLimit(format!(
            "exact propagation on {} sites exceeds the limit of {} (raise limits.max_qubits)",
            region.len(),
            cfg.limits.max_qubits
        )));
    }
    Ok(())
}

fn max_finite(acc: f64, x: f64) -> f64 {
    if x.is_finite() {
        acc.max(x)
    } else {
        acc
    }
}

/// `‖[A, ·]‖_{∞→∞}`: the spread of the spectrum for Hermitian `A`, else the
/// upper estimate `2‖A‖`.
fn commutator_norm(a: &Op) -> f64 {
    if a.is_hermitian(1e-12) {
        let h = (a.matrix() + a.matrix().adjoint()) * C64::new(0.5, 0.0);
        let ev = h.symmetric_eigenvalues();
        let max = ev.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = ev.iter().copied().fold(f64::INFINITY, f64::min);
        max - min
    } else {
        2.0 * spectral_norm(a.matrix())
    }
}

fn lags_window(lags: &[f64]) -> Result<f64> {
    if lags.is_empty() {
        return Err(Error::Config("at least one lag is required".into()));
    }
    if lags.iter().any(|l| !(*l >= 0.0) || !l.is_finite()) {
        return Err(Error::Config(format!("lags must be finite and >= 0: {lags:?}")));
    }
    Ok(lags.iter().copied().fold(0.0, f64::max))
}

#[derive(Clone, Debug, PartialEq)]
pub struct LrRow {
    pub probe_site: usize,
    pub distance: f64,
    pub r: f64,
    pub t: f64,
    pub measured: f64,
    pub bound: f64,
    pub error_estimate: f64,
}

impl LrRow {
    pub fn lag(&self) -> f64 {
        self.t - self.r
    }

    pub fn holds(&self) -> bool {
        self.measured <= self.bound + BOUND_SLACK
    }
}

#[derive(Clone, Debug)]
pub struct LrOutcome {
    pub params: BoundParams,
    pub rows: Vec<LrRow>,
}

/// `‖[O_X, τ(r,t) O_Y]‖` against the Lieb-Robinson bound, with `t` the
/// largest lag and `r = t - lag`.
pub fn run_lr_experiment(cfg: &Config) -> Result<LrOutcome> {
    let spec = cfg.model.build()?;
    let lr = &cfg.lr;
    let o_y = lr.observable.build(&spec)?;
    let all = spec.all_sites();
    guard(cfg, &working_region(&spec, &all, o_y.region()))?;
    let t = lags_window(&lr.lags)?;
    let params = BoundParams::for_model(&spec, cfg.model.kappa, (0.0, t))?;
    let starts: Vec<f64> = lr.lags.iter().map(|l| t - l).collect();
    let evolved = evolve_observable_at(&spec, &all, &o_y, &starts, t, &cfg.solver)?;
    let hg = spec.hypergraph();
    let vol_y = hg.volume(&hg.extension(o_y.region()));
    let norm_o = spectral_norm(o_y.matrix());
    let mut rows = Vec::new();
    for &x in &lr.probe_sites {
        let probe = ObservableConfig::new(&[x], &lr.probe_op).build(&spec)?;
        let x_region = probe.region().clone();
        let vol_x = hg.volume(&hg.extension(&x_region));
        let d = spec.geometry().distance(&x_region, o_y.region())?;
        let norm_k = commutator_norm(&probe);
        for (ev, &r) in evolved.iter().zip(&starts) {
            let p = probe.embed(ev.op.region(), spec.site_dims())?;
            let comm = p.matrix() * ev.op.matrix() - ev.op.matrix() * p.matrix();
            rows.push(LrRow {
                probe_site: x,
                distance: d,
                r,
                t,
                measured: spectral_norm(&comm),
                bound: lr_bound(&params, vol_x, vol_y, d, r, t, norm_k, norm_o)?,
                error_estimate: ev.error_estimate,
            });
        }
    }
    Ok(LrOutcome { params, rows })
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuasilocalRow {
    pub radius: u64,
    pub depth: ConeDepth,
    pub r: f64,
    pub t: f64,
    pub measured: f64,
    /// `None` when `D` is outside the theorem's range.
    pub bound: Option<f64>,
    pub error_estimate: f64,
}

impl QuasilocalRow {
    pub fn lag(&self) -> f64 {
        self.t - self.r
    }

    pub fn holds(&self) -> bool {
        match self.bound {
            Some(b) => self.measured <= b + BOUND_SLACK,
            None => false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct QuasilocalOutcome {
    pub params: BoundParams,
    pub rows: Vec<QuasilocalRow>,
    /// Rows whose depth is outside the theorem's range.
    pub precondition_failures: Vec<String>,
}

/// `‖τ(r,t) O_Y - τ_V̄(r,t) O_Y‖` for balls `V` of the configured radii.
/// When `V` is the whole lattice the depth is saturated and the bound is 0.
pub fn run_quasilocal_experiment(cfg: &Config) -> Result<QuasilocalOutcome> {
    let spec = cfg.model.build()?;
    let ql = &cfg.quasilocal;
    let o_y = ql.observable.build(&spec)?;
    let all = spec.all_sites();
    let host = working_region(&spec, &all, o_y.region());
    guard(cfg, &host)?;
    let t = lags_window(&ql.lags)?;
    let params = BoundParams::for_model(&spec, cfg.model.kappa, (0.0, t))?;
    let starts: Vec<f64> = ql.lags.iter().map(|l| t - l).collect();
    let full = evolve_observable_at(&spec, &all, &o_y, &starts, t, &cfg.solver)?;
    let norm_o = spectral_norm(o_y.matrix());
    let a = spec.range();
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for &radius in &ql.radii {
        let v = spec.geometry().ball(o_y.region(), a * radius as f64)?;
        let outside = all.difference(&v);
        let depth = if outside.is_empty() {
            ConeDepth::Saturated
        } else {
            ConeDepth::Finite(ceil_ratio(spec.geometry().distance(o_y.region(), &outside)?, a))
        };
        let vbar = spec.hypergraph().extension(&v).union(o_y.region());
        let truncated = evolve_observable_at(&spec, &vbar, &o_y, &starts, t, &cfg.solver)?;
        for ((f, tr), &r) in full.iter().zip(&truncated).zip(&starts) {
            let tr_op = tr.op.embed(f.op.region(), spec.site_dims())?;
            let measured = spectral_norm(&(f.op.matrix() - tr_op.matrix()));
            let bound = match depth {
                ConeDepth::Saturated => Some(0.0),
                ConeDepth::Finite(d) => match quasi_locality_bound(&params, d, r, t, norm_o) {
                    Ok(b) => Some(b),
                    Err(Error::Precondition(msg)) => {
                        failures.push(format!("radius {radius}: {msg}"));
                        None
                    }
                    Err(e) => return Err(e),
                },
            };
            rows.push(QuasilocalRow {
                radius,
                depth,
                r,
                t,
                measured,
                bound,
                error_estimate: max_finite(f.error_estimate, tr.error_estimate),
            });
        }
    }
    Ok(QuasilocalOutcome {
        params,
        rows,
        precondition_failures: failures,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrotterRow {
    pub dt: f64,
    pub slices: usize,
    pub observed_sup: f64,
    pub bound: Option<f64>,
    pub numerical_error: f64,
}

impl TrotterRow {
    pub fn holds(&self) -> bool {
        match self.bound {
            Some(b) => self.observed_sup <= b + BOUND_SLACK,
            None => false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct TrotterOutcome {
    pub params: BoundParams,
    pub velocity: f64,
    pub rows: Vec<TrotterRow>,
    /// Serialized circuit for every `dt`, in sweep order.
    pub circuits: Vec<String>,
    pub precondition_failures: Vec<String>,
}

/// Circuit error against the total Trotter bound over the `dt` sweep.
pub fn run_trotter_experiment(cfg: &Config) -> Result<TrotterOutcome> {
    let spec = cfg.model.build()?;
    run_trotter_on(cfg, &spec)
}

/// As [`run_trotter_experiment`] on an explicit model.
pub fn run_trotter_on(cfg: &Config, spec: &LiouvillianSpec) -> Result<TrotterOutcome> {
    let tc = &cfg.trotter;
    let y = Region::new(tc.y_sites.iter().copied());
    if y.is_empty() {
        return Err(Error::Config("trotter.y_sites is empty".into()));
    }
    spec.geometry().check_region(&y)?;
    if tc.dts.is_empty() {
        return Err(Error::Config("trotter.dts is empty".into()));
    }
    let params = BoundParams::for_model(spec, cfg.model.kappa, (0.0, tc.t_total))?;
    let velocity = tc.velocity.unwrap_or_else(|| params.v());
    let mut cache: HashMap<(Region, u64, u64), ReferenceImages> = HashMap::new();
    let mut rows = Vec::new();
    let mut circuits = Vec::new();
    let mut failures = Vec::new();
    for &dt in &tc.dts {
        let sched = light_cone_schedule(spec, &y, tc.t_total, dt, tc.d0, velocity)?;
        let circuit = build_circuit(spec, &sched, tc.ordering, tc.averaged)?;
        let vbar = sched.extended().last().cloned().unwrap_or_else(|| y.clone());
        let reference_region = working_region(spec, &vbar, &y);
        guard(cfg, &circuit.footprint().union(&reference_region).union(&y))?;
        let times = sched.times();
        let key = (
            vbar,
            times[0].to_bits(),
            times.last().expect("nonempty").to_bits(),
        );
        if !cache.contains_key(&key) {
            let images = reference_images(spec, &sched, &cfg.solver)?;
            cache.insert(key.clone(), images);
        }
        let measured = measure_error_with(
            spec,
            &sched,
            &circuit,
            &cache[&key],
            tc.samples,
            cfg.seed,
            &cfg.solver,
        )?;
        let bound = match trotter_total_bound(&params, times, sched.depths(), sched.volumes()) {
            Ok(b) => Some(b.total),
            Err(Error::Precondition(msg)) => {
                failures.push(format!("dt {dt}: {msg}"));
                None
            }
            Err(e) => return Err(e),
        };
        rows.push(TrotterRow {
            dt,
            slices: sched.len(),
            observed_sup: measured.observed_sup,
            bound,
            numerical_error: measured.numerical_error,
        });
        circuits.push(circuit.to_text(spec));
    }
    Ok(TrotterOutcome {
        params,
        velocity,
        rows,
        circuits,
        precondition_failures: failures,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SelftestRow {
    pub check: String,
    pub cases: usize,
    pub violations: usize,
    /// Largest observed value relative to its limit (`≤ 1` passes).
    pub worst_margin: f64,
}

#[derive(Clone, Debug)]
pub struct SelftestOutcome {
    pub params: BoundParams,
    pub rows: Vec<SelftestRow>,
}

/// Relative slack for floating-point equality cases of the series lemmas.
const SERIES_REL_TOL: f64 = 1e-12;
pub const DUALITY_TOL: f64 = 1e-6;
pub const CPT_TOL: f64 = 1e-9;

/// Series-lemma grids, norm duality and CPT spot checks.
pub fn run_bounds_selftest(cfg: &Config) -> Result<SelftestOutcome> {
    let spec = cfg.model.build()?;
    let params = BoundParams::for_model(&spec, cfg.model.kappa, (0.0, 1.0))?;
    let mut rows = Vec::new();

    let mut row = SelftestRow {
        check: "partial-exp-sum".into(),
        cases: 0,
        violations: 0,
        worst_margin: 0.0,
    };
    for k in 0..=50u32 {
        let x = f64::from(k) / 10.0;
        for n in 0..=30 {
            let (tail, bound) = partial_exp_sum(x, n)?;
            row.cases += 1;
            if tail > bound * (1.0 + SERIES_REL_TOL) {
                row.violations += 1;
            }
            row.worst_margin = row.worst_margin.max(tail / bound);
        }
    }
    rows.push(row);

    let mut row = SelftestRow {
        check: "exp-tail-sum".into(),
        cases: 0,
        violations: 0,
        worst_margin: 0.0,
    };
    for kappa in [0.0, 0.5, 1.0, 2.0] {
        for d in 0..=40 {
            if check_tail_range(kappa, d).is_err() {
                continue;
            }
            let (tail, bound) = exp_tail_sum(kappa, d)?;
            row.cases += 1;
            if tail > bound * (1.0 + SERIES_REL_TOL) {
                row.violations += 1;
            }
            row.worst_margin = row.worst_margin.max(tail / bound);
        }
    }
    rows.push(row);

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut row = SelftestRow {
        check: "norm-duality".into(),
        cases: 0,
        violations: 0,
        worst_margin: 0.0,
    };
    for k in 0..cfg.selftest.duality_cases {
        let t = random::superop(2, &mut rng);
        let opts = NormOptions::default().with_seed(cfg.seed.wrapping_add(k as u64));
        let direct = inf_inf_norm_direct(&t, &opts)?.value;
        let dual = one_to_one_norm(&adjoint(&t), &NormOptions::exact_small())?.value;
        let gap = (direct - dual).abs();
        row.cases += 1;
        if gap > DUALITY_TOL {
            row.violations += 1;
        }
        row.worst_margin = row.worst_margin.max(gap / DUALITY_TOL);
    }
    rows.push(row);

    let mut row = SelftestRow {
        check: "cpt-unit-norm".into(),
        cases: 0,
        violations: 0,
        worst_margin: 0.0,
    };
    for k in 0..cfg.selftest.cpt_cases {
        let t = random::cpt_channel(2, 1 + k % 4, &mut rng);
        let norm = one_to_one_norm(&t, &NormOptions::exact_small())?.value;
        let report = cpt_check(&t, CPT_TOL)?;
        let gap = (norm - 1.0).abs();
        row.cases += 1;
        if gap > DUALITY_TOL || !report.is_cpt {
            row.violations += 1;
        }
        row.worst_margin = row.worst_margin.max(gap / DUALITY_TOL);
    }
    rows.push(row);

    // Schrödinger channels of the model's own terms over a unit step.
    let mut row = SelftestRow {
        check: "term-channel-cpt".into(),
        cases: 0,
        violations: 0,
        worst_margin: 0.0,
    };
    for term in spec.terms().iter().filter(|t| t.support().len() <= 2) {
        let channel = adjoint(&term_channel(term, 0.0, 1.0, &cfg.solver)?);
        let report = cpt_check(&channel, CPT_TOL)?;
        row.cases += 1;
        if !report.is_cpt {
            row.violations += 1;
        }
        let worst = (-report.min_choi_eigenvalue)
            .max(report.trace_defect)
            .max(report.choi_hermiticity_defect);
        row.worst_margin = row.worst_margin.max(worst.max(0.0) / CPT_TOL);
    }
    rows.push(row);

    Ok(SelftestOutcome { params, rows })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimulateRow {
    pub t: f64,
    pub heisenberg: f64,
    pub schrodinger: f64,
}

impl SimulateRow {
    pub fn holds(&self) -> bool {
        (self.heisenberg - self.schrodinger).abs() <= BOUND_SLACK
    }
}

#[derive(Clone, Debug)]
pub struct SimulateOutcome {
    pub params: BoundParams,
    pub rows: Vec<SimulateRow>,
}

fn product_state(spec: &LiouvillianSpec, labels: &str) -> Result<Op> {
    let n = spec.geometry().n_sites();
    let labels: Vec<char> = if labels.is_empty() {
        vec!['0'; n]
    } else {
        labels.chars().collect()
    };
    if labels.len() != n {
        return Err(Error::Config(format!(
            "state `{}` needs one label per site ({n})",
            labels.iter().collect::<String>()
        )));
    }
    let s = 1.0 / 2f64.sqrt();
    let mut psi = DVector::from_element(1, C64::new(1.0, 0.0));
    for c in labels {
        let v = match c {
            '0' => [1.0, 0.0],
            '1' => [0.0, 1.0],
            '+' => [s, s],
            '-' => [s, -s],
            _ => return Err(Error::Config(format!("unknown state label `{c}`"))),
        };
        let local = DVector::from_vec(vec![C64::new(v[0], 0.0), C64::new(v[1], 0.0)]);
        psi = psi.kronecker(&local);
    }
    let rho: Matrix = &psi * psi.adjoint();
    Op::with_dims(spec.all_sites(), spec.site_dims(), rho)
}

/// `⟨O⟩(t)` from a product state, in both pictures.
pub fn run_simulate(cfg: &Config) -> Result<SimulateOutcome> {
    let spec = cfg.model.build()?;
    let sim = &cfg.simulate;
    guard(cfg, &spec.all_sites())?;
    let o = sim.observable.build(&spec)?;
    let rho = product_state(&spec, &sim.state)?;
    let t_max = sim.times.iter().copied().fold(0.0, f64::max);
    let params = BoundParams::for_model(&spec, cfg.model.kappa, (0.0, t_max))?;
    let mut rows = Vec::new();
    for &t in &sim.times {
        let (heisenberg, schrodinger) = pairing_check(&spec, &rho, &o, 0.0, t, &cfg.solver)?;
        rows.push(SimulateRow {
            t,
            heisenberg,
            schrodinger,
        });
    }
    Ok(SimulateOutcome { params, rows })
}
