// Copyright 2026 The lrsim Authors
// SPDX-License-Identifier: Apache-2.0

//! Trotter circuits of local channels, light-cone schedules and the
//! measured circuit error on a subsystem.
//!
//! Application order: the circuit is the operator product
//! `T_1 T_2 … T_N` with `T_n = τ_{Z_1} τ_{Z_2} … τ_{Z_k}`, so acting on an
//! observable slice `N` comes first and, inside a slice, the last listed
//! channel comes first.

use std::collections::HashMap;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::kernel::{self, LocalMap, SlotMap};
use crate::algebra::{hermitian_basis, hs_inner, random, spectral_norm, Matrix, Op, ZERO};
use crate::bounds::ConeDepth;
use crate::error::{Error, Result};
use crate::lattice::{ceil_ratio, Region};
use crate::liouvillian::{averaged_term, LiouvillianSpec};
use crate::propagator::{evolve_observable, term_channel, working_region, SolverConfig};

/// Times, nested regions and their derived cone data.
#[derive(Clone, Debug, PartialEq)]
pub struct Schedule {
    y: Region,
    times: Vec<f64>,
    regions: Vec<Region>,
    extended: Vec<Region>,
    depths: Vec<ConeDepth>,
    volumes: Vec<usize>,
}

impl Schedule {
    /// `times` are `t_0 ≤ … ≤ t_N`; `regions[n-1]` is `V_n`.
    pub fn new(spec: &LiouvillianSpec, y: &Region, times: Vec<f64>, regions: Vec<Region>) -> Result<Self> {
        if y.is_empty() {
            return Err(Error::EmptyRegion);
        }
        spec.geometry().check_region(y)?;
        if times.is_empty() || regions.len() + 1 != times.len() {
            return Err(Error::Schedule(format!(
                "{} times for {} regions",
                times.len(),
                regions.len()
            )));
        }
        if times.iter().any(|t| !t.is_finite()) || times.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Schedule("times must be finite and nondecreasing".into()));
        }
        for (k, v) in regions.iter().enumerate() {
            spec.geometry().check_region(v)?;
            if !y.is_subset(v) {
                return Err(Error::Schedule(format!("V_{} = {v} does not contain {y}", k + 1)));
            }
            if k > 0 && !regions[k - 1].is_subset(v) {
                return Err(Error::Schedule(format!("V_{} is not inside V_{}", k, k + 1)));
            }
        }
        let hg = spec.hypergraph();
        let all = spec.all_sites();
        let a = spec.range();
        let mut extended = Vec::new();
        let mut depths = Vec::new();
        let mut volumes = Vec::new();
        for v in &regions {
            let ext = hg.extension(v);
            let depth = if ext.union(v) == all || v == &all {
                ConeDepth::Saturated
            } else {
                let yd = spec.geometry().distance(y, &all.difference(v))?;
                ConeDepth::Finite(ceil_ratio(yd, a))
            };
            volumes.push(hg.volume(&ext));
            extended.push(ext);
            depths.push(depth);
        }
        Ok(Schedule {
            y: y.clone(),
            times,
            regions,
            extended,
            depths,
            volumes,
        })
    }

    pub fn y(&self) -> &Region {
        &self.y
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Number of slices `N`.
    pub fn len(&self) -> usize {
        self.regions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.regions.is_empty()
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    /// Extensions `V̄_n`.
    pub fn extended(&self) -> &[Region] {
        &self.extended
    }

    pub fn depths(&self) -> &[ConeDepth] {
        &self.depths
    }

    /// `vol V̄_n`.
    pub fn volumes(&self) -> &[usize] {
        &self.volumes
    }

    /// Union of `Y` and every `V̄_n`.
    pub fn footprint(&self) -> Region {
        self.extended.iter().fold(self.y.clone(), |acc, r| acc.union(r))
    }
}

/// Slices of length `dt` up to `t_total` (the last one may be shorter) with
/// `V_n` the ball of radius `a (D0 + ⌊v n dt⌋)` around `Y`.
pub fn light_cone_schedule(
    spec: &LiouvillianSpec,
    y: &Region,
    t_total: f64,
    dt: f64,
    d0: u64,
    v: f64,
) -> Result<Schedule> {
    if !(dt > 0.0) || !(t_total >= 0.0) || d0 < 1 || !(v >= 0.0) {
        return Err(Error::Schedule(format!(
            "need dt > 0, t_total >= 0, D0 >= 1, v >= 0 (got {dt}, {t_total}, {d0}, {v})"
        )));
    }
    let ratio = t_total / dt;
    let n = if (ratio - ratio.round()).abs() <= 1e-9 {
        ratio.round() as usize
    } else {
        ratio.ceil() as usize
    };
    let a = spec.range();
    let mut times = vec![0.0];
    let mut regions = Vec::new();
    for k in 1..=n {
        let t = if k == n { t_total } else { k as f64 * dt };
        times.push(t);
        let grow = (v * k as f64 * dt + 1e-9).floor();
        let radius = a * (d0 as f64 + grow);
        regions.push(spec.geometry().ball(y, radius)?);
    }
    Schedule::new(spec, y, times, regions)
}

/// Order of channels inside a slice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Ordering {
    /// By smallest site, then by support.
    Lexicographic,
    /// Supports starting on even sites first, then odd ones.
    EvenOdd,
    /// Shuffled per slice from the seed.
    SeededRandom { seed: u64 },
}

/// One factor `τ_Z(r, t)` of the circuit.
#[derive(Clone, Debug, PartialEq)]
pub struct Channel {
    /// Slice index `n` (from 1).
    pub slice: usize,
    /// Index of the term in the Liouvillian.
    pub term: usize,
    pub support: Region,
    pub interval: (f64, f64),
    pub averaged: bool,
    /// Position inside the slice.
    pub order: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrotterCircuit {
    channels: Vec<Channel>,
    slices: usize,
}

impl TrotterCircuit {
    pub fn channels(&self) -> &[Channel] {
        &self.channels
    }

    pub fn slices(&self) -> usize {
        self.slices
    }

    /// Union of all channel supports.
    pub fn footprint(&self) -> Region {
        self.channels
            .iter()
            .fold(Region::empty(), |acc, c| acc.union(&c.support))
    }

    /// One line per channel:
    /// `slice <n> support <s,…> interval <r> <t> order <k> averaged <b> generator <tag>`.
    pub fn to_text(&self, spec: &LiouvillianSpec) -> String {
        let mut out = String::new();
        for c in &self.channels {
            let sites: Vec<String> = c.support.iter().map(|s| s.to_string()).collect();
            let _ = writeln!(
                out,
                "slice {} support {} interval {:?} {:?} order {} averaged {} generator {}",
                c.slice,
                sites.join(","),
                c.interval.0,
                c.interval.1,
                c.order,
                c.averaged,
                spec.terms()[c.term].tag()
            );
        }
        out
    }

    /// Inverse of [`Self::to_text`]; generators are looked up by support.
    pub fn from_text(spec: &LiouvillianSpec, text: &str) -> Result<Self> {
        let bad = |line: &str| Error::Schedule(format!("cannot parse circuit line `{line}`"));
        let mut channels = Vec::new();
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() < 12 || f[0] != "slice" || f[2] != "support" || f[4] != "interval" || f[7] != "order" || f[9] != "averaged" {
                return Err(bad(line));
            }
            let slice: usize = f[1].parse().map_err(|_| bad(line))?;
            let sites: Vec<usize> = f[3]
                .split(',')
                .map(|s| s.parse())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| bad(line))?;
            let support = Region::new(sites);
            let r: f64 = f[5].parse().map_err(|_| bad(line))?;
            let t: f64 = f[6].parse().map_err(|_| bad(line))?;
            let order: usize = f[8].parse().map_err(|_| bad(line))?;
            let averaged: bool = f[10].parse().map_err(|_| bad(line))?;
            let term = spec
                .terms()
                .iter()
                .position(|t| t.support() == &support)
                .ok_or_else(|| Error::Schedule(format!("no term on support {support}")))?;
            channels.push(Channel {
                slice,
                term,
                support,
                interval: (r, t),
                averaged,
                order,
            });
        }
        let slices = channels.iter().map(|c| c.slice).max().unwrap_or(0);
        Ok(TrotterCircuit { channels, slices })
    }
}

/// One channel per nonzero term inside `V̄_n` for every slice.
pub fn build_circuit(
    spec: &LiouvillianSpec,
    sched: &Schedule,
    ordering: Ordering,
    averaged: bool,
) -> Result<TrotterCircuit> {
    let mut channels = Vec::new();
    for n in 0..sched.len() {
        let mut idx = spec.terms_within(&sched.extended()[n]);
        let key = |k: &usize| {
            let s = spec.terms()[*k].support();
            (s.min_site().unwrap_or(0), s.clone())
        };
        match ordering {
            Ordering::Lexicographic => idx.sort_by_key(key),
            Ordering::EvenOdd => idx.sort_by_key(|k| {
                let (m, s) = key(k);
                (m % 2, m, s)
            }),
            Ordering::SeededRandom { seed } => {
                idx.sort_by_key(key);
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (n as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
                idx.shuffle(&mut rng);
            }
        }
        for (order, k) in idx.into_iter().enumerate() {
            channels.push(Channel {
                slice: n + 1,
                term: k,
                support: spec.terms()[k].support().clone(),
                interval: (sched.times()[n], sched.times()[n + 1]),
                averaged,
                order,
            });
        }
    }
    Ok(TrotterCircuit {
        channels,
        slices: sched.len(),
    })
}

/// Circuit with every channel materialized on its support.
#[derive(Clone, Debug)]
pub struct CompiledCircuit {
    circuit: TrotterCircuit,
    maps: Vec<LocalMap>,
}

impl CompiledCircuit {
    pub fn new(spec: &LiouvillianSpec, circuit: &TrotterCircuit, solver: &SolverConfig) -> Result<Self> {
        let mut cache: HashMap<(usize, u64, u64, bool), LocalMap> = HashMap::new();
        let mut maps = Vec::with_capacity(circuit.channels.len());
        for c in &circuit.channels {
            let key = (c.term, c.interval.0.to_bits(), c.interval.1.to_bits(), c.averaged);
            if let Some(m) = cache.get(&key) {
                maps.push(m.clone());
                continue;
            }
            let term = &spec.terms()[c.term];
            let (r, t) = c.interval;
            let superop = if c.averaged {
                term_channel(&averaged_term(term, r, t)?, r, t, solver)?
            } else {
                term_channel(term, r, t, solver)?
            };
            let m = LocalMap::new(superop.matrix());
            cache.insert(key, m.clone());
            maps.push(m);
        }
        Ok(CompiledCircuit {
            circuit: circuit.clone(),
            maps,
        })
    }

    pub fn circuit(&self) -> &TrotterCircuit {
        &self.circuit
    }

    /// `τ̃ O` on the region of `O`, which must contain every channel support.
    pub fn apply(&self, op: &Op) -> Result<Op> {
        let host = op.region();
        let mut x = op.matrix().clone();
        let mut y = Matrix::zeros(op.dim(), op.dim());
        let mut order: Vec<usize> = (0..self.circuit.channels.len()).collect();
        order.sort_by_key(|&k| {
            let c = &self.circuit.channels[k];
            (std::cmp::Reverse(c.slice), std::cmp::Reverse(c.order))
        });
        for k in order {
            let c = &self.circuit.channels[k];
            let positions = op.positions_of(&c.support).map_err(|_| Error::Straddle {
                support: c.support.clone(),
                region: host.clone(),
            })?;
            let slots = SlotMap::new(op.dims(), &positions);
            kernel::apply(&slots, &self.maps[k], x.as_slice(), y.as_mut_slice());
            std::mem::swap(&mut x, &mut y);
        }
        Op::new(host.clone(), op.dims().to_vec(), x)
    }
}

/// `τ̃ O`; the region of `O` must cover every channel support.
pub fn apply_circuit(
    spec: &LiouvillianSpec,
    circuit: &TrotterCircuit,
    op: &Op,
    solver: &SolverConfig,
) -> Result<Op> {
    CompiledCircuit::new(spec, circuit, solver)?.apply(op)
}

/// Exact images `τ_{V̄_N}(t_0, t_N) B_k` of the Hermitian basis of `Y`.
#[derive(Clone, Debug)]
pub struct ReferenceImages {
    pub region: Region,
    pub images: Vec<Op>,
    /// Largest integrator error estimate over the basis.
    pub numerical_error: f64,
}

pub fn reference_images(
    spec: &LiouvillianSpec,
    sched: &Schedule,
    solver: &SolverConfig,
) -> Result<ReferenceImages> {
    let y = sched.y();
    let v = sched.extended().last().cloned().unwrap_or_else(|| y.clone());
    let region = working_region(spec, &v, y);
    let (t0, tn) = (sched.times()[0], *sched.times().last().expect("nonempty"));
    let dims = spec.site_dims().dims_of(y);
    let mut images = Vec::new();
    let mut numerical_error: f64 = 0.0;
    for b in basis_for(&dims) {
        let o = Op::new(y.clone(), dims.clone(), b)?;
        let ev = evolve_observable(spec, &v, &o, t0, tn, solver)?;
        if ev.error_estimate.is_finite() {
            numerical_error = numerical_error.max(ev.error_estimate);
        }
        images.push(ev.op);
    }
    Ok(ReferenceImages {
        region,
        images,
        numerical_error,
    })
}

fn basis_for(dims: &[usize]) -> Vec<Matrix> {
    let d: usize = dims.iter().product();
    hermitian_basis(d)
}

/// Observed circuit error on a subsystem.
#[derive(Clone, Debug)]
pub struct MeasuredError {
    /// Largest ratio over all samples (a lower bound on the seminorm).
    pub observed_sup: f64,
    /// `‖(τ - τ̃) O‖ / ‖O‖` per sample: basis elements first, then random
    /// Hermitian, then random rank-one operators.
    pub per_sample: Vec<f64>,
    /// Integrator error budget of the reference.
    pub numerical_error: f64,
}

/// Compare the circuit with the exact propagation on `V̄_N` for the
/// Hermitian basis of `Y` plus `sample_count` random Hermitian and
/// `sample_count` random rank-one operators. Random samples are linear
/// combinations of the basis, so only the basis is propagated.
pub fn measure_error(
    spec: &LiouvillianSpec,
    sched: &Schedule,
    circuit: &TrotterCircuit,
    sample_count: usize,
    seed: u64,
    solver: &SolverConfig,
) -> Result<MeasuredError> {
    let reference = reference_images(spec, sched, solver)?;
    measure_error_with(spec, sched, circuit, &reference, sample_count, seed, solver)
}

/// As [`measure_error`] with precomputed reference images.
pub fn measure_error_with(
    spec: &LiouvillianSpec,
    sched: &Schedule,
    circuit: &TrotterCircuit,
    reference: &ReferenceImages,
    sample_count: usize,
    seed: u64,
    solver: &SolverConfig,
) -> Result<MeasuredError> {
    if sample_count == 0 {
        return Err(Error::Precondition("sample_count must be at least 1".into()));
    }
    let y = sched.y();
    let host = circuit
        .footprint()
        .union(&reference.region)
        .union(y);
    let dims_y = spec.site_dims().dims_of(y);
    let basis = basis_for(&dims_y);
    let compiled = CompiledCircuit::new(spec, circuit, solver)?;
    let mut diffs = Vec::with_capacity(basis.len());
    for (b, exact) in basis.iter().zip(&reference.images) {
        let o = Op::new(y.clone(), dims_y.clone(), b.clone())?.embed(&host, spec.site_dims())?;
        let approx = compiled.apply(&o)?;
        let exact = exact.embed(&host, spec.site_dims())?;
        diffs.push(exact.matrix() - approx.matrix());
    }
    let mut samples: Vec<Matrix> = basis.clone();
    let d: usize = dims_y.iter().product();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..sample_count {
        samples.push(random::hermitian(d, &mut rng));
    }
    for _ in 0..sample_count {
        samples.push(random::rank_one(d, &mut rng));
    }
    let mut per_sample = Vec::with_capacity(samples.len());
    for s in &samples {
        let norm = spectral_norm(s);
        if norm == 0.0 {
            per_sample.push(0.0);
            continue;
        }
        let hd = host_dim(&diffs);
        let mut acc = Matrix::zeros(hd, hd);
        for (b, diff) in basis.iter().zip(&diffs) {
            let c = hs_inner(b, s) / hs_inner(b, b);
            if c != ZERO {
                acc += diff * c;
            }
        }
        per_sample.push(spectral_norm(&acc) / norm);
    }
    let observed_sup = per_sample.iter().copied().fold(0.0, f64::max);
    Ok(MeasuredError {
        observed_sup,
        per_sample,
        numerical_error: reference.numerical_error,
    })
}

fn host_dim(diffs: &[Matrix]) -> usize {
    diffs.first().map(|m| m.nrows()).unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::LatticeGeometry;
    use crate::liouvillian::presets;

    fn ising(n: usize) -> LiouvillianSpec {
        presets::dissipative_ising(LatticeGeometry::chain(n), &Default::default()).unwrap()
    }

    #[test]
    fn schedule_saturates_and_nests() {
        let spec = ising(8);
        let y = Region::single(4);
        let s = light_cone_schedule(&spec, &y, 0.4, 0.1, 3, 0.5).unwrap();
        assert_eq!(s.len(), 4);
        assert_eq!(s.regions()[0], Region::new(1..=7));
        for w in s.regions().windows(2) {
            assert!(w[0].is_subset(&w[1]));
        }
        // Extension of {1..7} already covers the chain.
        assert!(s.depths().iter().all(|d| *d == ConeDepth::Saturated));
        let big = ising(14);
        let s = light_cone_schedule(&big, &Region::single(7), 0.2, 0.1, 3, 0.0).unwrap();
        assert_eq!(s.depths()[0], ConeDepth::Finite(4));
        assert_eq!(s.volumes()[0], 2 * 9 - 1);
    }

    #[test]
    fn channel_count_and_identity() {
        let spec = ising(3);
        let y = Region::single(1);
        let sched = Schedule::new(&spec, &y, vec![0.0, 0.1], vec![Region::single(1)]).unwrap();
        // Extension of {1}: pairs {0,1}, {1,2} -> sites 0..2, 5 supports.
        let c = build_circuit(&spec, &sched, Ordering::Lexicographic, false).unwrap();
        assert_eq!(c.channels().len(), 5);
        let all = spec.all_sites();
        let id = Op::identity(all.clone(), spec.site_dims());
        let out = apply_circuit(&spec, &c, &id, &SolverConfig::default()).unwrap();
        assert!((out.matrix() - id.matrix()).norm() < 1e-12);
        let text = c.to_text(&spec);
        let back = TrotterCircuit::from_text(&spec, &text).unwrap();
        assert_eq!(back, c);
    }
}
