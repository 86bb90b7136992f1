// Copyright 2026 The lrsim Authors
// SPDX-License-Identifier: Apache-2.0

//! Local Liouville terms, their Heisenberg-picture action and truncations of
//! the full generator to subsystems.

pub mod presets;
mod profile;

use std::fmt;
use std::sync::OnceLock;

use crate::algebra::kernel::{self, LocalMap, SlotMap};
use crate::algebra::{
    hermiticity_defect, inf_inf_norm, lindblad_generator, Matrix, NormOptions, Op, SiteDims,
    SuperOp, C64, ZERO,
};
use crate::error::{Error, Result};
use crate::lattice::{InteractionHypergraph, LatticeGeometry, Region};

pub use profile::TimeProfile;

/// Hermiticity tolerance for term Hamiltonians.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Default number of grid points per window for `sup_t` evaluations.
pub const DEFAULT_NORM_GRID: usize = 257;

/// Name and parameters of the preset a term came from; used when circuits
/// are written out.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TermTag {
    pub name: String,
    pub params: Vec<(String, f64)>,
}

impl TermTag {
    pub fn new(name: &str, params: &[(&str, f64)]) -> Self {
        TermTag {
            name: name.to_string(),
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }
}

impl fmt::Display for TermTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = if self.name.is_empty() { "custom" } else { &self.name };
        write!(f, "{name}")?;
        for (k, v) in &self.params {
            write!(f, " {k}={v}")?;
        }
        Ok(())
    }
}

/// One local term `c(t) ℓ_Z` in Lindblad form.
#[derive(Clone, Debug)]
pub struct LocalTerm {
    support: Region,
    dims: Vec<usize>,
    hamiltonian: Matrix,
    lindblads: Vec<Matrix>,
    profile: TimeProfile,
    tag: TermTag,
    generator: Matrix,
    local_map: LocalMap,
    base_norm: OnceLock<f64>,
}

impl LocalTerm {
    pub fn new(
        support: Region,
        dims: Vec<usize>,
        hamiltonian: Matrix,
        lindblads: Vec<Matrix>,
        profile: TimeProfile,
    ) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::EmptyRegion);
        }
        if dims.len() != support.len() {
            return Err(Error::Dimension(format!(
                "{} local dimensions for support {support}",
                dims.len()
            )));
        }
        let d: usize = dims.iter().product();
        for m in std::iter::once(&hamiltonian).chain(&lindblads) {
            if m.nrows() != d || m.ncols() != d {
                return Err(Error::Dimension(format!(
                    "term operator is {}x{}, support {support} needs {d}x{d}",
                    m.nrows(),
                    m.ncols()
                )));
            }
        }
        let defect = hermiticity_defect(&hamiltonian);
        if defect > HERMITIAN_TOL {
            return Err(Error::NotHermitian(defect));
        }
        profile.validate()?;
        let generator = lindblad_generator(&hamiltonian, &lindblads);
        let local_map = LocalMap::new(&generator);
        Ok(LocalTerm {
            support,
            dims,
            hamiltonian,
            lindblads,
            profile,
            tag: TermTag::default(),
            generator,
            local_map,
            base_norm: OnceLock::new(),
        })
    }

    pub fn qubits(
        support: Region,
        hamiltonian: Matrix,
        lindblads: Vec<Matrix>,
        profile: TimeProfile,
    ) -> Result<Self> {
        let dims = vec![2; support.len()];
        Self::new(support, dims, hamiltonian, lindblads, profile)
    }

    pub fn with_tag(mut self, tag: TermTag) -> Self {
        self.tag = tag;
        self
    }

    pub fn support(&self) -> &Region {
        &self.support
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn hamiltonian(&self) -> &Matrix {
        &self.hamiltonian
    }

    pub fn lindblads(&self) -> &[Matrix] {
        &self.lindblads
    }

    pub fn profile(&self) -> &TimeProfile {
        &self.profile
    }

    pub fn tag(&self) -> &TermTag {
        &self.tag
    }

    /// Unscaled generator matrix `ℓ_Z` on the support.
    pub fn generator(&self) -> &Matrix {
        &self.generator
    }

    pub(crate) fn local_map(&self) -> &LocalMap {
        &self.local_map
    }

    pub fn is_zero(&self) -> bool {
        self.generator.iter().all(|z| *z == ZERO)
            || matches!(self.profile, TimeProfile::Constant { value } if value == 0.0)
    }

    /// `ℓ_Z(t)` as a superoperator on the support.
    pub fn superop_at(&self, t: f64) -> SuperOp {
        self.unscaled_superop()
            .scaled(C64::new(self.profile.value(t), 0.0))
    }

    pub fn unscaled_superop(&self) -> SuperOp {
        SuperOp::new(self.support.clone(), self.dims.clone(), self.generator.clone())
            .expect("generator matches support")
    }

    /// `∞→∞` norm of the unscaled generator, computed once.
    pub fn base_norm(&self) -> f64 {
        *self.base_norm.get_or_init(|| {
            if self.generator.iter().all(|z| *z == ZERO) {
                return 0.0;
            }
            inf_inf_norm(&self.unscaled_superop(), &NormOptions::default())
                .map(|e| e.value)
                .unwrap_or(f64::NAN)
        })
    }

    /// Same operators with the profile replaced by a constant.
    pub fn with_profile(&self, profile: TimeProfile) -> LocalTerm {
        let mut out = self.clone();
        out.profile = profile;
        out
    }
}

/// `ℓ_Z(t) O` for `O` on a region containing the support.
pub fn apply_term(term: &LocalTerm, t: f64, op: &Op) -> Result<Op> {
    let positions = op.positions_of(term.support())?;
    check_dims(term, op, &positions)?;
    let map = SlotMap::new(op.dims(), &positions);
    let mut out = Matrix::zeros(op.dim(), op.dim());
    let c = C64::new(term.profile().value(t), 0.0);
    kernel::accumulate(
        &map,
        term.local_map(),
        c,
        op.matrix().as_slice(),
        out.as_mut_slice(),
    );
    Op::new(op.region().clone(), op.dims().to_vec(), out)
}

fn check_dims(term: &LocalTerm, op: &Op, positions: &[usize]) -> Result<()> {
    for (k, &p) in positions.iter().enumerate() {
        if op.dims()[p] != term.dims()[k] {
            return Err(Error::Dimension(format!(
                "term on {} has local dimension {} where the operator has {}",
                term.support(),
                term.dims()[k],
                op.dims()[p]
            )));
        }
    }
    Ok(())
}

/// `sup_t ‖ℓ_Z(t)‖` over a window: `sup |c|` times the norm of the fixed part.
pub fn term_norm(term: &LocalTerm, window: (f64, f64), grid: usize) -> f64 {
    let sup = if term.profile().is_constant() {
        term.profile().value(window.0).abs()
    } else {
        term.profile().sup_abs(window.0, window.1, grid)
    };
    if sup == 0.0 {
        return 0.0;
    }
    sup * term.base_norm()
}

/// Constant-profile term equal to the time average of `term` over `[r, t]`.
pub fn averaged_term(term: &LocalTerm, r: f64, t: f64) -> Result<LocalTerm> {
    let avg = term.profile().average(r, t)?;
    Ok(term.with_profile(TimeProfile::constant(avg)))
}

/// Lattice, local dimensions and the local terms of a Liouvillian.
#[derive(Clone, Debug)]
pub struct LiouvillianSpec {
    geometry: LatticeGeometry,
    site_dims: SiteDims,
    terms: Vec<LocalTerm>,
    hypergraph: InteractionHypergraph,
}

impl LiouvillianSpec {
    /// Terms that vanish identically are dropped. Terms are stored in the
    /// sorted order of their supports, matching the hypergraph.
    pub fn new(geometry: LatticeGeometry, site_dims: SiteDims, terms: Vec<LocalTerm>) -> Result<Self> {
        let mut terms: Vec<LocalTerm> = terms.into_iter().filter(|t| !t.is_zero()).collect();
        for term in &terms {
            geometry.check_region(term.support())?;
            if term.dims() != site_dims.dims_of(term.support()).as_slice() {
                return Err(Error::Dimension(format!(
                    "term on {} disagrees with the lattice site dimensions",
                    term.support()
                )));
            }
        }
        terms.sort_by(|a, b| a.support().cmp(b.support()));
        if let Some(w) = terms.windows(2).find(|w| w[0].support() == w[1].support()) {
            return Err(Error::Model(format!(
                "two terms share the support {}; merge them into one",
                w[0].support()
            )));
        }
        let hypergraph = InteractionHypergraph::new(terms.iter().map(|t| t.support().clone()))?;
        Ok(LiouvillianSpec {
            geometry,
            site_dims,
            terms,
            hypergraph,
        })
    }

    pub fn geometry(&self) -> &LatticeGeometry {
        &self.geometry
    }

    pub fn site_dims(&self) -> &SiteDims {
        &self.site_dims
    }

    pub fn terms(&self) -> &[LocalTerm] {
        &self.terms
    }

    pub fn hypergraph(&self) -> &InteractionHypergraph {
        &self.hypergraph
    }

    pub fn all_sites(&self) -> Region {
        self.geometry.all_sites()
    }

    /// Range `a`.
    pub fn range(&self) -> f64 {
        self.hypergraph.range(&self.geometry)
    }

    /// Neighbour count `𝒵`.
    pub fn max_neighbors(&self) -> Result<usize> {
        self.hypergraph.max_neighbors()
    }

    /// `‖ℓ‖ = max_Z sup_t ‖ℓ_Z(t)‖` over a window.
    pub fn ell_norm(&self, window: (f64, f64), grid: usize) -> f64 {
        self.terms
            .iter()
            .map(|t| term_norm(t, window, grid))
            .fold(0.0, f64::max)
    }

    /// Indices of the terms whose support lies in `v`.
    pub fn terms_within(&self, v: &Region) -> Vec<usize> {
        self.hypergraph.supports_within(v)
    }

    /// Sorted, deduplicated breakpoints of all profiles.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b: Vec<f64> = self
            .terms
            .iter()
            .flat_map(|t| t.profile().breakpoints())
            .collect();
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }

    /// The same lattice with only the selected terms.
    pub fn restricted(&self, indices: &[usize]) -> Result<LiouvillianSpec> {
        let terms = indices.iter().map(|&k| self.terms[k].clone()).collect();
        LiouvillianSpec::new(self.geometry.clone(), self.site_dims.clone(), terms)
    }

    /// `ℒ(t) O` on the region of `O`.
    pub fn apply(&self, t: f64, op: &Op) -> Result<Op> {
        self.apply_truncated(&self.all_sites(), t, op)
    }

    /// `ℒ_V(t) O = Σ_{Z ⊂ V} ℓ_Z(t) O`. Terms disjoint from the region of `O`
    /// are skipped since they annihilate the identity factor there; a term
    /// that straddles the region is an error.
    pub fn apply_truncated(&self, v: &Region, t: f64, op: &Op) -> Result<Op> {
        let generator = self.generator_on(op.region(), v)?;
        let mut out = Matrix::zeros(op.dim(), op.dim());
        let coeffs = generator.coefficients(t, None);
        generator.apply(&coeffs, op.matrix().as_slice(), out.as_mut_slice());
        Op::new(op.region().clone(), op.dims().to_vec(), out)
    }

    /// Precompiled `ℒ_V` acting on operators of `host`.
    pub fn generator_on(&self, host: &Region, v: &Region) -> Result<HostGenerator> {
        let dims = self.site_dims.dims_of(host);
        let mut parts = Vec::new();
        for k in self.terms_within(v) {
            let term = &self.terms[k];
            if !term.support().intersects(host) {
                continue;
            }
            if !term.support().is_subset(host) {
                return Err(Error::Straddle {
                    support: term.support().clone(),
                    region: host.clone(),
                });
            }
            let positions: Vec<usize> = term
                .support()
                .iter()
                .map(|s| host.position(s).expect("subset"))
                .collect();
            parts.push(GeneratorPart {
                term: k,
                slots: SlotMap::new(&dims, &positions),
                local: term.local_map().clone(),
                profile: term.profile().clone(),
            });
        }
        Ok(HostGenerator {
            region: host.clone(),
            dims,
            parts,
        })
    }

    /// Dense `ℒ_V(t)` on `host` (small regions only).
    pub fn dense_generator(&self, host: &Region, v: &Region, t: f64) -> Result<SuperOp> {
        let generator = self.generator_on(host, v)?;
        let coeffs = generator.coefficients(t, None);
        Ok(generator.materialize(&coeffs))
    }
}

#[derive(Clone, Debug)]
struct GeneratorPart {
    term: usize,
    slots: SlotMap,
    local: LocalMap,
    profile: TimeProfile,
}

/// `ℒ_V` compiled for a fixed host region: one gather pattern per term.
#[derive(Clone, Debug)]
pub struct HostGenerator {
    region: Region,
    dims: Vec<usize>,
    parts: Vec<GeneratorPart>,
}

impl HostGenerator {
    /// A single term acting on its own support.
    pub fn for_term(term: &LocalTerm) -> HostGenerator {
        let positions: Vec<usize> = (0..term.support().len()).collect();
        HostGenerator {
            region: term.support().clone(),
            dims: term.dims().to_vec(),
            parts: vec![GeneratorPart {
                term: 0,
                slots: SlotMap::new(term.dims(), &positions),
                local: term.local_map().clone(),
                profile: term.profile().clone(),
            }],
        }
    }

    /// Hilbert-Schmidt adjoint (Schrödinger-picture generator).
    pub fn adjoint(&self) -> HostGenerator {
        let mut out = self.clone();
        for part in &mut out.parts {
            part.local = part.local.adjoint();
        }
        out
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Indices (into the spec) of the compiled terms.
    pub fn term_indices(&self) -> Vec<usize> {
        self.parts.iter().map(|p| p.term).collect()
    }

    /// True when no profile depends on time.
    pub fn is_autonomous(&self) -> bool {
        self.parts.iter().all(|p| p.profile.is_constant())
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b: Vec<f64> = self
            .parts
            .iter()
            .flat_map(|p| p.profile.breakpoints())
            .collect();
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }

    /// Profile values at `t`; `segment` resolves jumps of piecewise profiles.
    pub fn coefficients(&self, t: f64, segment: Option<(f64, f64)>) -> Vec<f64> {
        self.parts
            .iter()
            .map(|p| match segment {
                Some((lo, hi)) => p.profile.value_in_segment(t, lo, hi),
                None => p.profile.value(t),
            })
            .collect()
    }

    /// `out = Σ c_k ℓ_k (input)` on column-major operator slices.
    pub fn apply(&self, coeffs: &[f64], input: &[C64], out: &mut [C64]) {
        out.fill(ZERO);
        self.accumulate(coeffs, C64::new(1.0, 0.0), input, out);
    }

    /// `out += scale Σ c_k ℓ_k (input)`.
    pub fn accumulate(&self, coeffs: &[f64], scale: C64, input: &[C64], out: &mut [C64]) {
        for (part, &c) in self.parts.iter().zip(coeffs) {
            if c != 0.0 {
                kernel::accumulate(&part.slots, &part.local, scale * c, input, out);
            }
        }
    }

    /// Dense matrix of the generator with the given coefficients.
    pub fn materialize(&self, coeffs: &[f64]) -> SuperOp {
        let d = self.dim();
        SuperOp::from_map(self.region.clone(), self.dims.clone(), |unit| {
            let mut out = Matrix::zeros(d, d);
            self.apply(coeffs, unit.as_slice(), out.as_mut_slice());
            out
        })
    }
}
