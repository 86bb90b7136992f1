// Copyright 2026 The lrsim Authors
// SPDX-License-Identifier: Apache-2.0

//! Built-in qubit models. Pair terms live on the nearest-neighbour bonds of
//! the geometry, on-site terms on every site.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{LiouvillianSpec, LocalTerm, TermTag, TimeProfile};
use crate::algebra::pauli::{sigma_minus, sigma_x, sigma_y, sigma_z};
use crate::algebra::{random, Matrix, SiteDims, C64};
use crate::error::Result;
use crate::lattice::{LatticeGeometry, Region};

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Transverse-field Ising couplings with amplitude damping.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IsingParams {
    #[serde(default = "default_j")]
    pub j: f64,
    #[serde(default = "default_h")]
    pub h: f64,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    /// Profile of the pair terms.
    #[serde(default)]
    pub pair_profile: TimeProfile,
    /// Profile of the on-site terms.
    #[serde(default)]
    pub site_profile: TimeProfile,
}

fn default_j() -> f64 {
    1.0
}

fn default_h() -> f64 {
    1.0
}

fn default_gamma() -> f64 {
    0.5
}

impl Default for IsingParams {
    fn default() -> Self {
        IsingParams {
            j: default_j(),
            h: default_h(),
            gamma: default_gamma(),
            pair_profile: TimeProfile::default(),
            site_profile: TimeProfile::default(),
        }
    }
}

/// Pair terms `J Z Z`; on-site terms `h X` with damping `L = √γ σ⁻`.
pub fn dissipative_ising(geometry: LatticeGeometry, p: &IsingParams) -> Result<LiouvillianSpec> {
    let mut terms = Vec::new();
    let zz = sigma_z().kronecker(&sigma_z()) * c(p.j);
    for bond in geometry.nearest_neighbor_bonds() {
        terms.push(
            LocalTerm::qubits(bond, zz.clone(), vec![], p.pair_profile.clone())?
                .with_tag(TermTag::new("ising-zz", &[("j", p.j)])),
        );
    }
    let damping = if p.gamma > 0.0 {
        vec![sigma_minus() * c(p.gamma.sqrt())]
    } else {
        vec![]
    };
    for site in 0..geometry.n_sites() {
        terms.push(
            LocalTerm::qubits(
                Region::single(site),
                sigma_x() * c(p.h),
                damping.clone(),
                p.site_profile.clone(),
            )?
            .with_tag(TermTag::new("ising-site", &[("h", p.h), ("gamma", p.gamma)])),
        );
    }
    LiouvillianSpec::new(geometry, SiteDims::qubits(), terms)
}

/// XY couplings with on-site dephasing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct XyParams {
    #[serde(default = "default_j")]
    pub jx: f64,
    #[serde(default = "default_j")]
    pub jy: f64,
    #[serde(default)]
    pub field: f64,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
}

impl Default for XyParams {
    fn default() -> Self {
        XyParams {
            jx: 1.0,
            jy: 1.0,
            field: 0.0,
            gamma: default_gamma(),
        }
    }
}

/// Pair terms `Jx X X + Jy Y Y`; on-site `field Z` with `L = √γ Z`.
pub fn xy_dephasing(geometry: LatticeGeometry, p: &XyParams) -> Result<LiouvillianSpec> {
    let mut terms = Vec::new();
    let pair = sigma_x().kronecker(&sigma_x()) * c(p.jx) + sigma_y().kronecker(&sigma_y()) * c(p.jy);
    for bond in geometry.nearest_neighbor_bonds() {
        terms.push(
            LocalTerm::qubits(bond, pair.clone(), vec![], TimeProfile::default())?
                .with_tag(TermTag::new("xy", &[("jx", p.jx), ("jy", p.jy)])),
        );
    }
    let dephasing = if p.gamma > 0.0 {
        vec![sigma_z() * c(p.gamma.sqrt())]
    } else {
        vec![]
    };
    for site in 0..geometry.n_sites() {
        terms.push(
            LocalTerm::qubits(
                Region::single(site),
                sigma_z() * c(p.field),
                dephasing.clone(),
                TimeProfile::default(),
            )?
            .with_tag(TermTag::new("dephasing", &[("field", p.field), ("gamma", p.gamma)])),
        );
    }
    LiouvillianSpec::new(geometry, SiteDims::qubits(), terms)
}

/// Seeded random Hamiltonian and one Lindblad operator per bond and per site.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomParams {
    pub seed: u64,
    #[serde(default = "default_strength")]
    pub strength: f64,
}

fn default_strength() -> f64 {
    0.5
}

pub fn random_model(geometry: LatticeGeometry, p: &RandomParams) -> Result<LiouvillianSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut terms = Vec::new();
    let mut supports = geometry.nearest_neighbor_bonds();
    supports.extend((0..geometry.n_sites()).map(Region::single));
    for support in supports {
        let d = 1 << support.len();
        let (h, ls): (Matrix, Vec<Matrix>) = random::lindblad_data(d, 1, p.strength, &mut rng);
        terms.push(
            LocalTerm::qubits(support, h, ls, TimeProfile::default())?
                .with_tag(TermTag::new("random", &[("seed", p.seed as f64), ("strength", p.strength)])),
        );
    }
    LiouvillianSpec::new(geometry, SiteDims::qubits(), terms)
}
