// Copyright 2026 The lrsim Authors
// SPDX-License-Identifier: Apache-2.0

//! Closed-form locality and Trotter bounds, and the two series lemmas they
//! rest on. Evaluations outside a theorem's range of validity are refused
//! with [`Error::Precondition`].

use std::f64::consts::E;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::liouvillian::{LiouvillianSpec, DEFAULT_NORM_GRID};

/// Model constants entering every bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundParams {
    /// Range `a` (lattice distance).
    pub a: f64,
    /// Neighbour count `𝒵`.
    pub z_max: f64,
    /// `‖ℓ‖` (inverse time).
    pub ell_norm: f64,
    /// Growth prefactor `M`.
    pub m: f64,
    /// Growth exponent `κ`.
    pub kappa: f64,
}

impl BoundParams {
    /// Lieb-Robinson velocity `e 𝒵 ‖ℓ‖`.
    pub fn v(&self) -> f64 {
        lr_velocity(self)
    }

    /// Constants of a model on a time window; `M` is fitted exactly on the
    /// finite lattice for the given `κ`.
    pub fn for_model(spec: &LiouvillianSpec, kappa: f64, window: (f64, f64)) -> Result<Self> {
        Ok(BoundParams {
            a: spec.range(),
            z_max: spec.max_neighbors()? as f64,
            ell_norm: spec.ell_norm(window, DEFAULT_NORM_GRID),
            m: spec.hypergraph().fit_growth_constants(spec.geometry(), kappa)?,
            kappa,
        })
    }

    fn validate(&self) -> Result<()> {
        let all = [self.a, self.z_max, self.ell_norm, self.m, self.kappa];
        if all.iter().any(|x| !x.is_finite() || *x < 0.0) || self.a == 0.0 || self.z_max == 0.0 {
            return Err(Error::Precondition(format!("invalid bound parameters {self:?}")));
        }
        Ok(())
    }
}

/// Cone depth of a region: a finite `D`, or the whole lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConeDepth {
    Finite(u64),
    Saturated,
}

impl ConeDepth {
    pub fn finite(&self) -> Option<u64> {
        match self {
            ConeDepth::Finite(d) => Some(*d),
            ConeDepth::Saturated => None,
        }
    }
}

impl std::fmt::Display for ConeDepth {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConeDepth::Finite(d) => write!(f, "{d}"),
            ConeDepth::Saturated => write!(f, "saturated"),
        }
    }
}

/// Compensated (Neumaier) sum.
pub fn neumaier_sum<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for x in terms {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

fn check_interval(r: f64, t: f64) -> Result<()> {
    if r > t || !r.is_finite() || !t.is_finite() {
        return Err(Error::TimeOrder { start: r, end: t });
    }
    Ok(())
}

pub fn lr_velocity(p: &BoundParams) -> f64 {
    E * p.z_max * p.ell_norm
}

/// `𝒱 ‖K‖ ‖O‖ e^{v (t - r) - d/a}` with `𝒱 = min(vol X̄, vol Ȳ) / 𝒵`.
#[allow(clippy::too_many_arguments)]
pub fn lr_bound(
    p: &BoundParams,
    vol_x: usize,
    vol_y: usize,
    d_xy: f64,
    r: f64,
    t: f64,
    norm_k: f64,
    norm_o: f64,
) -> Result<f64> {
    p.validate()?;
    check_interval(r, t)?;
    let vxy = vol_x.min(vol_y) as f64 / p.z_max;
    Ok(vxy * norm_k * norm_o * (p.v() * (t - r) - d_xy / p.a).exp())
}

/// Validity range of the truncation theorem: `D > 2κ + 1`.
pub fn check_cone_depth(kappa: f64, d: u64) -> Result<()> {
    if (d as f64) > 2.0 * kappa + 1.0 {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "cone depth D = {d} must exceed 2κ + 1 = {}",
            2.0 * kappa + 1.0
        )))
    }
}

/// `(2M/𝒵) ‖O‖ D^κ e^{v (t - r) - D}` for `D > 2κ + 1`.
pub fn quasi_locality_bound(p: &BoundParams, d: u64, r: f64, t: f64, norm_o: f64) -> Result<f64> {
    p.validate()?;
    check_interval(r, t)?;
    check_cone_depth(p.kappa, d)?;
    let d = d as f64;
    Ok(2.0 * p.m / p.z_max * norm_o * d.powf(p.kappa) * (p.v() * (t - r) - d).exp())
}

/// `dt² 𝒵 vol V̄ ‖ℓ‖² e^{dt ‖ℓ‖}`.
pub fn slice_trotter_bound(dt: f64, z_max: f64, vol: usize, ell_norm: f64) -> Result<f64> {
    if !(dt >= 0.0) {
        return Err(Error::Precondition(format!("slice length {dt} < 0")));
    }
    Ok(dt * dt * z_max * vol as f64 * ell_norm * ell_norm * (dt * ell_norm).exp())
}

/// Per-slice parts of the circuit bound.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrotterBound {
    pub total: f64,
    /// Truncation parts, zero for saturated slices.
    pub truncation: Vec<f64>,
    /// Splitting parts `ε_n`.
    pub splitting: Vec<f64>,
}

/// `Σ_n [(2M/𝒵) D_n^κ e^{v (t_n - t_0) - D_n} + ε_n]` over the schedule
/// `t_0 ≤ … ≤ t_N`. A saturated slice (region already the whole lattice)
/// has no truncation error.
pub fn trotter_total_bound(
    p: &BoundParams,
    times: &[f64],
    depths: &[ConeDepth],
    vols: &[usize],
) -> Result<TrotterBound> {
    p.validate()?;
    let n = times.len().saturating_sub(1);
    if times.is_empty() || depths.len() != n || vols.len() != n {
        return Err(Error::Schedule(format!(
            "{} times, {} depths, {} volumes",
            times.len(),
            depths.len(),
            vols.len()
        )));
    }
    if let Some(w) = times.windows(2).find(|w| !(w[0] <= w[1])) {
        return Err(Error::Schedule(format!("times not monotone: {} then {}", w[0], w[1])));
    }
    let t0 = times[0];
    let mut truncation = Vec::with_capacity(n);
    let mut splitting = Vec::with_capacity(n);
    for k in 0..n {
        let trunc = match depths[k] {
            ConeDepth::Saturated => 0.0,
            ConeDepth::Finite(d) => quasi_locality_bound(p, d, t0, times[k + 1], 1.0)
                .map_err(|e| Error::Precondition(format!("slice {}: {e}", k + 1)))?,
        };
        truncation.push(trunc);
        splitting.push(slice_trotter_bound(times[k + 1] - times[k], p.z_max, vols[k], p.ell_norm)?);
    }
    let total = neumaier_sum(truncation.iter().chain(&splitting).copied());
    Ok(TrotterBound {
        total,
        truncation,
        splitting,
    })
}

/// `(Σ_{n ≥ N} xⁿ/n!, e^{x e - N})`. The tail is summed directly from its
/// first term with compensation, so it stays accurate when it is tiny.
pub fn partial_exp_sum(x: f64, n: u64) -> Result<(f64, f64)> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Precondition(format!("x = {x} must be finite and >= 0")));
    }
    let bound = (x * E - n as f64).exp();
    if x == 0.0 {
        return Ok((if n == 0 { 1.0 } else { 0.0 }, bound));
    }
    let mut term = 1.0;
    for k in 1..=n {
        term *= x / k as f64;
    }
    let mut terms = Vec::new();
    let mut k = n;
    let mut running = 0.0;
    loop {
        terms.push(term);
        running += term;
        k += 1;
        term *= x / k as f64;
        if (k as f64) > x && term <= 1e-18 * running {
            break;
        }
        if term == 0.0 {
            break;
        }
    }
    Ok((neumaier_sum(terms), bound))
}

/// Validity range of the tail lemma: `D > 2κ + 1` for `κ > 0`, `D ≥ 1` for
/// `κ = 0`.
pub fn check_tail_range(kappa: f64, d: u64) -> Result<()> {
    let ok = if kappa == 0.0 {
        d >= 1
    } else {
        kappa > 0.0 && (d as f64) > 2.0 * kappa + 1.0
    };
    if ok {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "tail lemma needs D > 2κ + 1 (D ≥ 1 for κ = 0), got κ = {kappa}, D = {d}"
        )))
    }
}

/// `(Σ_{n ≥ D} n^κ e^{-n}, 2e D^κ e^{-D})`.
pub fn exp_tail_sum(kappa: f64, d: u64) -> Result<(f64, f64)> {
    check_tail_range(kappa, d)?;
    let df = d as f64;
    let bound = 2.0 * E * df.powf(kappa) * (-df).exp();
    let mut terms = Vec::new();
    let mut running = 0.0;
    let mut k = d;
    loop {
        let kf = k as f64;
        let term = kf.powf(kappa) * (-kf).exp();
        terms.push(term);
        running += term;
        if term < 1e-18 * running || term == 0.0 {
            break;
        }
        k += 1;
    }
    Ok((neumaier_sum(terms), bound))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params(z: f64, ell: f64) -> BoundParams {
        BoundParams {
            a: 1.0,
            z_max: z,
            ell_norm: ell,
            m: 2.0,
            kappa: 0.0,
        }
    }

    #[test]
    fn velocity_examples() {
        assert_relative_eq!(lr_velocity(&params(3.0, 1.0)), 8.154845485377136, max_relative = 1e-15);
        assert_eq!(lr_velocity(&params(3.0, 0.0)), 0.0);
        assert_relative_eq!(lr_velocity(&params(5.0, 2.0)), 10.0 * E, max_relative = 1e-15);
    }

    #[test]
    fn lr_examples() {
        let p = params(3.0, 1.0);
        assert_eq!(lr_bound(&params(1.0, 1.0), 1, 1, 0.0, 0.5, 0.5, 1.0, 1.0).unwrap(), 1.0);
        let near = lr_bound(&p, 2, 2, 3.0, 0.0, 0.2, 1.0, 1.0).unwrap();
        let far = lr_bound(&p, 2, 2, 4.0, 0.0, 0.2, 1.0, 1.0).unwrap();
        assert_relative_eq!(far / near, (-1.0f64).exp(), max_relative = 1e-14);
        assert_relative_eq!(far, 0.06238090805790572, max_relative = 1e-13);
        assert!(lr_bound(&p, 2, 2, 4.0, 0.3, 0.2, 1.0, 1.0).is_err());
    }

    #[test]
    fn quasi_locality_examples() {
        let p = BoundParams {
            z_max: 3.0,
            ell_norm: 1.0 / lr_velocity(&params(3.0, 1.0)),
            ..params(3.0, 1.0)
        };
        let b = quasi_locality_bound(&p, 5, 0.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(b, 0.024420851851645574, max_relative = 1e-13);
        assert!(matches!(quasi_locality_bound(&p, 1, 0.0, 1.0, 1.0), Err(Error::Precondition(_))));
        let p1 = BoundParams { kappa: 1.0, ..p };
        assert!(quasi_locality_bound(&p1, 3, 0.0, 1.0, 1.0).is_err());
        assert!(quasi_locality_bound(&p1, 4, 0.0, 1.0, 1.0).is_ok());
    }

    #[test]
    fn slice_examples() {
        assert_eq!(slice_trotter_bound(0.0, 3.0, 5, 1.0).unwrap(), 0.0);
        assert_relative_eq!(
            slice_trotter_bound(0.1, 3.0, 5, 1.0).unwrap(),
            0.16577563771134718,
            max_relative = 1e-13
        );
        let r = slice_trotter_bound(2e-6, 3.0, 5, 1.0).unwrap() / slice_trotter_bound(1e-6, 3.0, 5, 1.0).unwrap();
        assert_relative_eq!(r, 4.0, max_relative = 1e-5);
    }

    #[test]
    fn five_slice_schedule() {
        let p = BoundParams {
            a: 1.0,
            z_max: 5.0,
            ell_norm: 1.0,
            m: 2.0,
            kappa: 0.0,
        };
        let times: Vec<f64> = (0..=5).map(|n| 0.1 * n as f64).collect();
        let depths: Vec<ConeDepth> = (1..=5).map(|n| ConeDepth::Finite(4 + n)).collect();
        let vols: Vec<usize> = (1..=5).map(|n| 3 + 2 * n).collect();
        let b = trotter_total_bound(&p, &times, &depths, &vols).unwrap();
        assert_relative_eq!(b.total, 2.7305994530145364, max_relative = 1e-12);
        assert_relative_eq!(b.truncation[0], 0.02098384050820722, max_relative = 1e-12);
        assert_relative_eq!(b.splitting[4], 0.718361096749171, max_relative = 1e-12);
        let bad = [ConeDepth::Finite(1); 5];
        let err = trotter_total_bound(&p, &times, &bad, &vols).unwrap_err();
        assert!(err.to_string().contains("slice 1"));
    }

    #[test]
    fn series_examples() {
        assert_eq!(partial_exp_sum(0.0, 0).unwrap(), (1.0, 1.0));
        let (ex, b) = partial_exp_sum(1.0, 2).unwrap();
        assert_relative_eq!(ex, E - 2.0, max_relative = 1e-14);
        assert_relative_eq!(b, 2.050906372692501, max_relative = 1e-14);
        let (ex, b) = partial_exp_sum(1.0, 10).unwrap();
        assert_relative_eq!(ex, 3.0288585284969953e-7, max_relative = 1e-13);
        assert_relative_eq!(b, 6.880024413654348e-4, max_relative = 1e-13);
        let (ex, b) = exp_tail_sum(1.0, 4).unwrap();
        assert_relative_eq!(ex, 0.13276238145953278, max_relative = 1e-13);
        assert_relative_eq!(b, 0.39829654694291154, max_relative = 1e-13);
        let (ex, b) = exp_tail_sum(0.0, 1).unwrap();
        assert_relative_eq!(ex, 0.5819767068693264, max_relative = 1e-13);
        assert_relative_eq!(b, 2.0, max_relative = 1e-15);
        assert!(exp_tail_sum(1.0, 3).is_err());
        assert!(exp_tail_sum(0.0, 0).is_err());
    }

    #[test]
    fn neumaier_recovers_cancellation() {
        assert_eq!(neumaier_sum([1.0, 1e100, 1.0, -1e100]), 2.0);
    }
}
