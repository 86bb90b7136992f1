// Copyright 2026 The lrsim Authors
// SPDX-License-Identifier: Apache-2.0

//! Lattice geometry, regions and the interaction hypergraph.
//!
//! Everything that enters the bounds as a geometric constant lives here: the
//! range `a` of the interaction, the neighbour count `Z`, extensions and
//! volumes of regions, the shell counts `|R_{n,y}|` with their power-law fit,
//! and an exhaustive path counter over supports.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Site identifier: an index into the geometry's site list.
pub type Site = usize;

/// Slack used when comparing floating-point distances.
pub const DISTANCE_EPS: f64 = 1e-9;

/// Finite set of sites. Iteration is in ascending site order, which is the
/// canonical tensor-factor order used by every operator on the region.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Region(BTreeSet<Site>);

impl Region {
    pub fn new<I: IntoIterator<Item = Site>>(sites: I) -> Self {
        Region(sites.into_iter().collect())
    }

    pub fn empty() -> Self {
        Region(BTreeSet::new())
    }

    pub fn single(site: Site) -> Self {
        Region::new([site])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, site: Site) -> bool {
        self.0.contains(&site)
    }

    pub fn iter(&self) -> impl Iterator<Item = Site> + '_ {
        self.0.iter().copied()
    }

    pub fn sites(&self) -> Vec<Site> {
        self.iter().collect()
    }

    pub fn is_subset(&self, other: &Region) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn intersects(&self, other: &Region) -> bool {
        // Both sides are sorted; walk the smaller one.
        let (small, large) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        small.iter().any(|s| large.contains(s))
    }

    pub fn union(&self, other: &Region) -> Region {
        Region(self.0.union(&other.0).copied().collect())
    }

    pub fn intersection(&self, other: &Region) -> Region {
        Region(self.0.intersection(&other.0).copied().collect())
    }

    pub fn difference(&self, other: &Region) -> Region {
        Region(self.0.difference(&other.0).copied().collect())
    }

    pub fn insert(&mut self, site: Site) -> bool {
        self.0.insert(site)
    }

    /// Position of `site` in the canonical factor order.
    pub fn position(&self, site: Site) -> Option<usize> {
        self.iter().position(|s| s == site)
    }

    pub fn min_site(&self) -> Option<Site> {
        self.0.first().copied()
    }
}

impl FromIterator<Site> for Region {
    fn from_iter<I: IntoIterator<Item = Site>>(iter: I) -> Self {
        Region::new(iter)
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, s) in self.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{s}")?;
        }
        f.write_str("}")
    }
}

/// Coordinate metric for hypercubic lattices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    /// Manhattan distance; `|i - j|` on a chain.
    L1,
    /// Chebyshev distance.
    LInf,
}

#[derive(Clone, Debug)]
enum DistanceRule {
    Coordinates { coords: Vec<Vec<i64>>, metric: Metric },
    Table { table: Arc<Vec<f64>> },
}

/// Finite set of sites together with a metric.
#[derive(Clone, Debug)]
pub struct LatticeGeometry {
    n_sites: usize,
    rule: DistanceRule,
}

impl LatticeGeometry {
    /// Open chain `0..n` with `d(i, j) = |i - j|`.
    pub fn chain(n: usize) -> Self {
        let coords = (0..n).map(|i| vec![i as i64]).collect();
        Self::from_coords(coords, Metric::L1)
    }

    /// `width x height` grid; site `(x, y)` has index `y * width + x`.
    pub fn grid(width: usize, height: usize, metric: Metric) -> Self {
        let mut coords = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                coords.push(vec![x as i64, y as i64]);
            }
        }
        Self::from_coords(coords, metric)
    }

    /// Three-dimensional box; site `(x, y, z)` has index `(z * height + y) * width + x`.
    pub fn cubic(width: usize, height: usize, depth: usize, metric: Metric) -> Self {
        let mut coords = Vec::with_capacity(width * height * depth);
        for z in 0..depth {
            for y in 0..height {
                for x in 0..width {
                    coords.push(vec![x as i64, y as i64, z as i64]);
                }
            }
        }
        Self::from_coords(coords, metric)
    }

    pub fn from_coords(coords: Vec<Vec<i64>>, metric: Metric) -> Self {
        LatticeGeometry {
            n_sites: coords.len(),
            rule: DistanceRule::Coordinates { coords, metric },
        }
    }

    /// User-supplied metric given as a row-major `n x n` distance table.
    /// The metric axioms are checked on every triple.
    pub fn from_table(n: usize, table: Vec<f64>) -> Result<Self> {
        if table.len() != n * n {
            return Err(Error::Metric(format!(
                "distance table has {} entries, expected {}",
                table.len(),
                n * n
            )));
        }
        let geom = LatticeGeometry {
            n_sites: n,
            rule: DistanceRule::Table {
                table: Arc::new(table),
            },
        };
        geom.check_metric_axioms()?;
        Ok(geom)
    }

    /// Build a table metric from a closure.
    pub fn from_fn(n: usize, metric: impl Fn(Site, Site) -> f64) -> Result<Self> {
        let mut table = Vec::with_capacity(n * n);
        for x in 0..n {
            for y in 0..n {
                table.push(metric(x, y));
            }
        }
        Self::from_table(n, table)
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn all_sites(&self) -> Region {
        Region::new(0..self.n_sites)
    }

    /// Spatial dimension for coordinate lattices.
    pub fn dimension(&self) -> Option<usize> {
        match &self.rule {
            DistanceRule::Coordinates { coords, .. } => coords.first().map(Vec::len),
            DistanceRule::Table { .. } => None,
        }
    }

    pub fn coords(&self, site: Site) -> Option<&[i64]> {
        match &self.rule {
            DistanceRule::Coordinates { coords, .. } => coords.get(site).map(Vec::as_slice),
            DistanceRule::Table { .. } => None,
        }
    }

    pub fn check_site(&self, site: Site) -> Result<()> {
        if site < self.n_sites {
            Ok(())
        } else {
            Err(Error::UnknownSite(site))
        }
    }

    pub fn check_region(&self, region: &Region) -> Result<()> {
        region.iter().try_for_each(|s| self.check_site(s))
    }

    /// Distance between two sites. Panics on unknown sites.
    pub fn site_distance(&self, x: Site, y: Site) -> f64 {
        match &self.rule {
            DistanceRule::Coordinates { coords, metric } => {
                let diffs = coords[x].iter().zip(&coords[y]).map(|(a, b)| (a - b).abs());
                match metric {
                    Metric::L1 => diffs.sum::<i64>() as f64,
                    Metric::LInf => diffs.max().unwrap_or(0) as f64,
                }
            }
            DistanceRule::Table { table } => table[x * self.n_sites + y],
        }
    }

    /// `d(X, Y) = min_{x in X, y in Y} d(x, y)`.
    pub fn distance(&self, x: &Region, y: &Region) -> Result<f64> {
        if x.is_empty() || y.is_empty() {
            return Err(Error::EmptyRegion);
        }
        self.check_region(x)?;
        self.check_region(y)?;
        let mut best = f64::INFINITY;
        for a in x.iter() {
            for b in y.iter() {
                best = best.min(self.site_distance(a, b));
            }
        }
        Ok(best)
    }

    /// Distance from a region to the rest of the lattice; `None` when the
    /// region already covers every site.
    pub fn distance_to_complement(&self, region: &Region) -> Result<Option<f64>> {
        let rest = self.all_sites().difference(region);
        if rest.is_empty() {
            return Ok(None);
        }
        self.distance(region, &rest).map(Some)
    }

    pub fn diameter(&self, region: &Region) -> f64 {
        let sites = region.sites();
        let mut diam: f64 = 0.0;
        for (k, &a) in sites.iter().enumerate() {
            for &b in &sites[k + 1..] {
                diam = diam.max(self.site_distance(a, b));
            }
        }
        diam
    }

    /// All sites within `radius` of `center`.
    pub fn ball(&self, center: &Region, radius: f64) -> Result<Region> {
        if center.is_empty() {
            return Err(Error::EmptyRegion);
        }
        self.check_region(center)?;
        Ok((0..self.n_sites)
            .filter(|&x| {
                center
                    .iter()
                    .any(|c| self.site_distance(c, x) <= radius + DISTANCE_EPS)
            })
            .collect())
    }

    /// Smallest positive inter-site distance.
    pub fn min_spacing(&self) -> Option<f64> {
        let mut best = f64::INFINITY;
        for x in 0..self.n_sites {
            for y in x + 1..self.n_sites {
                let d = self.site_distance(x, y);
                if d > DISTANCE_EPS {
                    best = best.min(d);
                }
            }
        }
        best.is_finite().then_some(best)
    }

    /// Pairs of sites at the minimal positive distance.
    pub fn nearest_neighbor_bonds(&self) -> Vec<Region> {
        let Some(spacing) = self.min_spacing() else {
            return Vec::new();
        };
        let mut bonds = Vec::new();
        for x in 0..self.n_sites {
            for y in x + 1..self.n_sites {
                if (self.site_distance(x, y) - spacing).abs() <= DISTANCE_EPS {
                    bonds.push(Region::new([x, y]));
                }
            }
        }
        bonds
    }

    /// Verify `d(x,x) = 0`, symmetry, non-negativity and the triangle
    /// inequality on all triples.
    pub fn check_metric_axioms(&self) -> Result<()> {
        let n = self.n_sites;
        for x in 0..n {
            if self.site_distance(x, x).abs() > DISTANCE_EPS {
                return Err(Error::Metric(format!("d({x},{x}) != 0")));
            }
            for y in 0..n {
                let dxy = self.site_distance(x, y);
                if !dxy.is_finite() || dxy < 0.0 {
                    return Err(Error::Metric(format!("d({x},{y}) = {dxy}")));
                }
                if (dxy - self.site_distance(y, x)).abs() > DISTANCE_EPS {
                    return Err(Error::Metric(format!("d({x},{y}) != d({y},{x})")));
                }
                for z in 0..n {
                    if self.site_distance(x, z) > dxy + self.site_distance(y, z) + DISTANCE_EPS {
                        return Err(Error::Metric(format!(
                            "triangle inequality fails for ({x},{y},{z})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// `ceil(x)` that ignores floating-point noise just above an integer.
pub fn ceil_ratio(distance: f64, range: f64) -> u64 {
    let x = distance / range;
    let r = x.round();
    if (x - r).abs() <= 1e-9 {
        r.max(0.0) as u64
    } else {
        x.ceil().max(0.0) as u64
    }
}

/// Successor rule for the path counter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SuccessorRule {
    /// `Z_{i+1}` contained in the extension of `Z_i`.
    Containment,
    /// `Z_{i+1}` intersects `Z_i`.
    Overlap,
}

/// Supports of the nonzero local Liouville terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InteractionHypergraph {
    supports: Vec<Region>,
}

impl InteractionHypergraph {
    /// Supports are deduplicated and kept in sorted order. Empty supports are
    /// rejected.
    pub fn new<I: IntoIterator<Item = Region>>(supports: I) -> Result<Self> {
        let set: BTreeSet<Region> = supports.into_iter().collect();
        if set.iter().any(Region::is_empty) {
            return Err(Error::EmptyRegion);
        }
        Ok(InteractionHypergraph {
            supports: set.into_iter().collect(),
        })
    }

    pub fn supports(&self) -> &[Region] {
        &self.supports
    }

    pub fn len(&self) -> usize {
        self.supports.len()
    }

    pub fn is_empty(&self) -> bool {
        self.supports.is_empty()
    }

    /// Union of all supports.
    pub fn covered_sites(&self) -> Region {
        self.supports
            .iter()
            .fold(Region::empty(), |acc, z| acc.union(z))
    }

    /// Maximal support diameter `a`. When every support is a single site the
    /// nearest-neighbour spacing is returned instead, so that `d/a` stays
    /// finite; a larger range only loosens the bounds.
    pub fn range(&self, geom: &LatticeGeometry) -> f64 {
        let a = self
            .supports
            .iter()
            .map(|z| geom.diameter(z))
            .fold(0.0, f64::max);
        if a > DISTANCE_EPS {
            a
        } else {
            geom.min_spacing().unwrap_or(1.0)
        }
    }

    /// Extension: union of all supports intersecting `v`.
    pub fn extension(&self, v: &Region) -> Region {
        let mut out = Region::empty();
        for z in self.supports.iter().filter(|z| z.intersects(v)) {
            out = out.union(z);
        }
        out
    }

    /// Number of supports contained in `v`.
    pub fn volume(&self, v: &Region) -> usize {
        self.supports.iter().filter(|z| z.is_subset(v)).count()
    }

    /// Indices of supports contained in `v`.
    pub fn supports_within(&self, v: &Region) -> Vec<usize> {
        (0..self.supports.len())
            .filter(|&k| self.supports[k].is_subset(v))
            .collect()
    }

    /// Maximum over supports of the number of supports overlapping it
    /// (the support itself included).
    pub fn max_neighbors(&self) -> Result<usize> {
        self.supports
            .iter()
            .map(|z| self.supports.iter().filter(|w| w.intersects(z)).count())
            .max()
            .ok_or(Error::EmptyHypergraph)
    }

    /// Maximum over supports of `volume(extension(Z))`. Bounds the branching
    /// of the containment path rule; never smaller than [`Self::max_neighbors`].
    pub fn max_extension_volume(&self) -> Result<usize> {
        self.supports
            .iter()
            .map(|z| self.volume(&self.extension(z)))
            .max()
            .ok_or(Error::EmptyHypergraph)
    }

    /// Smallest superset of `w` such that every support inside `v` that
    /// meets it is contained in it. Evolution under the terms inside `v`
    /// never leaves this region.
    pub fn closure(&self, w: &Region, v: &Region) -> Region {
        let inside: Vec<&Region> = self.supports.iter().filter(|z| z.is_subset(v)).collect();
        let mut out = w.clone();
        loop {
            let mut grown = false;
            for z in &inside {
                if z.intersects(&out) && !z.is_subset(&out) {
                    out = out.union(z);
                    grown = true;
                }
            }
            if !grown {
                return out;
            }
        }
    }

    /// Shell `R_{n,y}`: supports `X` with `d(y, X)/a` in `[n, n+1)`.
    pub fn shell_terms(&self, geom: &LatticeGeometry, y: Site, n: u64) -> Result<Vec<Region>> {
        geom.check_site(y)?;
        let a = self.range(geom);
        let y = Region::single(y);
        let mut out = Vec::new();
        for z in &self.supports {
            let ratio = geom.distance(&y, z)? / a;
            let lo = n as f64 - DISTANCE_EPS;
            let hi = (n + 1) as f64 - DISTANCE_EPS;
            if ratio >= lo && ratio < hi {
                out.push(z.clone());
            }
        }
        Ok(out)
    }

    /// Smallest `M` with `|R_{n,y}| <= M n^kappa` for every site and every
    /// shell `n >= 1` of this finite lattice.
    pub fn fit_growth_constants(&self, geom: &LatticeGeometry, kappa: f64) -> Result<f64> {
        if !(kappa >= 0.0) {
            return Err(Error::Precondition(format!("growth exponent {kappa} < 0")));
        }
        let a = self.range(geom);
        let mut m: f64 = 0.0;
        for y in 0..geom.n_sites() {
            let ys = Region::single(y);
            let mut counts: HashMap<u64, usize> = HashMap::new();
            for z in &self.supports {
                let ratio = geom.distance(&ys, z)? / a;
                let n = (ratio + DISTANCE_EPS).floor() as u64;
                if n >= 1 {
                    *counts.entry(n).or_default() += 1;
                }
            }
            for (n, c) in counts {
                m = m.max(c as f64 / (n as f64).powf(kappa));
            }
        }
        Ok(m)
    }

    fn successors(&self, rule: SuccessorRule) -> Vec<Vec<usize>> {
        self.supports
            .iter()
            .map(|z| match rule {
                SuccessorRule::Containment => self.supports_within(&self.extension(z)),
                SuccessorRule::Overlap => (0..self.supports.len())
                    .filter(|&k| self.supports[k].intersects(z))
                    .collect(),
            })
            .collect()
    }

    /// Number of support sequences `(Z_1, ..., Z_n)` with `Z_1` inside the
    /// extension of `x`, each `Z_{i+1}` a successor of `Z_i` under `rule`,
    /// and `Z_n` meeting `y`. For `n = 0` this is 1 when `x` meets `y`.
    ///
    /// Exhaustive memoized depth-first count.
    pub fn enumerate_paths(&self, x: &Region, y: &Region, n: usize, rule: SuccessorRule) -> u128 {
        if n == 0 {
            return u128::from(x.intersects(y));
        }
        let succ = self.successors(rule);
        let hits: Vec<bool> = self.supports.iter().map(|z| z.intersects(y)).collect();
        let mut memo: HashMap<(usize, usize), u128> = HashMap::new();
        self.supports_within(&self.extension(x))
            .into_iter()
            .map(|z| count_from(z, n - 1, &succ, &hits, &mut memo))
            .sum()
    }
}

fn count_from(
    z: usize,
    remaining: usize,
    succ: &[Vec<usize>],
    hits: &[bool],
    memo: &mut HashMap<(usize, usize), u128>,
) -> u128 {
    if remaining == 0 {
        return u128::from(hits[z]);
    }
    if let Some(&c) = memo.get(&(z, remaining)) {
        return c;
    }
    let c = succ[z]
        .iter()
        .map(|&w| count_from(w, remaining - 1, succ, hits, memo))
        .sum();
    memo.insert((z, remaining), c);
    c
}
