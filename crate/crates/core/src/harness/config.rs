// Copyright 2026 The lrsim Authors
// SPDX-License-Identifier: Apache-2.0

//! Experiment configuration: a versioned TOML document. Unknown keys are
//! rejected everywhere.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::algebra::{pauli, Op, SiteDims};
use crate::error::{Error, Result};
use crate::lattice::{LatticeGeometry, Metric, Region};
use crate::liouvillian::presets::{self, IsingParams, RandomParams, XyParams};
use crate::liouvillian::{LiouvillianSpec, DEFAULT_NORM_GRID};
use crate::propagator::SolverConfig;
use crate::trotter::Ordering;

pub const CONFIG_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Lr,
    Quasilocal,
    Trotter,
    BoundsSelftest,
    Sweep,
    Simulate,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::Lr => "lr",
            ExperimentKind::Quasilocal => "quasilocal",
            ExperimentKind::Trotter => "trotter",
            ExperimentKind::BoundsSelftest => "bounds-selftest",
            ExperimentKind::Sweep => "sweep",
            ExperimentKind::Simulate => "simulate",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub version: u32,
    pub experiment: ExperimentKind,
    pub seed: u64,
    pub model: ModelConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub limits: Limits,
    #[serde(default)]
    pub lr: LrConfig,
    #[serde(default)]
    pub quasilocal: QuasilocalConfig,
    #[serde(default)]
    pub trotter: TrotterConfig,
    #[serde(default)]
    pub simulate: SimulateConfig,
    #[serde(default)]
    pub selftest: SelftestConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub geometry: GeometryConfig,
    pub preset: PresetConfig,
    /// Growth exponent used for the truncation bounds.
    #[serde(default)]
    pub kappa: f64,
    /// Grid points for `sup_t` of the term norms.
    #[serde(default = "default_norm_grid")]
    pub norm_grid: usize,
}

fn default_norm_grid() -> usize {
    DEFAULT_NORM_GRID
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GeometryConfig {
    Chain {
        n: usize,
    },
    Grid {
        width: usize,
        height: usize,
        #[serde(default = "default_metric")]
        metric: Metric,
    },
    Cubic {
        width: usize,
        height: usize,
        depth: usize,
        #[serde(default = "default_metric")]
        metric: Metric,
    },
}

fn default_metric() -> Metric {
    Metric::L1
}

impl GeometryConfig {
    pub fn build(&self) -> LatticeGeometry {
        match self {
            GeometryConfig::Chain { n } => LatticeGeometry::chain(*n),
            GeometryConfig::Grid {
                width,
                height,
                metric,
            } => LatticeGeometry::grid(*width, *height, *metric),
            GeometryConfig::Cubic {
                width,
                height,
                depth,
                metric,
            } => LatticeGeometry::cubic(*width, *height, *depth, *metric),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "kebab-case")]
pub enum PresetConfig {
    DissipativeIsing(IsingParams),
    XyDephasing(XyParams),
    Random(RandomParams),
}

impl ModelConfig {
    pub fn build(&self) -> Result<LiouvillianSpec> {
        let geometry = self.geometry.build();
        if geometry.n_sites() == 0 {
            return Err(Error::Config("the lattice has no sites".into()));
        }
        match &self.preset {
            PresetConfig::DissipativeIsing(p) => presets::dissipative_ising(geometry, p),
            PresetConfig::XyDephasing(p) => presets::xy_dephasing(geometry, p),
            PresetConfig::Random(p) => presets::random_model(geometry, p),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Limits {
    /// Largest region (in qubits) for exact propagation.
    pub max_qubits: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_qubits: 10 }
    }
}

/// Named product operator: one symbol of `I X Y Z + -` per site.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservableConfig {
    pub sites: Vec<usize>,
    pub op: String,
}

impl ObservableConfig {
    pub fn new(sites: &[usize], op: &str) -> Self {
        ObservableConfig {
            sites: sites.to_vec(),
            op: op.to_string(),
        }
    }

    pub fn region(&self) -> Region {
        Region::new(self.sites.iter().copied())
    }

    /// Symbols are matched to sites in ascending order.
    pub fn build(&self, spec: &LiouvillianSpec) -> Result<Op> {
        let region = self.region();
        if region.len() != self.sites.len() || region.is_empty() {
            return Err(Error::Config(format!("observable sites {:?} must be distinct and nonempty", self.sites)));
        }
        spec.geometry().check_region(&region)?;
        if self.op.chars().count() != region.len() {
            return Err(Error::Config(format!(
                "operator `{}` needs one symbol per site of {region}",
                self.op
            )));
        }
        if spec.site_dims() != &SiteDims::qubits() {
            return Err(Error::Config("named operators need qubit sites".into()));
        }
        let m = pauli::string(&self.op)
            .ok_or_else(|| Error::Config(format!("unknown operator symbols in `{}`", self.op)))?;
        Op::qubits(region, m)
    }
}

fn default_lags() -> Vec<f64> {
    (1..=10).map(|k| k as f64 / 10.0).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LrConfig {
    /// `O_Y`.
    pub observable: ObservableConfig,
    /// Symbol of the probe operator `O_X` in `K_X O = i[O_X, O]`.
    pub probe_op: String,
    /// Sites hosting the probe, one row block per site.
    pub probe_sites: Vec<usize>,
    /// Values of `t - r`.
    pub lags: Vec<f64>,
}

impl Default for LrConfig {
    fn default() -> Self {
        LrConfig {
            observable: ObservableConfig::new(&[4], "Z"),
            probe_op: "X".into(),
            probe_sites: vec![0],
            lags: default_lags(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuasilocalConfig {
    pub observable: ObservableConfig,
    /// Radii (in units of `a`) of the balls `V` around the observable.
    pub radii: Vec<u64>,
    pub lags: Vec<f64>,
}

impl Default for QuasilocalConfig {
    fn default() -> Self {
        QuasilocalConfig {
            observable: ObservableConfig::new(&[4], "Z"),
            radii: vec![1, 2, 3, 4],
            lags: vec![0.3],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrotterConfig {
    /// Subsystem `Y`.
    pub y_sites: Vec<usize>,
    pub t_total: f64,
    pub dts: Vec<f64>,
    pub d0: u64,
    /// Cone velocity for the schedule; the Lieb-Robinson velocity if absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub velocity: Option<f64>,
    pub ordering: Ordering,
    pub averaged: bool,
    /// Random Hermitian and random rank-one samples (each).
    pub samples: usize,
}

impl Default for TrotterConfig {
    fn default() -> Self {
        TrotterConfig {
            y_sites: vec![4],
            t_total: 0.4,
            dts: vec![0.2, 0.1, 0.05, 0.025],
            d0: 3,
            velocity: None,
            ordering: Ordering::Lexicographic,
            averaged: false,
            samples: 4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateConfig {
    /// Initial product state, one of `0 1 + -` per site; all `0` if empty.
    pub state: String,
    pub observable: ObservableConfig,
    pub times: Vec<f64>,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        SimulateConfig {
            state: String::new(),
            observable: ObservableConfig::new(&[0], "Z"),
            times: vec![0.0, 0.5, 1.0],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SelftestConfig {
    pub duality_cases: usize,
    pub cpt_cases: usize,
}

impl Default for SelftestConfig {
    fn default() -> Self {
        SelftestConfig {
            duality_cases: 50,
            cpt_cases: 20,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Experiment run at every point.
    pub base: ExperimentKind,
    /// Dotted key set at every point, e.g. `model.preset.params.gamma`.
    pub parameter: String,
    pub values: Vec<toml::Value>,
}

impl Config {
    /// Parse a document, apply `key=value` overrides, then validate.
    pub fn from_toml_str(text: &str, overrides: &[String]) -> Result<Config> {
        let mut value: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        for o in overrides {
            let (key, raw) = o
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("override `{o}` is not key=value")))?;
            set_path(&mut value, key.trim(), parse_value(raw.trim()))?;
        }
        Config::from_table(value)
    }

    pub fn from_table(table: toml::Table) -> Result<Config> {
        let cfg: Config = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != CONFIG_VERSION {
            return Err(Error::Config(format!(
                "unsupported config version {} (expected {CONFIG_VERSION})",
                self.version
            )));
        }
        if self.experiment == ExperimentKind::Sweep {
            let sweep = self
                .sweep
                .as_ref()
                .ok_or_else(|| Error::Config("sweep experiment needs a [sweep] section".into()))?;
            if sweep.base == ExperimentKind::Sweep {
                return Err(Error::Config("sweeps cannot be nested".into()));
            }
        }
        if !(self.model.kappa >= 0.0) {
            return Err(Error::Config("kappa must be >= 0".into()));
        }
        Ok(())
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// SHA-256 of the canonical serialization.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_toml_string().as_bytes()))
    }

    pub fn as_table(&self) -> toml::Table {
        toml::Table::try_from(self).expect("config serializes")
    }
}

/// TOML literal if it parses as one, else a bare string.
pub fn parse_value(raw: &str) -> toml::Value {
    let doc = format!("v = {raw}");
    match doc.parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").expect("key present"),
        Err(_) => toml::Value::String(raw.to_string()),
    }
}

/// Set a dotted key, creating intermediate tables.
pub fn set_path(table: &mut toml::Table, key: &str, value: toml::Value) -> Result<()> {
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(Error::Config(format!("bad key `{key}`")));
    }
    let mut cur = table;
    for p in &parts[..parts.len() - 1] {
        let entry = cur
            .entry(p.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| Error::Config(format!("`{p}` in `{key}` is not a table")))?;
    }
    cur.insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}
