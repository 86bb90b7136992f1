// Copyright 2026 The lrsim Authors
// SPDX-License-Identifier: Apache-2.0

//! Experiment configuration, drivers and output: one CSV table per run plus
//! a JSON summary with the config hash, model constants and error budget.

pub mod config;
pub mod experiments;

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde_json::json;

pub use config::{Config, ExperimentKind};
pub use experiments::{
    run_bounds_selftest, run_lr_experiment, run_quasilocal_experiment, run_simulate,
    run_trotter_experiment, BOUND_SLACK,
};

use crate::bounds::BoundParams;
use crate::error::{Error, Result};

const PARAM_COLUMNS: [&str; 6] = ["a", "z_max", "ell_norm", "v", "m", "kappa"];

/// Shortest round-trip representation, so reruns are byte-identical.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

fn param_cells(p: &BoundParams) -> Vec<String> {
    [p.a, p.z_max, p.ell_norm, p.v(), p.m, p.kappa]
        .iter()
        .map(|x| fmt_f64(*x))
        .collect()
}

fn opt_cell(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

fn ratio(measured: f64, bound: Option<f64>) -> String {
    match bound {
        Some(b) if b > 0.0 => fmt_f64(measured / b),
        _ => String::new(),
    }
}

/// Tabular result of one run.
#[derive(Clone, Debug, Default)]
pub struct Report {
    pub experiment: Option<ExperimentKind>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// Constants of the (first) model, for the summary.
    pub params: Option<BoundParams>,
    pub violations: Vec<String>,
    pub precondition_failures: Vec<String>,
    /// Largest integrator halving difference.
    pub numerical_error: f64,
    /// Extra text files as `(name, contents)`.
    pub artifacts: Vec<(String, String)>,
}

impl Report {
    fn new(kind: ExperimentKind, params: BoundParams, columns: &[&str]) -> Report {
        let mut cols: Vec<String> = columns.iter().map(|c| c.to_string()).collect();
        cols.extend(PARAM_COLUMNS.iter().map(|c| c.to_string()));
        Report {
            experiment: Some(kind),
            columns: cols,
            params: Some(params),
            ..Report::default()
        }
    }

    fn push(&mut self, mut cells: Vec<String>, p: &BoundParams) {
        cells.extend(param_cells(p));
        self.rows.push(cells);
    }

    fn note_error(&mut self, e: f64) {
        if e.is_finite() {
            self.numerical_error = self.numerical_error.max(e);
        }
    }

    /// No bound violations and no precondition failures.
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.precondition_failures.is_empty()
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn summary(&self, cfg: &Config) -> serde_json::Value {
        let constants = self.params.map(|p| {
            json!({
                "a": p.a,
                "z_max": p.z_max,
                "ell_norm": p.ell_norm,
                "v": p.v(),
                "m": p.m,
                "kappa": p.kappa,
            })
        });
        json!({
            "version": env!("CARGO_PKG_VERSION"),
            "experiment": self.experiment.map(|k| k.name()),
            "config_sha256": cfg.hash(),
            "seed": cfg.seed,
            "rows": self.rows.len(),
            "constants": constants,
            "error_budget": {
                "max_halving_difference": self.numerical_error,
                "solver_tolerance": cfg.solver.tolerance,
                "bound_slack": BOUND_SLACK,
            },
            "violations": self.violations,
            "precondition_failures": self.precondition_failures,
            "passed": self.passed(),
        })
    }

    /// Write `<kind>.csv`, `<kind>.summary.json` and the artifacts into
    /// `dir`, returning the paths written.
    pub fn write(&self, cfg: &Config, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let stem = self.experiment.map(|k| k.name()).unwrap_or("run");
        let mut out = Vec::new();
        let csv_path = dir.join(format!("{stem}.csv"));
        fs::write(&csv_path, self.to_csv()?)?;
        out.push(csv_path);
        let json_path = dir.join(format!("{stem}.summary.json"));
        let mut text = serde_json::to_string_pretty(&self.summary(cfg))?;
        text.push('\n');
        fs::write(&json_path, text)?;
        out.push(json_path);
        for (name, contents) in &self.artifacts {
            let p = dir.join(name);
            fs::write(&p, contents)?;
            out.push(p);
        }
        Ok(out)
    }
}

fn lr_report(cfg: &Config) -> Result<Report> {
    let o = run_lr_experiment(cfg)?;
    let mut rep = Report::new(
        ExperimentKind::Lr,
        o.params,
        &["probe_site", "d", "r", "t", "t_minus_r", "measured", "bound", "ratio", "error_estimate"],
    );
    for row in &o.rows {
        rep.note_error(row.error_estimate);
        if !row.holds() {
            rep.violations.push(format!(
                "probe {} at t-r = {}: measured {} > bound {}",
                row.probe_site,
                row.lag(),
                row.measured,
                row.bound
            ));
        }
        rep.push(
            vec![
                row.probe_site.to_string(),
                fmt_f64(row.distance),
                fmt_f64(row.r),
                fmt_f64(row.t),
                fmt_f64(row.lag()),
                fmt_f64(row.measured),
                fmt_f64(row.bound),
                ratio(row.measured, Some(row.bound)),
                fmt_f64(row.error_estimate),
            ],
            &o.params,
        );
    }
    Ok(rep)
}

fn quasilocal_report(cfg: &Config) -> Result<Report> {
    let o = run_quasilocal_experiment(cfg)?;
    let mut rep = Report::new(
        ExperimentKind::Quasilocal,
        o.params,
        &["radius", "D", "r", "t", "t_minus_r", "measured", "bound", "ratio", "error_estimate"],
    );
    rep.precondition_failures = o.precondition_failures.clone();
    for row in &o.rows {
        rep.note_error(row.error_estimate);
        if row.bound.is_some() && !row.holds() {
            rep.violations.push(format!(
                "radius {} at t-r = {}: measured {} > bound {}",
                row.radius,
                row.lag(),
                row.measured,
                opt_cell(row.bound)
            ));
        }
        rep.push(
            vec![
                row.radius.to_string(),
                row.depth.to_string(),
                fmt_f64(row.r),
                fmt_f64(row.t),
                fmt_f64(row.lag()),
                fmt_f64(row.measured),
                opt_cell(row.bound),
                ratio(row.measured, row.bound),
                fmt_f64(row.error_estimate),
            ],
            &o.params,
        );
    }
    Ok(rep)
}

fn trotter_report(cfg: &Config) -> Result<Report> {
    let o = run_trotter_experiment(cfg)?;
    let mut rep = Report::new(
        ExperimentKind::Trotter,
        o.params,
        &["dt", "slices", "observed_sup", "bound", "ratio", "halving_ratio", "numerical_error", "velocity"],
    );
    rep.precondition_failures = o.precondition_failures.clone();
    let mut prev: Option<f64> = None;
    for (k, row) in o.rows.iter().enumerate() {
        rep.note_error(row.numerical_error);
        if row.bound.is_some() && !row.holds() {
            rep.violations.push(format!(
                "dt {}: observed {} > bound {}",
                row.dt,
                row.observed_sup,
                opt_cell(row.bound)
            ));
        }
        let halving = match prev {
            Some(p) if p > 0.0 => fmt_f64(row.observed_sup / p),
            _ => String::new(),
        };
        prev = Some(row.observed_sup);
        rep.push(
            vec![
                fmt_f64(row.dt),
                row.slices.to_string(),
                fmt_f64(row.observed_sup),
                opt_cell(row.bound),
                ratio(row.observed_sup, row.bound),
                halving,
                fmt_f64(row.numerical_error),
                fmt_f64(o.velocity),
            ],
            &o.params,
        );
        rep.artifacts
            .push((format!("circuit_{k}.txt"), o.circuits[k].clone()));
    }
    Ok(rep)
}

fn selftest_report(cfg: &Config) -> Result<Report> {
    let o = run_bounds_selftest(cfg)?;
    let mut rep = Report::new(
        ExperimentKind::BoundsSelftest,
        o.params,
        &["check", "cases", "violations", "worst_margin"],
    );
    for row in &o.rows {
        if row.violations > 0 {
            rep.violations
                .push(format!("{}: {} of {} cases fail", row.check, row.violations, row.cases));
        }
        rep.push(
            vec![
                row.check.clone(),
                row.cases.to_string(),
                row.violations.to_string(),
                fmt_f64(row.worst_margin),
            ],
            &o.params,
        );
    }
    Ok(rep)
}

fn simulate_report(cfg: &Config) -> Result<Report> {
    let o = run_simulate(cfg)?;
    let mut rep = Report::new(
        ExperimentKind::Simulate,
        o.params,
        &["t", "heisenberg", "schrodinger", "difference"],
    );
    for row in &o.rows {
        if !row.holds() {
            rep.violations.push(format!(
                "t = {}: pictures disagree ({} vs {})",
                row.t, row.heisenberg, row.schrodinger
            ));
        }
        rep.push(
            vec![
                fmt_f64(row.t),
                fmt_f64(row.heisenberg),
                fmt_f64(row.schrodinger),
                fmt_f64((row.heisenberg - row.schrodinger).abs()),
            ],
            &o.params,
        );
    }
    Ok(rep)
}

/// Run every sweep point with `jobs` worker threads (0: one per core).
/// Rows are ordered by point index.
pub fn run_sweep(cfg: &Config, jobs: usize) -> Result<Report> {
    let sweep = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| Error::Config("missing [sweep] section".into()))?;
    let points: Vec<Config> = sweep
        .values
        .iter()
        .map(|value| {
            let mut table = cfg.as_table();
            table.remove("sweep");
            config::set_path(&mut table, &sweep.parameter, value.clone())?;
            table.insert(
                "experiment".into(),
                toml::Value::String(sweep.base.name().into()),
            );
            Config::from_table(table)
        })
        .collect::<Result<_>>()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let reports: Vec<Result<Report>> =
        pool.install(|| points.par_iter().map(run_single).collect());
    let mut merged = Report {
        experiment: Some(ExperimentKind::Sweep),
        ..Report::default()
    };
    for (k, (rep, value)) in reports.into_iter().zip(&sweep.values).enumerate() {
        let rep = rep?;
        if merged.columns.is_empty() {
            merged.columns = vec!["point".into(), "value".into()];
            merged.columns.extend(rep.columns.iter().cloned());
            merged.params = rep.params;
        }
        let value = value.to_string();
        for row in rep.rows {
            let mut cells = vec![k.to_string(), value.clone()];
            cells.extend(row);
            merged.rows.push(cells);
        }
        merged
            .violations
            .extend(rep.violations.into_iter().map(|v| format!("point {k}: {v}")));
        merged.precondition_failures.extend(
            rep.precondition_failures
                .into_iter()
                .map(|v| format!("point {k}: {v}")),
        );
        merged.numerical_error = merged.numerical_error.max(rep.numerical_error);
        merged.artifacts.extend(
            rep.artifacts
                .into_iter()
                .map(|(name, text)| (format!("point_{k}_{name}"), text)),
        );
    }
    Ok(merged)
}

fn run_single(cfg: &Config) -> Result<Report> {
    match cfg.experiment {
        ExperimentKind::Lr => lr_report(cfg),
        ExperimentKind::Quasilocal => quasilocal_report(cfg),
        ExperimentKind::Trotter => trotter_report(cfg),
        ExperimentKind::BoundsSelftest => selftest_report(cfg),
        ExperimentKind::Simulate => simulate_report(cfg),
        ExperimentKind::Sweep => Err(Error::Config("sweeps cannot be nested".into())),
    }
}

/// Run the configured experiment.
pub fn run(cfg: &Config, jobs: usize) -> Result<Report> {
    match cfg.experiment {
        ExperimentKind::Sweep => run_sweep(cfg, jobs),
        _ => run_single(cfg),
    }
}
