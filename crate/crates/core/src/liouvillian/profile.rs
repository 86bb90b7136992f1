// Copyright 2026 The lrsim Authors
// SPDX-License-Identifier: Apache-2.0

//! Scalar time profiles multiplying a local term.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn one() -> f64 {
    1.0
}

/// Scalar `c(t)` scaling a whole local term.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TimeProfile {
    Constant {
        #[serde(default = "one")]
        value: f64,
    },
    /// `values[k]` on `[breakpoints[k-1], breakpoints[k])`, right-continuous;
    /// `values` has one more entry than `breakpoints`.
    PiecewiseConstant { breakpoints: Vec<f64>, values: Vec<f64> },
    /// `offset + amplitude * sin(frequency * t + phase)`.
    Sinusoid {
        #[serde(default)]
        offset: f64,
        amplitude: f64,
        frequency: f64,
        #[serde(default)]
        phase: f64,
    },
    /// `before` for `t < time`, `after` from `time` on.
    Quench { time: f64, before: f64, after: f64 },
}

impl Default for TimeProfile {
    fn default() -> Self {
        TimeProfile::Constant { value: 1.0 }
    }
}

impl TimeProfile {
    pub fn constant(value: f64) -> Self {
        TimeProfile::Constant { value }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |x: f64| x.is_finite();
        let ok = match self {
            TimeProfile::Constant { value } => finite(*value),
            TimeProfile::PiecewiseConstant {
                breakpoints,
                values,
            } => {
                values.len() == breakpoints.len() + 1
                    && breakpoints.windows(2).all(|w| w[0] < w[1])
                    && breakpoints.iter().chain(values).all(|x| finite(*x))
            }
            TimeProfile::Sinusoid {
                offset,
                amplitude,
                frequency,
                phase,
            } => [*offset, *amplitude, *frequency, *phase].into_iter().all(finite),
            TimeProfile::Quench {
                time,
                before,
                after,
            } => [*time, *before, *after].into_iter().all(finite),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Model(format!("invalid time profile {self:?}")))
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, TimeProfile::Constant { .. })
    }

    /// True for profiles that are constant between breakpoints.
    pub fn is_piecewise_constant(&self) -> bool {
        !matches!(self, TimeProfile::Sinusoid { .. })
    }

    pub fn value(&self, t: f64) -> f64 {
        match self {
            TimeProfile::Constant { value } => *value,
            TimeProfile::PiecewiseConstant {
                breakpoints,
                values,
            } => values[breakpoints.partition_point(|&b| b <= t)],
            TimeProfile::Sinusoid {
                offset,
                amplitude,
                frequency,
                phase,
            } => offset + amplitude * (frequency * t + phase).sin(),
            TimeProfile::Quench {
                time,
                before,
                after,
            } => {
                if t < *time {
                    *before
                } else {
                    *after
                }
            }
        }
    }

    /// Value at `t` for a step lying inside the segment `[lo, hi]` between
    /// two consecutive breakpoints. Jumps are resolved by the segment, not by
    /// the side on which `t` happens to sit.
    pub fn value_in_segment(&self, t: f64, lo: f64, hi: f64) -> f64 {
        if self.is_piecewise_constant() {
            self.value(0.5 * (lo + hi))
        } else {
            self.value(t)
        }
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            TimeProfile::PiecewiseConstant { breakpoints, .. } => breakpoints.clone(),
            TimeProfile::Quench { time, .. } => vec![*time],
            _ => Vec::new(),
        }
    }

    /// Exact integral over `[r, t]`.
    pub fn integral(&self, r: f64, t: f64) -> f64 {
        match self {
            TimeProfile::Constant { value } => value * (t - r),
            TimeProfile::Sinusoid {
                offset,
                amplitude,
                frequency,
                phase,
            } => {
                let osc = if *frequency == 0.0 {
                    phase.sin() * (t - r)
                } else {
                    ((frequency * r + phase).cos() - (frequency * t + phase).cos()) / frequency
                };
                offset * (t - r) + amplitude * osc
            }
            _ => {
                let mut edges = vec![r];
                edges.extend(self.breakpoints().into_iter().filter(|&b| b > r && b < t));
                edges.push(t);
                edges
                    .windows(2)
                    .map(|w| self.value_in_segment(w[0], w[0], w[1]) * (w[1] - w[0]))
                    .sum()
            }
        }
    }

    /// Time average over `[r, t]`; the value at `r` when the interval is
    /// degenerate.
    pub fn average(&self, r: f64, t: f64) -> Result<f64> {
        if r > t {
            return Err(Error::TimeOrder { start: r, end: t });
        }
        if let TimeProfile::Constant { value } = self {
            return Ok(*value);
        }
        if t == r {
            return Ok(self.value(r));
        }
        Ok(self.integral(r, t) / (t - r))
    }

    /// `sup |c|` over `[r, t]`: grid points, endpoints, breakpoint values and
    /// analytic extrema where known.
    pub fn sup_abs(&self, r: f64, t: f64, grid: usize) -> f64 {
        let mut best: f64 = 0.0;
        let n = grid.max(1);
        for k in 0..=n {
            let s = if n == 0 { r } else { r + (t - r) * k as f64 / n as f64 };
            best = best.max(self.value(s).abs());
        }
        match self {
            TimeProfile::PiecewiseConstant { .. } | TimeProfile::Quench { .. } => {
                let mut edges = vec![r];
                edges.extend(self.breakpoints().into_iter().filter(|&b| b > r && b < t));
                edges.push(t);
                for w in edges.windows(2) {
                    best = best.max(self.value_in_segment(w[0], w[0], w[1]).abs());
                }
            }
            TimeProfile::Sinusoid {
                frequency, phase, ..
            } if *frequency != 0.0 => {
                // Extrema of the sine at frequency * s + phase = pi/2 + k pi.
                let w = *frequency;
                let (a, b) = if w > 0.0 {
                    (w * r + phase, w * t + phase)
                } else {
                    (w * t + phase, w * r + phase)
                };
                let half_pi = std::f64::consts::FRAC_PI_2;
                let pi = std::f64::consts::PI;
                let mut k = ((a - half_pi) / pi).ceil();
                while half_pi + k * pi <= b {
                    let s = (half_pi + k * pi - phase) / w;
                    best = best.max(self.value(s).abs());
                    k += 1.0;
                }
            }
            _ => {}
        }
        best
    }
}
