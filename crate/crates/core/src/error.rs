// Copyright 2026 The lrsim Authors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

use crate::lattice::{Region, Site};

/// Errors raised anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty region")]
    EmptyRegion,
    #[error("interaction hypergraph has no supports")]
    EmptyHypergraph,
    #[error("site {0} is not part of the lattice")]
    UnknownSite(Site),
    #[error("region {inner} is not contained in {outer}")]
    NotSubset { inner: Region, outer: Region },
    #[error("support {support} straddles the working region {region}")]
    Straddle { support: Region, region: Region },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("operator is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),
    #[error("invalid time interval: start {start} is after end {end}")]
    TimeOrder { start: f64, end: f64 },
    #[error("theorem precondition violated: {0}")]
    Precondition(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("invalid schedule: {0}")]
    Schedule(String),
    #[error("scale limit exceeded: {0}")]
    ScaleLimit(String),
    #[error("invalid norm request: {0}")]
    NormMode(String),
    #[error("metric axiom violated: {0}")]
    Metric(String),
    #[error("invalid model: {0}")]
    Model(String),
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
