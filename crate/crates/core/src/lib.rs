// Copyright 2026 The lrsim Authors
// SPDX-License-Identifier: Apache-2.0

//! Simulation and bound-checking toolkit for locality of open-system
//! dynamics on lattices.

// Negated comparisons are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod bounds;
pub mod error;
pub mod harness;
pub mod lattice;
pub mod liouvillian;
pub mod propagator;
pub mod trotter;

pub use error::{Error, Result};
