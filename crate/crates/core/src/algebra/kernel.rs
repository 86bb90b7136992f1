// Copyright 2026 The lrsim Authors
// SPDX-License-Identifier: Apache-2.0

//! Index bookkeeping for local superoperators acting on a subset of the
//! tensor factors of a larger operator.
//!
//! Operators are stored column-major, so the raw element slice of a `D x D`
//! matrix is its column-stacked vectorization `vec(O)[r + D c] = O[r, c]`.
//! A local superoperator `S` on factors `P` of the host acts on every block
//! of `d_P^2` entries that share the remaining row and column digits.

use super::{Matrix, C64};

/// Precomputed gather pattern for a local superoperator on a host region.
#[derive(Clone, Debug)]
pub struct SlotMap {
    host_dim: usize,
    local_dim: usize,
    /// Host vec offsets for each local vec index `a + d_P b`.
    vec_offsets: Vec<usize>,
    /// Host vec index of every block (local digits zero).
    block_bases: Vec<usize>,
    /// Host row/column indices with vanishing local digits.
    rest_bases: Vec<usize>,
    /// Length of the contiguous runs of row indices sharing local digits
    /// (the stride of the last local factor).
    run: usize,
    /// Block bases at the start of each run.
    run_bases: Vec<usize>,
}

impl SlotMap {
    /// `host_dims` are the factor dimensions of the host in canonical order;
    /// `positions` are the (sorted) factor positions the local map acts on.
    pub fn new(host_dims: &[usize], positions: &[usize]) -> Self {
        let n = host_dims.len();
        let host_dim: usize = host_dims.iter().product();
        let mut strides = vec![1usize; n];
        for k in (0..n.saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * host_dims[k + 1];
        }
        let local_dims: Vec<usize> = positions.iter().map(|&p| host_dims[p]).collect();
        let local_dim: usize = local_dims.iter().product();

        // Host offset of each local basis index (first factor most significant).
        let mut offsets = vec![0usize; local_dim];
        for (l, off) in offsets.iter_mut().enumerate() {
            let mut rem = l;
            for j in (0..positions.len()).rev() {
                let digit = rem % local_dims[j];
                rem /= local_dims[j];
                *off += digit * strides[positions[j]];
            }
        }

        // Host indices whose digits at `positions` vanish.
        let rest: Vec<usize> = (0..n).filter(|k| !positions.contains(k)).collect();
        let rest_dim = host_dim / local_dim;
        let mut bases = Vec::with_capacity(rest_dim);
        for l in 0..rest_dim {
            let mut rem = l;
            let mut idx = 0;
            for &k in rest.iter().rev() {
                let digit = rem % host_dims[k];
                rem /= host_dims[k];
                idx += digit * strides[k];
            }
            bases.push(idx);
        }
        bases.sort_unstable();

        let mut vec_offsets = Vec::with_capacity(local_dim * local_dim);
        for b in 0..local_dim {
            for a in 0..local_dim {
                vec_offsets.push(offsets[a] + host_dim * offsets[b]);
            }
        }
        let mut block_bases = Vec::with_capacity(rest_dim * rest_dim);
        for &cb in &bases {
            for &rb in &bases {
                block_bases.push(rb + host_dim * cb);
            }
        }
        let run = positions.iter().map(|&p| strides[p]).min().unwrap_or(host_dim);
        let run_bases = block_bases
            .iter()
            .copied()
            .filter(|&b| (b % host_dim).is_multiple_of(run))
            .collect();
        SlotMap {
            host_dim,
            local_dim,
            vec_offsets,
            block_bases,
            rest_bases: bases,
            run,
            run_bases,
        }
    }

    pub fn host_dim(&self) -> usize {
        self.host_dim
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }
}

/// Write `local ⊗ identity` into `out` (which must start zeroed); `local` is
/// the column-major slice of a `d_P x d_P` operator.
pub fn embed(map: &SlotMap, local: &[C64], out: &mut [C64]) {
    debug_assert_eq!(local.len(), map.local_dim * map.local_dim);
    for &rb in &map.rest_bases {
        let base = rb + map.host_dim * rb;
        for (&v, &off) in local.iter().zip(&map.vec_offsets) {
            out[base + off] = v;
        }
    }
}

/// Local superoperator matrix in compressed-row form. Generators built from
/// Pauli-type operators are mostly zeros, so only nonzero entries are kept.
#[derive(Clone, Debug)]
pub struct LocalMap {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
}

impl LocalMap {
    pub fn new(matrix: &Matrix) -> Self {
        let n = matrix.nrows();
        assert_eq!(n, matrix.ncols(), "local superoperator must be square");
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for i in 0..n {
            for j in 0..n {
                let v = matrix[(i, j)];
                if v != C64::new(0.0, 0.0) {
                    cols.push(j);
                    vals.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        LocalMap {
            n,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn nonzeros(&self) -> usize {
        self.vals.len()
    }

    pub fn to_matrix(&self) -> Matrix {
        let mut m = Matrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                m[(i, self.cols[k])] = self.vals[k];
            }
        }
        m
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> LocalMap {
        LocalMap::new(&self.to_matrix().adjoint())
    }
}

/// `out += scale * S(input)` on the slots described by `map`.
pub fn accumulate(map: &SlotMap, local: &LocalMap, scale: C64, input: &[C64], out: &mut [C64]) {
    debug_assert_eq!(local.n, map.local_dim * map.local_dim);
    debug_assert_eq!(input.len(), map.host_dim * map.host_dim);
    debug_assert_eq!(out.len(), input.len());
    let len = input.len();
    for i in 0..local.n {
        let dst = map.vec_offsets[i];
        for k in local.row_ptr[i]..local.row_ptr[i + 1] {
            let src = map.vec_offsets[local.cols[k]];
            let v = scale * local.vals[k];
            let run = map.run;
            for &base in &map.run_bases {
                debug_assert!(base + dst.max(src) + run <= len);
                let o = &mut out[base + dst..base + dst + run];
                let x = &input[base + src..base + src + run];
                for (oi, xi) in o.iter_mut().zip(x) {
                    *oi += v * xi;
                }
            }
        }
    }
}

/// `out = S(input)` on the slots described by `map` (every entry written).
pub fn apply(map: &SlotMap, local: &LocalMap, input: &[C64], out: &mut [C64]) {
    for &base in &map.block_bases {
        for &off in &map.vec_offsets {
            out[base + off] = C64::new(0.0, 0.0);
        }
    }
    accumulate(map, local, C64::new(1.0, 0.0), input, out);
}
