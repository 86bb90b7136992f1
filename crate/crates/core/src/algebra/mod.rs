// Copyright 2026 The lrsim Authors
// SPDX-License-Identifier: Apache-2.0

//! Operators on labelled tensor-product spaces and superoperators on them.
//!
//! Conventions:
//! * Tensor factors are ordered by ascending site id, first site most
//!   significant (the usual Kronecker order).
//! * Superoperators are matrices on the column-stacked vectorization,
//!   `vec(O)[r + D c] = O[r, c]`, so `vec(A X B) = (B^T ⊗ A) vec(X)`.
//!   Matrix units are orthonormal for the Hilbert-Schmidt product, hence the
//!   Hilbert-Schmidt adjoint of a superoperator is the conjugate transpose of
//!   its matrix.

pub mod kernel;
pub mod norms;
pub mod pauli;
pub mod random;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::{Region, Site};

pub use norms::{
    choi, cpt_check, inf_inf_norm, inf_inf_norm_direct, one_to_one_norm, CptReport, NormEstimate,
    NormMode, NormOptions,
};

pub type C64 = Complex64;
pub type Matrix = DMatrix<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Largest operator-space dimension `D^2` for materialized Choi matrices.
pub const CHOI_DIM_LIMIT: usize = 4096;

/// Local Hilbert-space dimension of every site.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SiteDims {
    Uniform(usize),
    PerSite(Vec<usize>),
}

impl SiteDims {
    pub fn qubits() -> Self {
        SiteDims::Uniform(2)
    }

    pub fn dim(&self, site: Site) -> usize {
        match self {
            SiteDims::Uniform(d) => *d,
            SiteDims::PerSite(ds) => ds[site],
        }
    }

    pub fn dims_of(&self, region: &Region) -> Vec<usize> {
        region.iter().map(|s| self.dim(s)).collect()
    }

    pub fn total_dim(&self, region: &Region) -> usize {
        region.iter().map(|s| self.dim(s)).product()
    }
}

impl Default for SiteDims {
    fn default() -> Self {
        SiteDims::qubits()
    }
}

/// Largest singular value.
pub fn spectral_norm(m: &Matrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().max()
}

/// Sum of singular values.
pub fn schatten_one(m: &Matrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().sum()
}

/// Largest absolute entry of `A - A†`.
pub fn hermiticity_defect(m: &Matrix) -> f64 {
    (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Operator on the tensor-product space of a region.
#[derive(Clone, Debug, PartialEq)]
pub struct Op {
    region: Region,
    dims: Vec<usize>,
    matrix: Matrix,
}

impl Op {
    pub fn new(region: Region, dims: Vec<usize>, matrix: Matrix) -> Result<Self> {
        if dims.len() != region.len() {
            return Err(Error::Dimension(format!(
                "{} local dimensions for region {region}",
                dims.len()
            )));
        }
        let d: usize = dims.iter().product();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::Dimension(format!(
                "matrix is {}x{}, region {region} needs {d}x{d}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Op {
            region,
            dims,
            matrix,
        })
    }

    /// Operator on qubit sites.
    pub fn qubits(region: Region, matrix: Matrix) -> Result<Self> {
        let dims = vec![2; region.len()];
        Self::new(region, dims, matrix)
    }

    pub fn with_dims(region: Region, site_dims: &SiteDims, matrix: Matrix) -> Result<Self> {
        let dims = site_dims.dims_of(&region);
        Self::new(region, dims, matrix)
    }

    pub fn identity(region: Region, site_dims: &SiteDims) -> Self {
        let dims = site_dims.dims_of(&region);
        let d = dims.iter().product();
        Op {
            region,
            dims,
            matrix: Matrix::identity(d, d),
        }
    }

    pub fn zeros(region: Region, site_dims: &SiteDims) -> Self {
        let dims = site_dims.dims_of(&region);
        let d = dims.iter().product();
        Op {
            region,
            dims,
            matrix: Matrix::zeros(d, d),
        }
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix {
        self.matrix
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn adjoint(&self) -> Op {
        Op {
            region: self.region.clone(),
            dims: self.dims.clone(),
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        hermiticity_defect(&self.matrix) <= tol
    }

    pub fn scaled(&self, c: C64) -> Op {
        Op {
            region: self.region.clone(),
            dims: self.dims.clone(),
            matrix: &self.matrix * c,
        }
    }

    fn check_same_space(&self, other: &Op) -> Result<()> {
        if self.region != other.region || self.dims != other.dims {
            return Err(Error::Dimension(format!(
                "operators live on {} and {}",
                self.region, other.region
            )));
        }
        Ok(())
    }

    pub fn plus(&self, other: &Op) -> Result<Op> {
        self.check_same_space(other)?;
        Ok(Op {
            region: self.region.clone(),
            dims: self.dims.clone(),
            matrix: &self.matrix + &other.matrix,
        })
    }

    pub fn minus(&self, other: &Op) -> Result<Op> {
        self.check_same_space(other)?;
        Ok(Op {
            region: self.region.clone(),
            dims: self.dims.clone(),
            matrix: &self.matrix - &other.matrix,
        })
    }

    pub fn product(&self, other: &Op) -> Result<Op> {
        self.check_same_space(other)?;
        Ok(Op {
            region: self.region.clone(),
            dims: self.dims.clone(),
            matrix: &self.matrix * &other.matrix,
        })
    }

    /// Factor positions of `sub` inside this operator's region.
    pub fn positions_of(&self, sub: &Region) -> Result<Vec<usize>> {
        sub.iter()
            .map(|s| {
                self.region.position(s).ok_or_else(|| Error::NotSubset {
                    inner: sub.clone(),
                    outer: self.region.clone(),
                })
            })
            .collect()
    }

    /// `self ⊗ 1` on `target ⊇ region`; new sites take their dimension from
    /// `site_dims`.
    pub fn embed(&self, target: &Region, site_dims: &SiteDims) -> Result<Op> {
        if !self.region.is_subset(target) {
            return Err(Error::NotSubset {
                inner: self.region.clone(),
                outer: target.clone(),
            });
        }
        if &self.region == target {
            return Ok(self.clone());
        }
        let dims: Vec<usize> = target
            .iter()
            .map(|s| match self.region.position(s) {
                Some(k) => self.dims[k],
                None => site_dims.dim(s),
            })
            .collect();
        let positions: Vec<usize> = self
            .region
            .iter()
            .map(|s| target.position(s).expect("subset"))
            .collect();
        let map = kernel::SlotMap::new(&dims, &positions);
        let d = map.host_dim();
        let mut matrix = Matrix::zeros(d, d);
        kernel::embed(&map, self.matrix.as_slice(), matrix.as_mut_slice());
        Ok(Op {
            region: target.clone(),
            dims,
            matrix,
        })
    }
}

/// Largest singular value of the operator.
pub fn inf_norm(op: &Op) -> f64 {
    spectral_norm(op.matrix())
}

/// Sum of singular values of the operator.
pub fn trace_norm(op: &Op) -> f64 {
    schatten_one(op.matrix())
}

/// Linear map on the operators of a region, stored as a `D^2 x D^2` matrix
/// on the column-stacked vectorization.
#[derive(Clone, Debug, PartialEq)]
pub struct SuperOp {
    region: Region,
    dims: Vec<usize>,
    matrix: Matrix,
}

impl SuperOp {
    pub fn new(region: Region, dims: Vec<usize>, matrix: Matrix) -> Result<Self> {
        if dims.len() != region.len() {
            return Err(Error::Dimension(format!(
                "{} local dimensions for region {region}",
                dims.len()
            )));
        }
        let d: usize = dims.iter().product();
        if matrix.nrows() != d * d || matrix.ncols() != d * d {
            return Err(Error::Dimension(format!(
                "superoperator matrix is {}x{}, expected {}x{}",
                matrix.nrows(),
                matrix.ncols(),
                d * d,
                d * d
            )));
        }
        Ok(SuperOp {
            region,
            dims,
            matrix,
        })
    }

    /// Single-qubit superoperator on site 0, mostly for tests.
    pub fn qubit(matrix: Matrix) -> Result<Self> {
        Self::new(Region::single(0), vec![2], matrix)
    }

    /// Materialize a map by applying it to every matrix unit.
    pub fn from_map(region: Region, dims: Vec<usize>, f: impl Fn(&Matrix) -> Matrix) -> Self {
        let d: usize = dims.iter().product();
        let mut matrix = Matrix::zeros(d * d, d * d);
        let mut unit = Matrix::zeros(d, d);
        for j in 0..d {
            for i in 0..d {
                unit[(i, j)] = ONE;
                let image = f(&unit);
                matrix
                    .column_mut(i + d * j)
                    .copy_from_slice(image.as_slice());
                unit[(i, j)] = ZERO;
            }
        }
        SuperOp {
            region,
            dims,
            matrix,
        }
    }

    pub fn identity(region: Region, dims: Vec<usize>) -> Self {
        let d: usize = dims.iter().product();
        SuperOp {
            region,
            dims,
            matrix: Matrix::identity(d * d, d * d),
        }
    }

    /// `X ↦ A X B`.
    pub fn sandwich(region: Region, dims: Vec<usize>, a: &Matrix, b: &Matrix) -> Result<Self> {
        let m = b.transpose().kronecker(a);
        Self::new(region, dims, m)
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Hilbert-space dimension `D` of the region.
    pub fn dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn apply_matrix(&self, x: &Matrix) -> Matrix {
        let d = self.dim();
        let v = DVector::from_column_slice(x.as_slice());
        let w = &self.matrix * v;
        Matrix::from_column_slice(d, d, w.as_slice())
    }

    pub fn apply(&self, op: &Op) -> Result<Op> {
        if op.region() != &self.region || op.dims() != self.dims.as_slice() {
            return Err(Error::Dimension(format!(
                "superoperator on {} applied to operator on {}",
                self.region,
                op.region()
            )));
        }
        Op::new(
            self.region.clone(),
            self.dims.clone(),
            self.apply_matrix(op.matrix()),
        )
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &SuperOp) -> Result<SuperOp> {
        if self.region != other.region || self.dims != other.dims {
            return Err(Error::Dimension("composing superoperators on different regions".into()));
        }
        Ok(SuperOp {
            region: self.region.clone(),
            dims: self.dims.clone(),
            matrix: &self.matrix * &other.matrix,
        })
    }

    pub fn scaled(&self, c: C64) -> SuperOp {
        SuperOp {
            region: self.region.clone(),
            dims: self.dims.clone(),
            matrix: &self.matrix * c,
        }
    }

    pub fn plus(&self, other: &SuperOp) -> Result<SuperOp> {
        if self.region != other.region || self.dims != other.dims {
            return Err(Error::Dimension("adding superoperators on different regions".into()));
        }
        Ok(SuperOp {
            region: self.region.clone(),
            dims: self.dims.clone(),
            matrix: &self.matrix + &other.matrix,
        })
    }

    /// Exponential `e^{c S}`.
    pub fn exp_scaled(&self, c: C64) -> SuperOp {
        SuperOp {
            region: self.region.clone(),
            dims: self.dims.clone(),
            matrix: (&self.matrix * c).exp(),
        }
    }
}

/// Hilbert-Schmidt adjoint: `<A, T B> = <T† A, B>`.
pub fn adjoint(t: &SuperOp) -> SuperOp {
    SuperOp {
        region: t.region.clone(),
        dims: t.dims.clone(),
        matrix: t.matrix.adjoint(),
    }
}

/// Hilbert-Schmidt inner product `Tr(A† B)`.
pub fn hs_inner(a: &Matrix, b: &Matrix) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Heisenberg-picture Lindblad generator on a local space:
/// `O ↦ i[H, O] + Σ (L† O L − ½{L†L, O})`.
pub fn lindblad_generator(hamiltonian: &Matrix, lindblads: &[Matrix]) -> Matrix {
    let d = hamiltonian.nrows();
    let id = Matrix::identity(d, d);
    // vec(H O) = (1 ⊗ H) vec O ; vec(O H) = (H^T ⊗ 1) vec O
    let mut s = (id.kronecker(hamiltonian) - hamiltonian.transpose().kronecker(&id)) * I;
    for l in lindblads {
        let ld = l.adjoint();
        let ldl = &ld * l;
        s += l.transpose().kronecker(&ld);
        s -= (id.kronecker(&ldl) + ldl.transpose().kronecker(&id)) * C64::new(0.5, 0.0);
    }
    s
}

/// Orthogonal Hermitian basis of `d x d` matrices: the identity followed by
/// the generalized Gell-Mann matrices (Paulis for `d = 2`).
pub fn hermitian_basis(d: usize) -> Vec<Matrix> {
    let mut out = vec![Matrix::identity(d, d)];
    for j in 0..d {
        for k in j + 1..d {
            let mut sym = Matrix::zeros(d, d);
            sym[(j, k)] = ONE;
            sym[(k, j)] = ONE;
            out.push(sym);
            let mut anti = Matrix::zeros(d, d);
            anti[(j, k)] = -I;
            anti[(k, j)] = I;
            out.push(anti);
        }
    }
    for l in 1..d {
        let norm = (2.0 / (l * (l + 1)) as f64).sqrt();
        let mut diag = Matrix::zeros(d, d);
        for m in 0..l {
            diag[(m, m)] = C64::new(norm, 0.0);
        }
        diag[(l, l)] = C64::new(-(l as f64) * norm, 0.0);
        out.push(diag);
    }
    out
}
