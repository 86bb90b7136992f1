// Copyright 2026 The lrsim Authors
// SPDX-License-Identifier: Apache-2.0

//! Single-qubit operators. Basis `{|0>, |1>}` with `σ^z = diag(1, -1)`;
//! `|0>` is the excited state, so `σ^- = |1><0|` lowers.

use super::{Matrix, C64, I, ONE, ZERO};

fn m2(a: C64, b: C64, c: C64, d: C64) -> Matrix {
    Matrix::from_row_slice(2, 2, &[a, b, c, d])
}

pub fn identity() -> Matrix {
    Matrix::identity(2, 2)
}

pub fn sigma_x() -> Matrix {
    m2(ZERO, ONE, ONE, ZERO)
}

pub fn sigma_y() -> Matrix {
    m2(ZERO, -I, I, ZERO)
}

pub fn sigma_z() -> Matrix {
    m2(ONE, ZERO, ZERO, -ONE)
}

pub fn sigma_minus() -> Matrix {
    m2(ZERO, ZERO, ONE, ZERO)
}

pub fn sigma_plus() -> Matrix {
    m2(ZERO, ONE, ZERO, ZERO)
}

/// Single-qubit operator by symbol: `I X Y Z + -`.
pub fn by_symbol(symbol: char) -> Option<Matrix> {
    match symbol {
        'I' => Some(identity()),
        'X' => Some(sigma_x()),
        'Y' => Some(sigma_y()),
        'Z' => Some(sigma_z()),
        '+' => Some(sigma_plus()),
        '-' => Some(sigma_minus()),
        _ => None,
    }
}

/// Kronecker product of single-qubit symbols, e.g. `"ZZ"` or `"X-"`.
pub fn string(symbols: &str) -> Option<Matrix> {
    let mut out = Matrix::identity(1, 1);
    for c in symbols.chars() {
        out = out.kronecker(&by_symbol(c)?);
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_algebra() {
        assert_eq!(&sigma_x() * &sigma_y(), sigma_z() * I);
        assert_eq!(sigma_plus() + sigma_minus(), sigma_x());
        assert_eq!(&sigma_plus() * &sigma_minus() - &sigma_minus() * &sigma_plus(), sigma_z());
    }

    #[test]
    fn strings() {
        assert_eq!(string("ZZ").unwrap(), sigma_z().kronecker(&sigma_z()));
        assert_eq!(string("").unwrap(), Matrix::identity(1, 1));
        assert!(string("ZQ").is_none());
    }
}
