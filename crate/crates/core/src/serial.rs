//! JSON representations of ring elements and matrices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::galois::{FfElem, FiniteField, GaloisRing, GrElem, Matrix, Ring};

/// A ring element in JSON: a coefficient list (lowest degree first) or a
/// bare integer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ElemRepr {
    Int(i64),
    Coeffs(Vec<i64>),
}

fn reduce_coeffs(c: &[i64], modulus: u64) -> Vec<u64> {
    c.iter().map(|x| x.rem_euclid(modulus as i64) as u64).collect()
}

pub fn ff_from_repr(k: &FiniteField, e: &ElemRepr) -> Result<FfElem> {
    match e {
        ElemRepr::Int(n) => Ok(k.from_int(*n)),
        ElemRepr::Coeffs(c) => {
            if c.len() > k.degree() as usize {
                return Err(Error::Invalid(format!("element {c:?} has more than {} coefficients", k.degree())));
            }
            Ok(k.from_coeffs(&reduce_coeffs(c, k.p())))
        }
    }
}

pub fn ff_to_repr(k: &FiniteField, a: FfElem) -> ElemRepr {
    ElemRepr::Coeffs(k.coeffs(a).into_iter().map(|c| c as i64).collect())
}

pub fn gr_from_repr(ring: &GaloisRing, e: &ElemRepr) -> Result<GrElem> {
    match e {
        ElemRepr::Int(n) => Ok(ring.from_int(*n)),
        ElemRepr::Coeffs(c) => {
            if c.len() > ring.degree() as usize {
                return Err(Error::Invalid(format!("element {c:?} has more than {} coefficients", ring.degree())));
            }
            Ok(ring.from_coeffs(&reduce_coeffs(c, ring.characteristic())))
        }
    }
}

pub fn gr_to_repr(a: &GrElem) -> ElemRepr {
    ElemRepr::Coeffs(a.coeffs().iter().map(|&c| c as i64).collect())
}

pub type MatrixRepr = Vec<Vec<ElemRepr>>;

pub fn matrix_to_repr<E: Clone>(m: &Matrix<E>, f: impl Fn(&E) -> ElemRepr) -> MatrixRepr {
    (0..m.rows()).map(|i| m.row(i).iter().map(&f).collect()).collect()
}

/// Parses a `rows × cols` matrix; an empty list stands for a matrix with no rows.
pub fn matrix_from_repr<R: Ring>(
    ring: &R,
    repr: &MatrixRepr,
    rows: usize,
    cols: usize,
    f: impl Fn(&ElemRepr) -> Result<R::Elem>,
) -> Result<Matrix<R::Elem>> {
    if repr.len() != rows || repr.iter().any(|r| r.len() != cols) {
        if rows == 0 || cols == 0 {
            return Ok(Matrix::zeros(ring, rows, cols));
        }
        return Err(Error::DimensionMismatch(format!("expected a {rows}x{cols} block")));
    }
    let mut out = Matrix::zeros(ring, rows, cols);
    for (i, row) in repr.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            out.set(i, j, f(e)?);
        }
    }
    Ok(out)
}

/// Block key "src->dst".
pub fn block_key(src: u64, dst: u64) -> String {
    format!("{src}->{dst}")
}

pub fn parse_block_key(key: &str) -> Result<(u64, u64)> {
    let bad = || Error::Invalid(format!("bad block key {key:?}"));
    let (a, b) = key.split_once("->").ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}
