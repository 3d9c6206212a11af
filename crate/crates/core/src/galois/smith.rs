//! Diagonal reduction of matrices over a Galois ring.

use super::galois_ring::{GaloisRing, GrElem};
use super::matrix::Matrix;
use super::ring::Ring;

/// `left · A · right = diag(p^{exponents[i]})`, exponents ascending, with
/// `m` standing for a zero diagonal entry.
#[derive(Debug, Clone)]
pub struct DiagonalForm {
    pub exponents: Vec<u32>,
    pub left: Matrix<GrElem>,
    pub right: Matrix<GrElem>,
}

impl DiagonalForm {
    /// Number of zero rows beyond the square part, i.e. the rank of the
    /// free summand of the cokernel.
    pub fn free_rank(&self, rows: usize) -> usize {
        rows - self.exponents.len()
    }
}

/// Smith-style reduction. The pivot at each step is an entry of minimal
/// valuation, ties broken by smallest (row, column).
pub fn diagonal_reduce(ring: &GaloisRing, a: &Matrix<GrElem>) -> DiagonalForm {
    let (rows, cols) = (a.rows(), a.cols());
    let m = ring.length();
    let mut w = a.clone();
    let mut left = Matrix::identity(ring, rows);
    let mut right = Matrix::identity(ring, cols);
    let n = rows.min(cols);
    let mut exponents = Vec::with_capacity(n);
    for t in 0..n {
        let mut best: Option<(u32, usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                let v = ring.valuation(w.get(i, j));
                if v < m && best.is_none_or(|(bv, _, _)| v < bv) {
                    best = Some((v, i, j));
                }
            }
        }
        let Some((v, pi, pj)) = best else {
            exponents.resize(n, m);
            break;
        };
        w.swap_rows(t, pi);
        left.swap_rows(t, pi);
        w.swap_cols(t, pj);
        right.swap_cols(t, pj);
        let unit = ring.div_p_power(w.get(t, t), v);
        let u_inv = ring.unit_inverse(&unit).expect("pivot cofactor is a unit");
        w.scale_row(ring, t, &u_inv);
        left.scale_row(ring, t, &u_inv);
        for i in 0..rows {
            if i == t || ring.is_zero(w.get(i, t)) {
                continue;
            }
            let c = ring.neg(&ring.div_p_power(w.get(i, t), v));
            w.add_row_multiple(ring, i, t, &c);
            left.add_row_multiple(ring, i, t, &c);
        }
        for j in 0..cols {
            if j == t || ring.is_zero(w.get(t, j)) {
                continue;
            }
            let c = ring.neg(&ring.div_p_power(w.get(t, j), v));
            w.add_col_multiple(ring, j, t, &c);
            right.add_col_multiple(ring, j, t, &c);
        }
        exponents.push(v);
    }
    DiagonalForm { exponents, left, right }
}

/// Inverse over the local ring, when the matrix is invertible.
pub fn invert(ring: &GaloisRing, a: &Matrix<GrElem>) -> Option<Matrix<GrElem>> {
    if a.rows() != a.cols() {
        return None;
    }
    let d = diagonal_reduce(ring, a);
    if d.exponents.iter().any(|&e| e != 0) {
        return None;
    }
    Some(d.right.mul(ring, &d.left))
}
