//! Gaussian elimination over a field.

use super::matrix::Matrix;
use super::ring::Field;

/// Reduced row echelon form and pivot columns.
pub fn rref<K: Field>(k: &K, a: &Matrix<K::Elem>) -> (Matrix<K::Elem>, Vec<usize>) {
    let mut m = a.clone();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..m.cols() {
        if row == m.rows() {
            break;
        }
        let Some(pr) = (row..m.rows()).find(|&i| !k.is_zero(m.get(i, col))) else {
            continue;
        };
        m.swap_rows(row, pr);
        let inv = k.inv(m.get(row, col)).expect("nonzero pivot");
        m.scale_row(k, row, &inv);
        for i in 0..m.rows() {
            if i != row && !k.is_zero(m.get(i, col)) {
                let c = k.neg(m.get(i, col));
                m.add_row_multiple(k, i, row, &c);
            }
        }
        pivots.push(col);
        row += 1;
    }
    (m, pivots)
}

pub fn rank<K: Field>(k: &K, a: &Matrix<K::Elem>) -> usize {
    rref(k, a).1.len()
}

/// Basis of {x : A x = 0}, one vector per free column.
pub fn kernel<K: Field>(k: &K, a: &Matrix<K::Elem>) -> Vec<Vec<K::Elem>> {
    let (r, pivots) = rref(k, a);
    let free: Vec<usize> = (0..a.cols()).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![k.zero(); a.cols()];
            v[fc] = k.one();
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = k.neg(r.get(i, fc));
            }
            v
        })
        .collect()
}

/// Basis of {y : yᵀ A = 0}.
pub fn left_kernel<K: Field>(k: &K, a: &Matrix<K::Elem>) -> Vec<Vec<K::Elem>> {
    kernel(k, &a.transpose())
}

/// The pivot columns of `a`, a basis of its column space.
pub fn column_space<K: Field>(k: &K, a: &Matrix<K::Elem>) -> Vec<Vec<K::Elem>> {
    let (_, pivots) = rref(k, a);
    pivots.iter().map(|&c| a.column(c)).collect()
}

pub fn inverse<K: Field>(k: &K, a: &Matrix<K::Elem>) -> Option<Matrix<K::Elem>> {
    let n = a.rows();
    if n != a.cols() {
        return None;
    }
    let aug = a.hstack(&Matrix::identity(k, n));
    let (r, pivots) = rref(k, &aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    let idx: Vec<usize> = (0..n).collect();
    let cols: Vec<usize> = (n..2 * n).collect();
    Some(r.select(&idx, &cols))
}

/// Some x with A x = b, if one exists.
pub fn solve<K: Field>(k: &K, a: &Matrix<K::Elem>, b: &[K::Elem]) -> Option<Vec<K::Elem>> {
    let bcol = Matrix::from_fn(b.len(), 1, |i, _| b[i].clone());
    let (r, pivots) = rref(k, &a.hstack(&bcol));
    if pivots.last() == Some(&a.cols()) {
        return None;
    }
    let mut x = vec![k.zero(); a.cols()];
    for (i, &pc) in pivots.iter().enumerate() {
        x[pc] = r.get(i, a.cols()).clone();
    }
    Some(x)
}

/// Standard basis vectors completing independent `vectors` (length n each)
/// to a basis of kⁿ, chosen greedily in index order.
pub fn complement<K: Field>(k: &K, n: usize, vectors: &[Vec<K::Elem>]) -> Vec<Vec<K::Elem>> {
    let mut basis: Vec<Vec<K::Elem>> = vectors.to_vec();
    let mut out = Vec::new();
    let mut current = rank(k, &Matrix::from_columns(k, n, &basis));
    for i in 0..n {
        if current == n {
            break;
        }
        let mut e = vec![k.zero(); n];
        e[i] = k.one();
        basis.push(e.clone());
        let r = rank(k, &Matrix::from_columns(k, n, &basis));
        if r > current {
            current = r;
            out.push(e);
        } else {
            basis.pop();
        }
    }
    out
}
