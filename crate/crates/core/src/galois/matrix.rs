//! Dense matrices over a [`Ring`] context.

use super::ring::Ring;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix<E> {
    rows: usize,
    cols: usize,
    data: Vec<E>,
}

impl<E: Clone> Matrix<E> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> E) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<E>>, cols: usize) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend(r);
        }
        Matrix { rows: n, cols, data }
    }

    pub fn zeros<R: Ring<Elem = E>>(ring: &R, rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![ring.zero(); rows * cols] }
    }

    pub fn identity<R: Ring<Elem = E>>(ring: &R, n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { ring.one() } else { ring.zero() })
    }

    pub fn scalar<R: Ring<Elem = E>>(ring: &R, n: usize, c: &E) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { c.clone() } else { ring.zero() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &E {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: E) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[E] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<E> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = &E> {
        self.data.iter()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn map(&self, mut f: impl FnMut(&E) -> E) -> Self {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(&mut f).collect() }
    }

    /// Rows and columns picked by index lists.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]).clone())
    }

    /// Writes `block` at the given row and column indices.
    pub fn place(&mut self, rows: &[usize], cols: &[usize], block: &Matrix<E>) {
        for (bi, &i) in rows.iter().enumerate() {
            for (bj, &j) in cols.iter().enumerate() {
                self.set(i, j, block.get(bi, bj).clone());
            }
        }
    }

    pub fn from_columns<R: Ring<Elem = E>>(ring: &R, rows: usize, columns: &[Vec<E>]) -> Self {
        if columns.is_empty() {
            return Self::zeros(ring, rows, 0);
        }
        Self::from_fn(rows, columns.len(), |i, j| columns[j][i].clone())
    }

    pub fn hstack(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows);
        Self::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                other.get(i, j - self.cols).clone()
            }
        })
    }

    pub fn is_zero<R: Ring<Elem = E>>(&self, ring: &R) -> bool {
        self.data.iter().all(|x| ring.is_zero(x))
    }

    pub fn mul<R: Ring<Elem = E>>(&self, ring: &R, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "shape mismatch in product");
        let mut out = Self::zeros(ring, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if ring.is_zero(a) {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if ring.is_zero(b) {
                        continue;
                    }
                    let idx = i * out.cols + j;
                    out.data[idx] = ring.add(&out.data[idx], &ring.mul(a, b));
                }
            }
        }
        out
    }

    pub fn mul_vec<R: Ring<Elem = E>>(&self, ring: &R, v: &[E]) -> Vec<E> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(ring.zero(), |acc, (a, b)| ring.add(&acc, &ring.mul(a, b)))
            })
            .collect()
    }

    pub fn add<R: Ring<Elem = E>>(&self, ring: &R, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| ring.add(a, b)).collect(),
        }
    }

    pub fn sub<R: Ring<Elem = E>>(&self, ring: &R, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| ring.sub(a, b)).collect(),
        }
    }

    pub fn scale<R: Ring<Elem = E>>(&self, ring: &R, c: &E) -> Self {
        self.map(|x| ring.mul(c, x))
    }

    /// Entrywise Frobenius σ^t.
    pub fn frobenius<R: Ring<Elem = E>>(&self, ring: &R, t: i64) -> Self {
        self.map(|x| ring.frobenius(x, t))
    }

    pub fn pow<R: Ring<Elem = E>>(&self, ring: &R, e: u32) -> Self {
        assert_eq!(self.rows, self.cols);
        let mut acc = Self::identity(ring, self.rows);
        for _ in 0..e {
            acc = acc.mul(ring, self);
        }
        acc
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += c * row[src]
    pub fn add_row_multiple<R: Ring<Elem = E>>(&mut self, ring: &R, dst: usize, src: usize, c: &E) {
        for j in 0..self.cols {
            let v = ring.mul(c, self.get(src, j));
            let idx = dst * self.cols + j;
            self.data[idx] = ring.add(&self.data[idx], &v);
        }
    }

    /// col[dst] += c * col[src]
    pub fn add_col_multiple<R: Ring<Elem = E>>(&mut self, ring: &R, dst: usize, src: usize, c: &E) {
        for i in 0..self.rows {
            let v = ring.mul(self.get(i, src), c);
            let idx = i * self.cols + dst;
            self.data[idx] = ring.add(&self.data[idx], &v);
        }
    }

    pub fn scale_row<R: Ring<Elem = E>>(&mut self, ring: &R, i: usize, c: &E) {
        for j in 0..self.cols {
            let idx = i * self.cols + j;
            self.data[idx] = ring.mul(c, &self.data[idx]);
        }
    }

    pub fn scale_col<R: Ring<Elem = E>>(&mut self, ring: &R, j: usize, c: &E) {
        for i in 0..self.rows {
            let idx = i * self.cols + j;
            self.data[idx] = ring.mul(&self.data[idx], c);
        }
    }
}

/// A σ^t-semilinear map in coordinates: v ↦ matrix · σ^t(v).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemilinearMap<E> {
    pub matrix: Matrix<E>,
    pub twist: i64,
}

impl<E: Clone> SemilinearMap<E> {
    pub fn new(matrix: Matrix<E>, twist: i64) -> Self {
        SemilinearMap { matrix, twist }
    }

    pub fn apply<R: Ring<Elem = E>>(&self, ring: &R, v: &[E]) -> Vec<E> {
        let tw: Vec<E> = v.iter().map(|x| ring.frobenius(x, self.twist)).collect();
        self.matrix.mul_vec(ring, &tw)
    }

    /// `self ∘ other`: (C₁, t₁)∘(C₂, t₂) = (C₁·σ^{t₁}(C₂), t₁ + t₂).
    pub fn compose<R: Ring<Elem = E>>(&self, ring: &R, other: &Self) -> Self {
        SemilinearMap {
            matrix: self.matrix.mul(ring, &other.matrix.frobenius(ring, self.twist)),
            twist: self.twist + other.twist,
        }
    }

    /// `self` composed with itself `e` times (`e` ≥ 1).
    pub fn power<R: Ring<Elem = E>>(&self, ring: &R, e: usize) -> Self {
        assert!(e >= 1);
        let mut acc = self.clone();
        for _ in 1..e {
            acc = self.compose(ring, &acc);
        }
        acc
    }

    /// Matrix of the same map after the coordinate change v' = U v.
    pub fn conjugate<R: Ring<Elem = E>>(&self, ring: &R, u: &Matrix<E>, u_inv: &Matrix<E>) -> Self {
        let twisted_inv = u_inv.frobenius(ring, self.twist);
        SemilinearMap { matrix: u.mul(ring, &self.matrix).mul(ring, &twisted_inv), twist: self.twist }
    }
}
