//! Row-sparse square matrices over a field, for operators on large
//! monomial bases.

use super::ring::Field;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseMatrix<E> {
    n: usize,
    /// Row i as (column, value) pairs sorted by column, zeros omitted.
    rows: Vec<Vec<(usize, E)>>,
}

impl<E: Clone> SparseMatrix<E> {
    pub fn zeros(n: usize) -> Self {
        SparseMatrix { n, rows: vec![Vec::new(); n] }
    }

    pub fn diagonal<K: Field<Elem = E>>(k: &K, diag: &[E]) -> Self {
        let rows = diag.iter().enumerate().map(|(i, d)| if k.is_zero(d) { vec![] } else { vec![(i, d.clone())] }).collect();
        SparseMatrix { n: diag.len(), rows }
    }

    pub fn identity<K: Field<Elem = E>>(k: &K, n: usize) -> Self {
        Self::diagonal(k, &vec![k.one(); n])
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[(usize, E)] {
        &self.rows[i]
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    fn combine<K: Field<Elem = E>>(k: &K, a: &[(usize, E)], b: &[(usize, E)], c: &E) -> Vec<(usize, E)> {
        // a + c·b
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            let take_a = j == b.len() || (i < a.len() && a[i].0 < b[j].0);
            let take_b = i == a.len() || (j < b.len() && b[j].0 < a[i].0);
            let (col, val) = if take_a {
                i += 1;
                (a[i - 1].0, a[i - 1].1.clone())
            } else if take_b {
                j += 1;
                (b[j - 1].0, k.mul(c, &b[j - 1].1))
            } else {
                i += 1;
                j += 1;
                (a[i - 1].0, k.add(&a[i - 1].1, &k.mul(c, &b[j - 1].1)))
            };
            if !k.is_zero(&val) {
                out.push((col, val));
            }
        }
        out
    }

    /// self + c·other
    pub fn add_scaled<K: Field<Elem = E>>(&self, k: &K, other: &Self, c: &E) -> Self {
        assert_eq!(self.n, other.n);
        let rows = self.rows.iter().zip(&other.rows).map(|(a, b)| Self::combine(k, a, b, c)).collect();
        SparseMatrix { n: self.n, rows }
    }

    pub fn mul<K: Field<Elem = E>>(&self, k: &K, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let rows = self
            .rows
            .iter()
            .map(|row| {
                row.iter().fold(Vec::new(), |acc, (mid, a)| Self::combine(k, &acc, &other.rows[*mid], a))
            })
            .collect();
        SparseMatrix { n: self.n, rows }
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(Vec::is_empty)
    }

    /// Rank by sparse Gaussian elimination on rows.
    pub fn rank<K: Field<Elem = E>>(&self, k: &K) -> usize {
        // pivot column -> reduced row with that leading column, leading entry 1
        let mut pivots: std::collections::BTreeMap<usize, Vec<(usize, E)>> = Default::default();
        for row in &self.rows {
            let mut cur = row.clone();
            while let Some((lead, val)) = cur.first().cloned() {
                match pivots.get(&lead) {
                    Some(p) => cur = Self::combine(k, &cur, p, &k.neg(&val)),
                    None => {
                        let inv = k.inv(&val).expect("nonzero leading entry");
                        let normalized = cur.iter().map(|(c, v)| (*c, k.mul(&inv, v))).collect();
                        pivots.insert(lead, normalized);
                        break;
                    }
                }
            }
        }
        pivots.len()
    }
}
