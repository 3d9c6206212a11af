//! Brute-force isotypic dimensions of additive-type Hopf algebras
//! A = k[x_1, …, x_n] / (x_i^p − Σ_j a_ij x_j).
//!
//! Two independent routes: counting monomials by weight, and ranks of the
//! character projectors built from the action of F^× on A.

use crate::characters::{CharSum, Character, CharacterGroup};
use crate::dieudonne::GradedDieudonneModule;
use crate::error::{Error, Result};
use crate::galois::{FfElem, FiniteField, GaloisRing, GrElem, Matrix, Ring, SparseMatrix};

/// Default bound on p^n for the projector route.
pub const PROJECTOR_BOUND: u128 = 4096;

#[derive(Debug, Clone, PartialEq)]
pub struct AdditiveHopfAlgebra {
    field: FiniteField,
    group: CharacterGroup,
    /// Generator x_i carries the character χ_1^{p^{char_index[i]}}.
    char_index: Vec<usize>,
    /// Relation i is x_i^p = Σ_j a[i][j] x_j.
    a: Matrix<FfElem>,
}

impl AdditiveHopfAlgebra {
    pub fn new(field: FiniteField, r: u32, char_index: Vec<usize>, a: Matrix<FfElem>) -> Result<Self> {
        if r == 0 || !field.degree().is_multiple_of(r) {
            return Err(Error::FieldNotContained { r, s: field.degree() });
        }
        let group = CharacterGroup::new(field.p(), r)?;
        let n = char_index.len();
        if a.rows() != n || a.cols() != n {
            return Err(Error::DimensionMismatch(format!("relation matrix must be {n}x{n}")));
        }
        if let Some(&c) = char_index.iter().find(|&&c| c >= r as usize) {
            return Err(Error::Invalid(format!("character index {c} out of range for r = {r}")));
        }
        for i in 0..n {
            for j in 0..n {
                if !field.is_zero(a.get(i, j)) && char_index[j] != (char_index[i] + 1) % r as usize {
                    return Err(Error::BlockPattern {
                        map: "relations",
                        src: group.teichmuller().twist(char_index[i] as i64).exponent(),
                        dst: group.teichmuller().twist(char_index[j] as i64).exponent(),
                    });
                }
            }
        }
        Ok(AdditiveHopfAlgebra { field, group, char_index, a })
    }

    /// The presentation of the group scheme of a module with V = 0:
    /// a_ij is the coefficient of e_j in F(e_i).
    pub fn from_additive_module(m: &GradedDieudonneModule) -> Result<Self> {
        if !m.v().matrix.is_zero(m.field()) {
            return Err(Error::NonzeroV);
        }
        let char_index = (0..m.r() as usize).flat_map(|c| std::iter::repeat_n(c, m.dims()[c])).collect();
        Self::new(m.field().clone(), m.r(), char_index, m.f().matrix.transpose())
    }

    /// k[z_0, …, z_{r-1}] / (z_i^p − x_i z_{i+1}), indices mod r.
    pub fn raynaud_shape(field: FiniteField, r: u32, x: &[FfElem]) -> Result<Self> {
        let n = r as usize;
        if x.len() != n {
            return Err(Error::DimensionMismatch(format!("expected {n} parameters")));
        }
        let mut a = Matrix::zeros(&field, n, n);
        for i in 0..n {
            a.set(i, (i + 1) % n, x[i]);
        }
        Self::new(field, r, (0..n).collect(), a)
    }

    pub fn field(&self) -> &FiniteField {
        &self.field
    }

    pub fn group(&self) -> CharacterGroup {
        self.group
    }

    pub fn generators(&self) -> usize {
        self.char_index.len()
    }

    pub fn char_index(&self) -> &[usize] {
        &self.char_index
    }

    pub fn relations(&self) -> &Matrix<FfElem> {
        &self.a
    }

    /// dim_k A = p^n.
    pub fn dimension(&self) -> u128 {
        (self.field.p() as u128).saturating_pow(self.generators() as u32)
    }

    fn generator_character(&self, i: usize) -> Character {
        self.group.teichmuller().twist(self.char_index[i] as i64)
    }

    /// Exponent vectors of the monomial basis {x^e : 0 ≤ e_i < p}, first
    /// variable fastest.
    fn monomials(&self) -> impl Iterator<Item = Vec<u64>> + '_ {
        let p = self.field.p();
        let n = self.generators();
        let total = self.dimension();
        (0..total).map(move |mut idx| {
            (0..n)
                .map(|_| {
                    let d = (idx % p as u128) as u64;
                    idx /= p as u128;
                    d
                })
                .collect()
        })
    }

    /// Number of basis monomials of each weight Π χ_{c(i)}^{e_i}.
    pub fn isotypic_dims_monomial(&self) -> CharSum {
        let g = self.group;
        let mut out = CharSum::zero(g);
        let weights: Vec<Character> = (0..self.generators()).map(|i| self.generator_character(i)).collect();
        for e in self.monomials() {
            let chi = e.iter().zip(&weights).fold(g.trivial(), |acc, (&ei, w)| {
                acc.mul(&w.pow(ei as i64)).expect("same group")
            });
            out.add_term(chi.exponent(), 1).expect("count fits");
        }
        out
    }

    /// Diagonal of the operator [λ] on the monomial basis: x_i ↦ λ^{p^{c(i)}} x_i.
    fn lambda_action(&self, lambda: FfElem) -> Vec<FfElem> {
        let k = &self.field;
        let values: Vec<FfElem> =
            self.char_index.iter().map(|&c| k.frobenius(&lambda, c as i64)).collect();
        self.monomials()
            .map(|e| {
                e.iter().zip(&values).fold(k.one(), |acc, (&ei, v)| k.mul(&acc, &k.pow(*v, ei)))
            })
            .collect()
    }

    fn check_gate(&self, bound: u128) -> Result<()> {
        let size = self.dimension();
        if size > bound {
            return Err(Error::SizeBound { what: "p^n", size, bound });
        }
        Ok(())
    }

    /// p_χ = −Σ_{λ ∈ F^×} χ(λ)^{-1} [λ], for every χ in exponent order.
    pub fn projectors(&self, bound: u128) -> Result<Vec<SparseMatrix<FfElem>>> {
        self.check_gate(bound)?;
        let k = &self.field;
        let units = k.subfield_units(self.group.r())?;
        let actions: Vec<Vec<FfElem>> = units.iter().map(|&l| self.lambda_action(l)).collect();
        let size = self.dimension() as usize;
        let mut out = Vec::with_capacity(self.group.order() as usize);
        for chi in self.group.characters() {
            let mut diag = vec![k.zero(); size];
            for (lambda, action) in units.iter().zip(&actions) {
                let coeff = k.neg(&k.pow(*lambda, chi.inverse().exponent()));
                for (d, a) in diag.iter_mut().zip(action) {
                    *d = k.add(d, &k.mul(&coeff, a));
                }
            }
            out.push(SparseMatrix::diagonal(k, &diag));
        }
        Ok(out)
    }

    /// Rank of p_χ for each χ.
    pub fn isotypic_dims_projector(&self, bound: u128) -> Result<CharSum> {
        let k = &self.field;
        let mut out = CharSum::zero(self.group);
        for (chi, proj) in self.group.characters().zip(self.projectors(bound)?) {
            out.add_term(chi.exponent(), proj.rank(k) as i64)?;
        }
        Ok(out)
    }
}

/// The multiplicative shape R[z_0, …, z_{r-1}] / (z_i^p − x_i z_{i+1}),
/// indices mod r, with z_i of character χ_1^{p^i}.
#[derive(Debug, Clone, PartialEq)]
pub struct RaynaudAlgebraShape {
    ring: GaloisRing,
    r: u32,
    x: Option<Vec<GrElem>>,
}

impl RaynaudAlgebraShape {
    pub fn new(ring: GaloisRing, r: u32, x: Option<Vec<GrElem>>) -> Result<Self> {
        if r == 0 {
            return Err(Error::InvalidDegree(r));
        }
        if x.as_ref().is_some_and(|x| x.len() != r as usize) {
            return Err(Error::DimensionMismatch(format!("expected {r} parameters")));
        }
        Ok(RaynaudAlgebraShape { ring, r, x })
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn parameters(&self) -> Option<&[GrElem]> {
        self.x.as_deref()
    }

    /// Relation i as (i, x_i, i + 1 mod r): z_i^p = x_i z_{i+1}.
    pub fn relations(&self) -> Vec<(usize, Option<GrElem>, usize)> {
        let r = self.r as usize;
        (0..r).map(|i| (i, self.x.as_ref().map(|x| x[i].clone()), (i + 1) % r)).collect()
    }

    pub fn monomial_dims(&self) -> Result<CharSum> {
        raynaud_monomial_dims(self.r, self.ring.p())
    }

    /// The same presentation over a residue field containing F, with
    /// missing parameters set to 1.
    pub fn to_additive(&self) -> Result<AdditiveHopfAlgebra> {
        if !self.ring.is_field() {
            return Err(Error::RingMismatch("the base ring must be a field".into()));
        }
        let k = self.ring.residue_field().clone();
        let x: Vec<FfElem> = match &self.x {
            Some(x) => x.iter().map(|e| self.ring.residue(e)).collect(),
            None => vec![k.one(); self.r as usize],
        };
        AdditiveHopfAlgebra::raynaud_shape(k, self.r, &x)
    }
}

/// Counts z^a, a ∈ [0, p−1]^r, by the exponent Σ a_i p^i mod (q − 1).
pub fn raynaud_monomial_dims(r: u32, p: u64) -> Result<CharSum> {
    let g = CharacterGroup::new(p, r)?;
    let n = g.order();
    let mut out = CharSum::zero(g);
    for idx in 0..g.q() {
        let mut rest = idx;
        let mut e = 0u64;
        let mut pi = 1 % n;
        for _ in 0..r {
            e = (e + (rest % p) * pi) % n;
            rest /= p;
            pi = pi * p % n;
        }
        out.add_term(e, 1)?;
    }
    Ok(out)
}

/// The three character computations for a module with V = 0:
/// (exp_F(cha), monomial counts, projector ranks).
pub fn three_way(m: &GradedDieudonneModule, bound: u128) -> Result<(CharSum, CharSum, CharSum)> {
    let formula = m.big_char()?;
    let a = AdditiveHopfAlgebra::from_additive_module(m)?;
    Ok((formula, a.isotypic_dims_monomial(), a.isotypic_dims_projector(bound)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cs(g: CharacterGroup, terms: &[(i64, i64)]) -> CharSum {
        CharSum::from_terms(g, terms.iter().copied()).unwrap()
    }

    fn random_additive(k: &FiniteField, r: u32, max_n: usize, rng: &mut ChaCha8Rng) -> GradedDieudonneModule {
        let dims: Vec<usize> = loop {
            let d: Vec<usize> = (0..r).map(|_| rng.gen_range(0..=max_n)).collect();
            if d.iter().sum::<usize>() <= max_n {
                break d;
            }
        };
        let ru = r as usize;
        let blocks: Vec<_> = (0..ru)
            .map(|c| Matrix::from_fn(dims[(c + 1) % ru], dims[c], |_, _| k.random(rng)))
            .collect();
        GradedDieudonneModule::additive(k.clone(), r, dims, &blocks).unwrap()
    }

    #[test]
    fn presentation_examples() {
        let f3 = FiniteField::new(3, 1).unwrap();
        let alpha = GradedDieudonneModule::alpha(f3.clone(), 1, 0).unwrap();
        let a = AdditiveHopfAlgebra::from_additive_module(&alpha).unwrap();
        assert!(a.relations().is_zero(&f3));
        assert_eq!(a.dimension(), 3);

        let f4 = FiniteField::new(2, 2).unwrap();
        let one = Matrix::from_fn(1, 1, |_, _| f4.one());
        let m = GradedDieudonneModule::additive(f4.clone(), 2, vec![1, 1], &[one.clone(), one]).unwrap();
        let a = AdditiveHopfAlgebra::from_additive_module(&m).unwrap();
        assert_eq!(a.relations(), &Matrix::from_rows(vec![vec![f4.zero(), f4.one()], vec![f4.one(), f4.zero()]], 2));
        assert_eq!(a.dimension(), 4);

        let etale = GradedDieudonneModule::new(
            f3.clone(),
            1,
            vec![1],
            Matrix::zeros(&f3, 1, 1),
            Matrix::from_fn(1, 1, |_, _| f3.one()),
        )
        .unwrap();
        assert!(matches!(AdditiveHopfAlgebra::from_additive_module(&etale), Err(Error::NonzeroV)));
    }

    #[test]
    fn isotypic_examples() {
        let f3 = FiniteField::new(3, 1).unwrap();
        let g3 = CharacterGroup::new(3, 1).unwrap();
        let a = AdditiveHopfAlgebra::new(f3.clone(), 1, vec![0], Matrix::zeros(&f3, 1, 1)).unwrap();
        assert_eq!(a.isotypic_dims_monomial(), cs(g3, &[(0, 2), (1, 1)]));
        assert_eq!(a.isotypic_dims_projector(PROJECTOR_BOUND).unwrap(), cs(g3, &[(0, 2), (1, 1)]));
        let empty = AdditiveHopfAlgebra::new(f3.clone(), 1, vec![], Matrix::zeros(&f3, 0, 0)).unwrap();
        assert_eq!(empty.isotypic_dims_monomial(), CharSum::one(g3));
        assert_eq!(empty.isotypic_dims_projector(PROJECTOR_BOUND).unwrap(), CharSum::one(g3));
        let f16 = FiniteField::new(2, 4).unwrap();
        let g16 = CharacterGroup::new(2, 4).unwrap();
        let x: Vec<_> = (0..4).map(|i| f16.from_int(i % 2)).collect();
        let shape = AdditiveHopfAlgebra::raynaud_shape(f16, 4, &x).unwrap();
        let expected = CharSum::one(g16).add(&CharSum::full_sum(g16)).unwrap();
        assert_eq!(shape.isotypic_dims_monomial(), expected);
        assert_eq!(shape.isotypic_dims_projector(PROJECTOR_BOUND).unwrap(), expected);
    }

    #[test]
    fn raynaud_monomials() {
        assert_eq!(raynaud_monomial_dims(2, 2).unwrap(), cs(CharacterGroup::new(2, 2).unwrap(), &[(0, 2), (1, 1), (2, 1)]));
        assert_eq!(raynaud_monomial_dims(1, 3).unwrap(), cs(CharacterGroup::new(3, 1).unwrap(), &[(0, 2), (1, 1)]));
        assert_eq!(raynaud_monomial_dims(1, 2).unwrap(), cs(CharacterGroup::new(2, 1).unwrap(), &[(0, 2)]));
        for (p, r) in [(2, 3), (3, 2), (5, 2), (3, 3)] {
            assert_eq!(raynaud_monomial_dims(r, p).unwrap().mass().unwrap(), p.pow(r) as i64);
        }
    }

    #[test]
    fn homogeneity_is_enforced() {
        let f4 = FiniteField::new(2, 2).unwrap();
        let a = Matrix::from_fn(1, 1, |_, _| f4.one());
        assert!(matches!(AdditiveHopfAlgebra::new(f4, 2, vec![0], a), Err(Error::BlockPattern { .. })));
    }

    #[test]
    fn gate() {
        let f2 = FiniteField::new(2, 1).unwrap();
        let a = AdditiveHopfAlgebra::new(f2.clone(), 1, vec![0; 13], Matrix::zeros(&f2, 13, 13)).unwrap();
        assert!(matches!(a.isotypic_dims_projector(PROJECTOR_BOUND), Err(Error::SizeBound { .. })));
    }

    #[test]
    fn projectors_are_orthogonal_idempotents() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for (p, r) in [(2, 1), (2, 2), (2, 3), (2, 4), (3, 1), (3, 2), (5, 1), (7, 1), (11, 1), (13, 1)] {
            let k = FiniteField::new(p, r).unwrap();
            let m = random_additive(&k, r, if p > 5 { 2 } else { 3 }, &mut rng);
            let a = AdditiveHopfAlgebra::from_additive_module(&m).unwrap();
            let projs = a.projectors(PROJECTOR_BOUND).unwrap();
            let n = a.dimension() as usize;
            let mut sum = SparseMatrix::zeros(n);
            for (i, pi) in projs.iter().enumerate() {
                assert_eq!(&pi.mul(&k, pi), pi);
                for pj in &projs[i + 1..] {
                    assert!(pi.mul(&k, pj).is_zero());
                }
                sum = sum.add_scaled(&k, pi, &k.one());
            }
            assert_eq!(sum, SparseMatrix::identity(&k, n));
        }
    }

    #[test]
    fn oracle_agreement_and_multiplicativity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (p, r, s) in [(2, 2, 2), (2, 2, 4), (3, 2, 2), (2, 3, 3), (5, 1, 1)] {
            let k = FiniteField::new(p, s).unwrap();
            for _ in 0..5 {
                let m1 = random_additive(&k, r, 2, &mut rng);
                let m2 = random_additive(&k, r, 2, &mut rng);
                let (f, mono, proj) = three_way(&m1, PROJECTOR_BOUND).unwrap();
                assert_eq!(f, mono);
                assert_eq!(f, proj);
                let sum = AdditiveHopfAlgebra::from_additive_module(&m1.direct_sum(&m2).unwrap()).unwrap();
                let d1 = AdditiveHopfAlgebra::from_additive_module(&m1).unwrap().isotypic_dims_monomial();
                let d2 = AdditiveHopfAlgebra::from_additive_module(&m2).unwrap().isotypic_dims_monomial();
                assert_eq!(sum.isotypic_dims_monomial(), d1.mul(&d2).unwrap());
            }
        }
    }
}
