//! Graded p-torsion Dieudonné modules over a finite field k ⊇ F.
//!
//! A module is stored in one basis ordered by component: component c holds
//! the χ_1^{p^c}-isotypic part, c = 0, …, r − 1. F (twist +1) maps component
//! c to c + 1 and V (twist −1) maps c + 1 back to c, indices mod r.

use std::collections::BTreeMap;
use std::ops::Range;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::characters::{CharSum, Character, CharacterGroup};
use crate::error::{Error, Result};
use crate::galois::{linalg, FfElem, FiniteField, Matrix, Ring, SemilinearMap};
use crate::serial::{self, MatrixRepr};

#[derive(Debug, Clone, PartialEq)]
pub struct GradedDieudonneModule {
    field: FiniteField,
    group: CharacterGroup,
    dims: Vec<usize>,
    f: SemilinearMap<FfElem>,
    v: SemilinearMap<FfElem>,
}

pub(crate) fn offsets(dims: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(dims.len() + 1);
    let mut acc = 0;
    out.push(0);
    for d in dims {
        acc += d;
        out.push(acc);
    }
    out
}

impl GradedDieudonneModule {
    /// Builds and validates a module from full matrices of F and V.
    pub fn new(field: FiniteField, r: u32, dims: Vec<usize>, f: Matrix<FfElem>, v: Matrix<FfElem>) -> Result<Self> {
        let group = character_group(&field, r)?;
        let m = GradedDieudonneModule { field, group, dims, f: SemilinearMap::new(f, 1), v: SemilinearMap::new(v, -1) };
        m.validate()?;
        Ok(m)
    }

    /// Builds a module from its blocks: `f_blocks[c]` maps component c to
    /// c + 1 and `v_blocks[c]` maps component c + 1 to c.
    pub fn from_blocks(
        field: FiniteField,
        r: u32,
        dims: Vec<usize>,
        f_blocks: &[Matrix<FfElem>],
        v_blocks: &[Matrix<FfElem>],
    ) -> Result<Self> {
        let r_us = r as usize;
        if dims.len() != r_us || f_blocks.len() != r_us || v_blocks.len() != r_us {
            return Err(Error::DimensionMismatch(format!("expected {r} components")));
        }
        let off = offsets(&dims);
        let n = off[r_us];
        let mut f = Matrix::zeros(&field, n, n);
        let mut v = Matrix::zeros(&field, n, n);
        for c in 0..r_us {
            let d = (c + 1) % r_us;
            let src: Vec<usize> = (off[c]..off[c + 1]).collect();
            let dst: Vec<usize> = (off[d]..off[d + 1]).collect();
            if (f_blocks[c].rows(), f_blocks[c].cols()) != (dst.len(), src.len())
                || (v_blocks[c].rows(), v_blocks[c].cols()) != (src.len(), dst.len())
            {
                return Err(Error::DimensionMismatch(format!("block shapes at component {c}")));
            }
            f.place(&dst, &src, &f_blocks[c]);
            v.place(&src, &dst, &v_blocks[c]);
        }
        Self::new(field, r, dims, f, v)
    }

    pub fn zero(field: FiniteField, r: u32) -> Result<Self> {
        let n = r as usize;
        let e = Matrix::zeros(&field, 0, 0);
        Self::from_blocks(field, r, vec![0; n], &vec![e.clone(); n], &vec![e; n])
    }

    /// The one-dimensional module with F = V = 0 in component `c`.
    pub fn alpha(field: FiniteField, r: u32, c: usize) -> Result<Self> {
        let mut dims = vec![0; r as usize];
        dims[c] = 1;
        let m = Matrix::zeros(&field, 1, 1);
        Self::new(field, r, dims, m.clone(), m)
    }

    /// A module with V = 0 and F given by its blocks.
    pub fn additive(field: FiniteField, r: u32, dims: Vec<usize>, f_blocks: &[Matrix<FfElem>]) -> Result<Self> {
        let r_us = r as usize;
        let v_blocks: Vec<_> =
            (0..r_us).map(|c| Matrix::zeros(&field, dims[c], dims[(c + 1) % r_us])).collect();
        Self::from_blocks(field, r, dims, f_blocks, &v_blocks)
    }

    pub fn validate(&self) -> Result<()> {
        let r = self.r() as usize;
        if self.dims.len() != r {
            return Err(Error::DimensionMismatch(format!("{} component dimensions for r = {r}", self.dims.len())));
        }
        let n = self.dim();
        for (name, map, twist) in [("F", &self.f, 1), ("V", &self.v, -1)] {
            if map.matrix.rows() != n || map.matrix.cols() != n {
                return Err(Error::DimensionMismatch(format!("{name} is not {n}x{n}")));
            }
            if map.twist != twist {
                return Err(Error::Invalid(format!("{name} must have twist {twist}")));
            }
        }
        let comp = self.component_index();
        for (name, map, step) in [("F", &self.f, 1), ("V", &self.v, r - 1)] {
            for i in 0..n {
                for j in 0..n {
                    if !self.field.is_zero(map.matrix.get(i, j)) && comp[i] != (comp[j] + step) % r {
                        return Err(Error::BlockPattern {
                            map: name,
                            src: self.component_character(comp[j]).exponent(),
                            dst: self.component_character(comp[i]).exponent(),
                        });
                    }
                }
            }
        }
        let k = &self.field;
        if !self.f.compose(k, &self.v).matrix.is_zero(k) {
            return Err(Error::IdentityFails("FV = 0"));
        }
        if !self.v.compose(k, &self.f).matrix.is_zero(k) {
            return Err(Error::IdentityFails("VF = 0"));
        }
        Ok(())
    }

    pub fn field(&self) -> &FiniteField {
        &self.field
    }

    pub fn group(&self) -> CharacterGroup {
        self.group
    }

    pub fn r(&self) -> u32 {
        self.group.r()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn f(&self) -> &SemilinearMap<FfElem> {
        &self.f
    }

    pub fn v(&self) -> &SemilinearMap<FfElem> {
        &self.v
    }

    /// The character of component c, χ_1^{p^c}.
    pub fn component_character(&self, c: usize) -> Character {
        self.group.teichmuller().twist(c as i64)
    }

    /// Basis indices of component c.
    pub fn component_range(&self, c: usize) -> Range<usize> {
        let off = offsets(&self.dims);
        off[c]..off[c + 1]
    }

    fn component_index(&self) -> Vec<usize> {
        self.dims.iter().enumerate().flat_map(|(c, &d)| std::iter::repeat_n(c, d)).collect()
    }

    fn range_vec(&self, c: usize) -> Vec<usize> {
        self.component_range(c).collect()
    }

    /// Block of F from component c to c + 1.
    pub fn f_block(&self, c: usize) -> Matrix<FfElem> {
        let d = (c + 1) % self.dims.len();
        self.f.matrix.select(&self.range_vec(d), &self.range_vec(c))
    }

    /// Block of V from component c + 1 to c.
    pub fn v_block(&self, c: usize) -> Matrix<FfElem> {
        let d = (c + 1) % self.dims.len();
        self.v.matrix.select(&self.range_vec(c), &self.range_vec(d))
    }

    /// Σ dim_k(M_χ) [χ].
    pub fn cha(&self) -> CharSum {
        let mut s = CharSum::zero(self.group);
        for (c, &d) in self.dims.iter().enumerate() {
            s.add_term(self.component_character(c).exponent(), d as i64).expect("small dimensions");
        }
        s
    }

    /// exp_F(cha(M)), the character of the corresponding group scheme.
    pub fn big_char(&self) -> Result<CharSum> {
        self.cha().exp_f()
    }

    /// The k-linear dual with F* adjoint to V and V* adjoint to F.
    pub fn dual(&self) -> Self {
        let k = &self.field;
        GradedDieudonneModule {
            field: k.clone(),
            group: self.group,
            dims: self.dims.clone(),
            f: SemilinearMap::new(self.v.matrix.frobenius(k, 1).transpose(), 1),
            v: SemilinearMap::new(self.f.matrix.frobenius(k, -1).transpose(), -1),
        }
    }

    pub fn is_v_nilpotent(&self) -> bool {
        let n = self.dim();
        n == 0 || self.v.power(&self.field, n).matrix.is_zero(&self.field)
    }

    /// Per component, a basis of the part of V^i M lying in that component.
    fn v_image_bases(&self, i: usize) -> Vec<Vec<Vec<FfElem>>> {
        let k = &self.field;
        let n = self.dim();
        let vi = if i == 0 { Matrix::identity(k, n) } else { self.v.power(k, i).matrix };
        let all: Vec<usize> = (0..n).collect();
        (0..self.dims.len()).map(|c| linalg::column_space(k, &vi.select(&self.range_vec(c), &all))).collect()
    }

    /// Graded subquotients V^i M / V^{i+1} M with the induced F and V = 0.
    pub fn v_filtration(&self) -> Result<Vec<GradedDieudonneModule>> {
        if !self.is_v_nilpotent() {
            return Err(Error::NotNilpotent);
        }
        let k = &self.field;
        let r = self.dims.len();
        let mut layers = Vec::new();
        let mut current = self.v_image_bases(0);
        let mut i = 0;
        while current.iter().any(|b| !b.is_empty()) {
            let next = self.v_image_bases(i + 1);
            let quotient: Vec<Vec<Vec<FfElem>>> = (0..r)
                .map(|c| {
                    let mut span = next[c].clone();
                    let mut rank = span.len();
                    let mut picked = Vec::new();
                    for b in &current[c] {
                        span.push(b.clone());
                        let new_rank = linalg::rank(k, &Matrix::from_columns(k, self.dims[c], &span));
                        if new_rank > rank {
                            rank = new_rank;
                            picked.push(b.clone());
                        } else {
                            span.pop();
                        }
                    }
                    picked
                })
                .collect();
            let layer_dims: Vec<usize> = quotient.iter().map(Vec::len).collect();
            let f_blocks: Vec<Matrix<FfElem>> = (0..r)
                .map(|c| {
                    let d = (c + 1) % r;
                    let fb = self.f_block(c);
                    let mut target = quotient[d].clone();
                    target.extend(next[d].iter().cloned());
                    let basis = Matrix::from_columns(k, self.dims[d], &target);
                    let cols: Vec<Vec<FfElem>> = quotient[c]
                        .iter()
                        .map(|b| {
                            let image = fb.mul_vec(k, &b.iter().map(|x| k.frobenius(x, 1)).collect::<Vec<_>>());
                            let x = linalg::solve(k, &basis, &image).expect("F preserves the filtration");
                            x[..quotient[d].len()].to_vec()
                        })
                        .collect();
                    Matrix::from_fn(quotient[d].len(), quotient[c].len(), |a, b| cols[b][a])
                })
                .collect();
            layers.push(GradedDieudonneModule::additive(k.clone(), self.r(), layer_dims, &f_blocks)?);
            current = next;
            i += 1;
        }
        Ok(layers)
    }

    /// Matrices of F and V in the basis given by the columns of `b`, which
    /// must be invertible and block diagonal by component.
    pub fn change_basis(&self, b: &Matrix<FfElem>) -> Result<Self> {
        let k = &self.field;
        let b_inv = linalg::inverse(k, b).ok_or_else(|| Error::Invalid("change of basis is singular".into()))?;
        let m = GradedDieudonneModule {
            field: k.clone(),
            group: self.group,
            dims: self.dims.clone(),
            f: self.f.conjugate(k, &b_inv, b),
            v: self.v.conjugate(k, &b_inv, b),
        };
        m.validate()?;
        Ok(m)
    }

    /// The submodule spanned by basis vectors `idx` (assumed stable under F
    /// and V), with its grading.
    fn restrict(&self, idx: &[usize]) -> Result<Self> {
        let comp = self.component_index();
        let mut dims = vec![0; self.dims.len()];
        for &i in idx {
            dims[comp[i]] += 1;
        }
        Self::new(
            self.field.clone(),
            self.r(),
            dims,
            self.f.matrix.select(idx, idx),
            self.v.matrix.select(idx, idx),
        )
    }

    /// Fitting decomposition for V^{s·dim}: (V-nilpotent part, V-bijective part).
    pub fn fitting_split(&self) -> Result<(Self, Self)> {
        let k = &self.field;
        let n = self.dim();
        if n == 0 {
            return Ok((self.clone(), self.clone()));
        }
        let power = self.field.degree() as usize * n;
        let l = self.v.power(k, power).matrix;
        let r = self.dims.len();
        let mut b = Matrix::zeros(k, n, n);
        let mut nil_idx = Vec::new();
        let mut bij_idx = Vec::new();
        for c in 0..r {
            let range = self.range_vec(c);
            let block = l.select(&range, &range);
            let ker = linalg::kernel(k, &block);
            let im = linalg::column_space(k, &block);
            debug_assert_eq!(ker.len() + im.len(), range.len());
            for (j, col) in ker.iter().chain(im.iter()).enumerate() {
                for (a, &row) in range.iter().enumerate() {
                    b.set(row, range[j], col[a]);
                }
                if j < ker.len() {
                    nil_idx.push(range[j]);
                } else {
                    bij_idx.push(range[j]);
                }
            }
        }
        let adapted = self.change_basis(&b)?;
        Ok((adapted.restrict(&nil_idx)?, adapted.restrict(&bij_idx)?))
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if self.field != other.field {
            return Err(Error::RingMismatch(format!("{:?} vs {:?}", self.field, other.field)));
        }
        if self.group != other.group {
            return Err(Error::GroupMismatch(format!("{} vs {}", self.group, other.group)));
        }
        let r = self.dims.len();
        let dims: Vec<usize> = (0..r).map(|c| self.dims[c] + other.dims[c]).collect();
        let off = offsets(&dims);
        // Component by component, the first summand's basis comes first.
        let mut pos_a = Vec::new();
        let mut pos_b = Vec::new();
        for c in 0..r {
            pos_a.extend(off[c]..off[c] + self.dims[c]);
            pos_b.extend(off[c] + self.dims[c]..off[c + 1]);
        }
        let k = &self.field;
        let n = off[r];
        let mut f = Matrix::zeros(k, n, n);
        let mut v = Matrix::zeros(k, n, n);
        f.place(&pos_a, &pos_a, &self.f.matrix);
        f.place(&pos_b, &pos_b, &other.f.matrix);
        v.place(&pos_a, &pos_a, &self.v.matrix);
        v.place(&pos_b, &pos_b, &other.v.matrix);
        Self::new(k.clone(), self.r(), dims, f, v)
    }

    /// A random valid module with the given component dimensions.
    pub fn random<R: Rng + ?Sized>(field: &FiniteField, r: u32, dims: &[usize], rng: &mut R) -> Result<Self> {
        let k = field;
        let r_us = r as usize;
        let mut f_blocks = Vec::with_capacity(r_us);
        let mut v_blocks = Vec::with_capacity(r_us);
        for c in 0..r_us {
            let (a, b) = (dims[c], dims[(c + 1) % r_us]);
            let fb = random_of_rank(k, b, a, rng.gen_range(0..=a.min(b)), rng);
            // σ(V) = K X L with K spanning ker F and L the left kernel of F
            // gives FV = VF = 0.
            let ker = linalg::kernel(k, &fb);
            let left = linalg::left_kernel(k, &fb);
            let kmat = Matrix::from_columns(k, a, &ker);
            let lmat = Matrix::from_columns(k, b, &left).transpose();
            let x = Matrix::from_fn(ker.len(), left.len(), |_, _| if rng.gen_bool(0.7) { k.random(rng) } else { k.zero() });
            let sv = if ker.is_empty() || left.is_empty() {
                Matrix::zeros(k, a, b)
            } else {
                kmat.mul(k, &x).mul(k, &lmat)
            };
            f_blocks.push(fb);
            v_blocks.push(sv.frobenius(k, -1));
        }
        Self::from_blocks(field.clone(), r, dims.to_vec(), &f_blocks, &v_blocks)
    }

    /// A random module on which V is nilpotent.
    pub fn random_v_nilpotent<R: Rng + ?Sized>(field: &FiniteField, r: u32, dims: &[usize], rng: &mut R) -> Result<Self> {
        Ok(Self::random(field, r, dims, rng)?.fitting_split()?.0)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let k = &self.field;
        let r = self.dims.len();
        let mut f = BTreeMap::new();
        let mut v = BTreeMap::new();
        for c in 0..r {
            let d = (c + 1) % r;
            if self.dims[c] == 0 || self.dims[d] == 0 {
                continue;
            }
            let (ec, ed) = (self.component_character(c).exponent(), self.component_character(d).exponent());
            let repr = |m: &Matrix<FfElem>| serial::matrix_to_repr(m, |x| serial::ff_to_repr(k, *x));
            f.insert(serial::block_key(ec, ed), repr(&self.f_block(c)));
            v.insert(serial::block_key(ed, ec), repr(&self.v_block(c)));
        }
        let dims = (0..r).map(|c| (self.component_character(c).exponent(), self.dims[c])).collect();
        let default_modulus = FiniteField::new(k.p(), k.degree()).map(|d| d.modulus().to_vec()).ok();
        let modulus = (default_modulus.as_deref() != Some(k.modulus())).then(|| k.modulus().to_vec());
        let repr = ModuleRepr { p: k.p(), r: self.r(), s: k.degree(), modulus, dims, f, v };
        serde_json::to_value(repr).expect("module JSON")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let repr: ModuleRepr = serde_json::from_value(value.clone()).map_err(|e| Error::Invalid(e.to_string()))?;
        let field = match &repr.modulus {
            Some(g) => FiniteField::with_modulus(repr.p, g)?,
            None => FiniteField::new(repr.p, repr.s)?,
        };
        if field.degree() != repr.s {
            return Err(Error::BadModulus(repr.s));
        }
        let group = character_group(&field, repr.r)?;
        let r = repr.r as usize;
        let prim: Vec<u64> = group.primitive_set().iter().map(|c| c.exponent()).collect();
        let comp_of = |e: u64| prim.iter().position(|&x| x == e % group.order()).ok_or(Error::NotPrimitive(e));
        let mut dims = vec![0; r];
        for (&e, &d) in &repr.dims {
            dims[comp_of(e)?] = d;
        }
        let mut f_blocks: Vec<Matrix<FfElem>> =
            (0..r).map(|c| Matrix::zeros(&field, dims[(c + 1) % r], dims[c])).collect();
        let mut v_blocks: Vec<Matrix<FfElem>> =
            (0..r).map(|c| Matrix::zeros(&field, dims[c], dims[(c + 1) % r])).collect();
        for (name, blocks, is_f) in [("F", &repr.f, true), ("V", &repr.v, false)] {
            for (key, m) in blocks {
                let (src, dst) = serial::parse_block_key(key)?;
                let (cs, cd) = (comp_of(src)?, comp_of(dst)?);
                let expected = if is_f { (cs + 1) % r } else { (cd + 1) % r };
                let actual = if is_f { cd } else { cs };
                if expected != actual {
                    return Err(Error::BlockPattern { map: name, src, dst });
                }
                let parsed =
                    serial::matrix_from_repr(&field, m, dims[cd], dims[cs], |e| serial::ff_from_repr(&field, e))?;
                if is_f {
                    f_blocks[cs] = parsed;
                } else {
                    v_blocks[cd] = parsed;
                }
            }
        }
        Self::from_blocks(field, repr.r, dims, &f_blocks, &v_blocks)
    }
}

fn character_group(field: &FiniteField, r: u32) -> Result<CharacterGroup> {
    if r == 0 || !field.degree().is_multiple_of(r) {
        return Err(Error::FieldNotContained { r, s: field.degree() });
    }
    CharacterGroup::new(field.p(), r)
}

/// A random `rows × cols` matrix of the given rank.
pub(crate) fn random_of_rank<R: Rng + ?Sized>(
    k: &FiniteField,
    rows: usize,
    cols: usize,
    rank: usize,
    rng: &mut R,
) -> Matrix<FfElem> {
    loop {
        let a = Matrix::from_fn(rows, rank, |_, _| k.random(rng));
        let b = Matrix::from_fn(rank, cols, |_, _| k.random(rng));
        let m = if rank == 0 { Matrix::zeros(k, rows, cols) } else { a.mul(k, &b) };
        if linalg::rank(k, &m) == rank {
            return m;
        }
    }
}

#[derive(Serialize, Deserialize)]
struct ModuleRepr {
    p: u64,
    r: u32,
    s: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    modulus: Option<Vec<u64>>,
    dims: BTreeMap<u64, usize>,
    #[serde(rename = "F", default)]
    f: BTreeMap<String, MatrixRepr>,
    #[serde(rename = "V", default)]
    v: BTreeMap<String, MatrixRepr>,
}
