//! Dieudonné modules of p-divisible O_D-modules: free graded modules over
//! W_m(k) with F, V and the uniformizer Π, their torsion and Lie characters,
//! and the criterion for X[Π] to be a Raynaud scheme.
//!
//! Grading follows [`crate::dieudonne`]: component c is the χ_1^{p^c} part.
//! F maps c to c + 1, V maps c + 1 to c, and Π maps c to c + t where t is
//! the twist shift (by default f, so that Π moves χ to χ^{q_K}).

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::characters::{CharSum, Character, CharacterGroup};
use crate::dieudonne::{offsets, GradedDieudonneModule};
use crate::error::{Error, Result};
use crate::galois::{
    diagonal_reduce, invert, linalg, FfElem, GaloisRing, GrElem, Matrix, Ring, SemilinearMap,
};
use crate::raynaud::is_raynaud_from_crystal;
use crate::serial::{self, MatrixRepr};

/// Node budget for the generator search with a prescribed Lie character.
pub const SEARCH_BUDGET: u64 = 5_000_000;

/// Numerical data of K (unramified of residue degree f over Q_p) and of the
/// central division algebra of invariant 1/d over it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ODParams {
    p: u64,
    f: u32,
    d: u32,
    twist_shift: i64,
}

impl ODParams {
    pub fn new(p: u64, f: u32, d: u32) -> Result<Self> {
        if f == 0 {
            return Err(Error::InvalidDegree(f));
        }
        if d < 2 {
            return Err(Error::Invalid(format!("division algebra index d = {d} must be at least 2")));
        }
        CharacterGroup::new(p, f * d)?;
        Ok(ODParams { p, f, d, twist_shift: f as i64 })
    }

    pub fn with_twist_shift(mut self, t: i64) -> Self {
        self.twist_shift = t;
        self
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn f(&self) -> u32 {
        self.f
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    /// r = f·d, the degree of F over F_p.
    pub fn r(&self) -> u32 {
        self.f * self.d
    }

    /// n = e·f with e = 1.
    pub fn n(&self) -> u32 {
        self.f
    }

    pub fn q(&self) -> u64 {
        self.p.pow(self.r())
    }

    pub fn q_k(&self) -> u64 {
        self.p.pow(self.f)
    }

    pub fn twist_shift(&self) -> i64 {
        self.twist_shift
    }

    pub fn group(&self) -> CharacterGroup {
        CharacterGroup::new(self.p, self.r()).expect("checked in new")
    }

    /// The κ-linear characters χ_1^{p^i} with f | i.
    pub fn kappa_linear(&self) -> Vec<Character> {
        let f = self.f as usize;
        self.group().primitive_set().into_iter().enumerate().filter(|(i, _)| i % f == 0).map(|(_, c)| c).collect()
    }

    fn pi_step(&self) -> usize {
        self.twist_shift.rem_euclid(self.r() as i64) as usize
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ODModule {
    params: ODParams,
    ring: GaloisRing,
    dims: Vec<usize>,
    f: SemilinearMap<GrElem>,
    v: SemilinearMap<GrElem>,
    pi: Matrix<GrElem>,
}

impl ODModule {
    pub fn new(
        params: ODParams,
        ring: GaloisRing,
        dims: Vec<usize>,
        f: Matrix<GrElem>,
        v: Matrix<GrElem>,
        pi: Matrix<GrElem>,
    ) -> Result<Self> {
        let m = ODModule { params, ring, dims, f: SemilinearMap::new(f, 1), v: SemilinearMap::new(v, -1), pi };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        let ring = &self.ring;
        let r = self.params.r() as usize;
        if ring.p() != self.params.p {
            return Err(Error::RingMismatch(format!("ring characteristic p = {} but params p = {}", ring.p(), self.params.p)));
        }
        if !ring.degree().is_multiple_of(r as u32) {
            return Err(Error::FieldNotContained { r: r as u32, s: ring.degree() });
        }
        if ring.length() < 2 {
            return Err(Error::Invalid("Witt length m must be at least 2".into()));
        }
        if self.dims.len() != r {
            return Err(Error::DimensionMismatch(format!("{} component ranks for r = {r}", self.dims.len())));
        }
        let n = self.rank();
        for (name, m) in [("F", &self.f.matrix), ("V", &self.v.matrix), ("Pi", &self.pi)] {
            if m.rows() != n || m.cols() != n {
                return Err(Error::DimensionMismatch(format!("{name} is not {n}x{n}")));
            }
        }
        if self.f.twist != 1 || self.v.twist != -1 {
            return Err(Error::Invalid("F must have twist 1 and V twist -1".into()));
        }
        let comp = self.component_index();
        let steps = [("F", &self.f.matrix, 1), ("V", &self.v.matrix, r - 1), ("Pi", &self.pi, self.params.pi_step())];
        for (name, m, step) in steps {
            for i in 0..n {
                for j in 0..n {
                    if !ring.is_zero(m.get(i, j)) && comp[i] != (comp[j] + step) % r {
                        return Err(Error::BlockPattern {
                            map: name,
                            src: self.component_character(comp[j]).exponent(),
                            dst: self.component_character(comp[i]).exponent(),
                        });
                    }
                }
            }
        }
        let p_id = Matrix::scalar(ring, n, &ring.p_power(1));
        if self.f.compose(ring, &self.v).matrix != p_id {
            return Err(Error::IdentityFails("FV = p"));
        }
        if self.v.compose(ring, &self.f).matrix != p_id {
            return Err(Error::IdentityFails("VF = p"));
        }
        if self.pi.pow(ring, self.params.d) != p_id {
            return Err(Error::IdentityFails("Pi^d = p"));
        }
        let pi_f = self.pi.mul(ring, &self.f.matrix);
        if pi_f != self.f.matrix.mul(ring, &self.pi.frobenius(ring, 1)) {
            return Err(Error::IdentityFails("Pi F = F Pi"));
        }
        let pi_v = self.pi.mul(ring, &self.v.matrix);
        if pi_v != self.v.matrix.mul(ring, &self.pi.frobenius(ring, -1)) {
            return Err(Error::IdentityFails("Pi V = V Pi"));
        }
        let unit = (self.params.n() * self.params.d * self.params.d) as usize;
        if n == 0 || !n.is_multiple_of(unit) {
            return Err(Error::BadHeight(self.dims.clone()));
        }
        Ok(())
    }

    pub fn params(&self) -> &ODParams {
        &self.params
    }

    pub fn ring(&self) -> &GaloisRing {
        &self.ring
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn rank(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn f(&self) -> &SemilinearMap<GrElem> {
        &self.f
    }

    pub fn v(&self) -> &SemilinearMap<GrElem> {
        &self.v
    }

    pub fn pi(&self) -> &Matrix<GrElem> {
        &self.pi
    }

    /// h with rank = h·n·d².
    pub fn height(&self) -> usize {
        let p = &self.params;
        self.rank() / (p.n() * p.d * p.d) as usize
    }

    pub fn component_character(&self, c: usize) -> Character {
        self.params.group().teichmuller().twist(c as i64)
    }

    fn component_index(&self) -> Vec<usize> {
        self.dims.iter().enumerate().flat_map(|(c, &d)| std::iter::repeat_n(c, d)).collect()
    }

    fn range_vec(&self, c: usize) -> Vec<usize> {
        let off = offsets(&self.dims);
        (off[c]..off[c + 1]).collect()
    }

    fn residue_matrix(&self, m: &Matrix<GrElem>) -> Matrix<FfElem> {
        Matrix::from_fn(m.rows(), m.cols(), |i, j| self.ring.residue(m.get(i, j)))
    }

    /// Σ_c rank(M_c) [χ_c], the character of M/pM.
    pub fn cha_mod_p(&self) -> CharSum {
        let mut s = CharSum::zero(self.params.group());
        for (c, &n) in self.dims.iter().enumerate() {
            s.add_term(self.component_character(c).exponent(), n as i64).expect("small ranks");
        }
        s
    }

    /// Graded k-dimensions of M / Π^j M.
    pub fn torsion_char(&self, j: u32) -> Result<CharSum> {
        if j == 0 || j > self.params.d {
            return Err(Error::Invalid(format!("torsion index j = {j} must lie in 1..={}", self.params.d)));
        }
        let ring = &self.ring;
        let r = self.dims.len();
        let pj = self.pi.pow(ring, j);
        let shift = (self.params.pi_step() * j as usize) % r;
        let mut out = CharSum::zero(self.params.group());
        for c in 0..r {
            let src = (c + r - shift) % r;
            let block = pj.select(&self.range_vec(c), &self.range_vec(src));
            let form = diagonal_reduce(ring, &block);
            if form.free_rank(block.rows()) > 0 || form.exponents.iter().any(|&e| e > 1) {
                return Err(Error::CokernelNotKilledByP(j));
            }
            let dim = form.exponents.iter().filter(|&&e| e == 1).count();
            out.add_term(self.component_character(c).exponent(), dim as i64)?;
        }
        Ok(out)
    }

    /// Graded dimensions of Lie(X) = coker(V) mod p.
    pub fn lie_char(&self) -> CharSum {
        let k = self.ring.residue_field();
        let r = self.dims.len();
        let mut out = CharSum::zero(self.params.group());
        for c in 0..r {
            let block = self.v.matrix.select(&self.range_vec(c), &self.range_vec((c + 1) % r));
            let rank = linalg::rank(k, &self.residue_matrix(&block));
            out.add_term(self.component_character(c).exponent(), (self.dims[c] - rank) as i64).expect("small ranks");
        }
        out
    }

    /// cha(M/pM) − lie_char.
    pub fn omega_char(&self) -> CharSum {
        self.cha_mod_p().sub(&self.lie_char()).expect("small ranks")
    }

    /// torsion_char(d) == h·d·Σ_{χ ∈ F^+} [χ].
    pub fn divcar_check(&self) -> Result<bool> {
        let g = self.params.group();
        let expected = CharSum::primitive_sum(g).scale(&((self.height() * self.params.d as usize) as i64))?;
        Ok(self.torsion_char(self.params.d)? == expected)
    }

    /// The relation between the characters of M/ΠM and of Lie(X): with
    /// t the twist shift, T = torsion_char(1) and L = lie_char,
    /// T^{(-t-1)} − T^{(-t)} = L − L^{(-t)}.
    pub fn lemma_identity_check(&self) -> Result<bool> {
        let (lhs, rhs) = self.lemma_sides()?;
        Ok(lhs == rhs)
    }

    /// Both sides of [`Self::lemma_identity_check`].
    pub fn lemma_sides(&self) -> Result<(CharSum, CharSum)> {
        let t = self.params.twist_shift;
        let tors = self.torsion_char(1)?;
        let lie = self.lie_char();
        Ok((tors.twist(-t - 1).sub(&tors.twist(-t))?, lie.sub(&lie.twist(-t))?))
    }

    /// (X[Π] is Raynaud, h = 1 and Lie is invariant under the twist shift).
    pub fn theorem_check(&self) -> Result<(bool, bool)> {
        let direct = is_raynaud_from_crystal(&self.torsion_char(1)?)?;
        let lie = self.lie_char();
        let criterion = self.height() == 1 && lie == lie.twist(self.params.twist_shift);
        Ok((direct, criterion))
    }

    /// Lie(X)_χ = 0 outside the κ-linear characters.
    pub fn is_strict(&self) -> bool {
        let kappa = self.params.kappa_linear();
        self.lie_char().terms().all(|(chi, _)| kappa.contains(&chi))
    }

    /// Strict, height one, and Lie(X)_χ of rank one for every κ-linear χ.
    pub fn is_special_formal(&self) -> bool {
        let lie = self.lie_char();
        self.is_strict() && self.height() == 1 && self.params.kappa_linear().iter().all(|chi| lie.coeff_of(chi) == 1)
    }

    /// The p-torsion module M/pM with the induced F and V.
    pub fn reduce_mod_p(&self) -> Result<GradedDieudonneModule> {
        let k = self.ring.residue_field().clone();
        GradedDieudonneModule::new(
            k,
            self.params.r(),
            self.dims.clone(),
            self.residue_matrix(&self.f.matrix),
            self.residue_matrix(&self.v.matrix),
        )
    }

    /// The module in new coordinates v' = U v, for U invertible and
    /// block diagonal by component.
    pub fn conjugate(&self, u: &Matrix<GrElem>) -> Result<Self> {
        let ring = &self.ring;
        let u_inv = invert(ring, u).ok_or_else(|| Error::Invalid("conjugating matrix is not invertible".into()))?;
        let m = ODModule {
            params: self.params,
            ring: ring.clone(),
            dims: self.dims.clone(),
            f: self.f.conjugate(ring, u, &u_inv),
            v: self.v.conjugate(ring, u, &u_inv),
            pi: u.mul(ring, &self.pi).mul(ring, &u_inv),
        };
        m.validate()?;
        Ok(m)
    }

    /// A random invertible matrix, block diagonal by component.
    pub fn random_graded_unit<R: Rng + ?Sized>(&self, rng: &mut R) -> Matrix<GrElem> {
        let ring = &self.ring;
        let n = self.rank();
        let mut u = Matrix::zeros(ring, n, n);
        for c in 0..self.dims.len() {
            let idx = self.range_vec(c);
            let nc = idx.len();
            let block = loop {
                let b = Matrix::from_fn(nc, nc, |_, _| ring.random(rng));
                if linalg::rank(ring.residue_field(), &self.residue_matrix(&b)) == nc {
                    break b;
                }
            };
            u.place(&idx, &idx, &block);
        }
        u
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch(format!("{:?} vs {:?}", self.ring, other.ring)));
        }
        if self.params != other.params {
            return Err(Error::Invalid("modules have different parameters".into()));
        }
        let r = self.dims.len();
        let dims: Vec<usize> = (0..r).map(|c| self.dims[c] + other.dims[c]).collect();
        let off = offsets(&dims);
        let mut pos_a = Vec::new();
        let mut pos_b = Vec::new();
        for c in 0..r {
            pos_a.extend(off[c]..off[c] + self.dims[c]);
            pos_b.extend(off[c] + self.dims[c]..off[c + 1]);
        }
        let ring = &self.ring;
        let n = off[r];
        let sum = |a: &Matrix<GrElem>, b: &Matrix<GrElem>| {
            let mut m = Matrix::zeros(ring, n, n);
            m.place(&pos_a, &pos_a, a);
            m.place(&pos_b, &pos_b, b);
            m
        };
        Self::new(
            self.params,
            ring.clone(),
            dims,
            sum(&self.f.matrix, &other.f.matrix),
            sum(&self.v.matrix, &other.v.matrix),
            sum(&self.pi, &other.pi),
        )
    }

    /// The Drinfeld special formal module over W_2(F_{p^2}) for K = Q_p,
    /// d = 2: basis e_0, f_0 (χ_1) and e_1, f_1 (χ_2) with Π e_i = f_{i+1},
    /// Π f_i = p e_{i+1}, F = Π, V e_{i+1} = f_i, V f_{i+1} = p e_i.
    pub fn make_special_drinfeld(p: u64) -> Result<Self> {
        let params = ODParams::new(p, 1, 2)?;
        let ring = GaloisRing::new(p, 2, 2)?;
        Self::standard(params, ring, &[(0, 1), (1, 1)], &[0, 1])
    }

    /// The standard module on generators g_i of component c_i: basis
    /// Π^j g_i (j < d), with F(g_i) = Π^{a_i} g_{perm[i]} and
    /// V(g_{perm[i]}) = Π^{d − a_i} g_i. Requires
    /// c_{perm[i]} ≡ c_i + 1 − a_i·t (mod r) for the twist shift t.
    pub fn standard(params: ODParams, ring: GaloisRing, gens: &[(usize, u32)], perm: &[usize]) -> Result<Self> {
        let r = params.r() as usize;
        let d = params.d as usize;
        let t = params.pi_step();
        let n_gens = gens.len();
        if perm.len() != n_gens {
            return Err(Error::DimensionMismatch("permutation length".into()));
        }
        let mut seen = vec![false; n_gens];
        for &x in perm {
            if x >= n_gens || std::mem::replace(&mut seen[x], true) {
                return Err(Error::Invalid("not a permutation".into()));
            }
        }
        for (i, &(c, a)) in gens.iter().enumerate() {
            if c >= r || a as usize > d {
                return Err(Error::Invalid(format!("generator {i} has component {c} and exponent {a}")));
            }
            let target = (c + 1 + r * d - (a as usize * t) % r) % r;
            if gens[perm[i]].0 != target {
                return Err(Error::Unsatisfiable(format!("generator {i}: F lands in component {target}")));
            }
        }
        let comp_of = |i: usize, j: usize| (gens[i].0 + j * t) % r;
        let mut dims = vec![0; r];
        for i in 0..n_gens {
            for j in 0..d {
                dims[comp_of(i, j)] += 1;
            }
        }
        let off = offsets(&dims);
        let mut next = off.clone();
        let mut index = vec![vec![0; d]; n_gens];
        for c in 0..r {
            for j in 0..d {
                for i in 0..n_gens {
                    if comp_of(i, j) == c {
                        index[i][j] = next[c];
                        next[c] += 1;
                    }
                }
            }
        }
        let n = off[r];
        let one = ring.one();
        let p = ring.p_power(1);
        // Π^e g for e < 2d, as (basis index, coefficient).
        let power = |i: usize, e: usize| if e < d { (index[i][e], &one) } else { (index[i][e - d], &p) };
        let mut pi = Matrix::zeros(&ring, n, n);
        let mut f = Matrix::zeros(&ring, n, n);
        let mut v = Matrix::zeros(&ring, n, n);
        for i in 0..n_gens {
            let a = gens[i].1 as usize;
            for j in 0..d {
                let (row, c) = power(i, j + 1);
                pi.set(row, index[i][j], c.clone());
                let (row, c) = power(perm[i], j + a);
                f.set(row, index[i][j], c.clone());
                let (row, c) = power(i, j + d - a);
                v.set(row, index[perm[i]][j], c.clone());
            }
        }
        Self::new(params, ring, dims, f, v, pi)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let ring = &self.ring;
        let r = self.dims.len();
        let mut blocks: [BTreeMap<String, MatrixRepr>; 3] = Default::default();
        let steps = [1, r - 1, self.params.pi_step()];
        let mats = [&self.f.matrix, &self.v.matrix, &self.pi];
        for (slot, (&step, m)) in steps.iter().zip(mats).enumerate() {
            for c in 0..r {
                let dst = (c + step) % r;
                if self.dims[c] == 0 || self.dims[dst] == 0 {
                    continue;
                }
                let block = m.select(&self.range_vec(dst), &self.range_vec(c));
                let key = serial::block_key(self.component_character(c).exponent(), self.component_character(dst).exponent());
                blocks[slot].insert(key, serial::matrix_to_repr(&block, serial::gr_to_repr));
            }
        }
        let default_modulus = GaloisRing::new(ring.p(), ring.length(), ring.degree()).map(|g| g.modulus().to_vec()).ok();
        let modulus = (default_modulus.as_deref() != Some(ring.modulus())).then(|| ring.modulus().to_vec());
        let p = &self.params;
        let [f, v, pi] = blocks;
        let repr = ODRepr {
            params: ODParamsRepr {
                p: p.p,
                f: p.f,
                d: p.d,
                m: ring.length(),
                s: Some(ring.degree()),
                twist_shift: (p.twist_shift != p.f as i64).then_some(p.twist_shift),
                modulus,
            },
            dims: (0..r).map(|c| (self.component_character(c).exponent(), self.dims[c])).collect(),
            f,
            v,
            pi,
        };
        serde_json::to_value(repr).expect("module JSON")
    }

    /// Reads the JSON form; `twist_shift` overrides the value in the file.
    pub fn from_json(value: &serde_json::Value, twist_shift: Option<i64>) -> Result<Self> {
        let repr: ODRepr = serde_json::from_value(value.clone()).map_err(|e| Error::Invalid(e.to_string()))?;
        let rp = &repr.params;
        let mut params = ODParams::new(rp.p, rp.f, rp.d)?;
        if let Some(t) = twist_shift.or(rp.twist_shift) {
            params = params.with_twist_shift(t);
        }
        let s = rp.s.unwrap_or(params.r());
        let ring = match &rp.modulus {
            Some(g) => GaloisRing::with_modulus(rp.p, rp.m, g)?,
            None => GaloisRing::new(rp.p, rp.m, s)?,
        };
        if ring.degree() != s {
            return Err(Error::BadModulus(s));
        }
        let group = params.group();
        let r = params.r() as usize;
        let prim: Vec<u64> = group.primitive_set().iter().map(|c| c.exponent()).collect();
        let comp_of = |e: u64| prim.iter().position(|&x| x == e % group.order()).ok_or(Error::NotPrimitive(e));
        let mut dims = vec![0; r];
        for (&e, &n) in &repr.dims {
            dims[comp_of(e)?] = n;
        }
        let off = offsets(&dims);
        let n = off[r];
        let range = |c: usize| (off[c]..off[c + 1]).collect::<Vec<_>>();
        let mut mats = Vec::new();
        let specs = [("F", &repr.f, 1), ("V", &repr.v, r - 1), ("Pi", &repr.pi, params.pi_step())];
        for (name, blocks, step) in specs {
            let mut m = Matrix::zeros(&ring, n, n);
            for (key, block) in blocks {
                let (src, dst) = serial::parse_block_key(key)?;
                let (cs, cd) = (comp_of(src)?, comp_of(dst)?);
                if cd != (cs + step) % r {
                    return Err(Error::BlockPattern { map: name, src, dst });
                }
                let parsed = serial::matrix_from_repr(&ring, block, dims[cd], dims[cs], |e| serial::gr_from_repr(&ring, e))?;
                m.place(&range(cd), &range(cs), &parsed);
            }
            mats.push(m);
        }
        let pi = mats.pop().unwrap();
        let v = mats.pop().unwrap();
        let f = mats.pop().unwrap();
        Self::new(params, ring, dims, f, v, pi)
    }
}

#[derive(Serialize, Deserialize)]
struct ODParamsRepr {
    p: u64,
    f: u32,
    d: u32,
    m: u32,
    #[serde(default)]
    s: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    twist_shift: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    modulus: Option<Vec<u64>>,
}

#[derive(Serialize, Deserialize)]
struct ODRepr {
    params: ODParamsRepr,
    dims: BTreeMap<u64, usize>,
    #[serde(rename = "F", default)]
    f: BTreeMap<String, MatrixRepr>,
    #[serde(rename = "V", default)]
    v: BTreeMap<String, MatrixRepr>,
    #[serde(rename = "Pi", default)]
    pi: BTreeMap<String, MatrixRepr>,
}

/// Configuration of [`random_od`].
#[derive(Debug, Clone, PartialEq)]
pub struct ODConfig {
    pub p: u64,
    pub f: u32,
    pub d: u32,
    pub h: u32,
    pub m: u32,
    /// Residue degree of k; defaults to r = f·d.
    pub s: Option<u32>,
    pub twist_shift: Option<i64>,
    /// Prescribed Lie dimensions per component.
    pub target_lie: Option<Vec<usize>>,
    /// Whether to hide the standard basis by a random graded change of basis.
    pub conjugate: bool,
}

impl Default for ODConfig {
    fn default() -> Self {
        ODConfig { p: 2, f: 1, d: 2, h: 1, m: 2, s: None, twist_shift: None, target_lie: None, conjugate: true }
    }
}

impl ODConfig {
    pub fn params(&self) -> Result<ODParams> {
        let params = ODParams::new(self.p, self.f, self.d)?;
        Ok(match self.twist_shift {
            Some(t) => params.with_twist_shift(t),
            None => params,
        })
    }
}

/// Per-component dimensions of a character supported on F^+.
pub fn component_vector(params: &ODParams, lie: &CharSum) -> Result<Vec<usize>> {
    let group = params.group();
    if lie.group() != group {
        return Err(Error::GroupMismatch(format!("{} vs {}", lie.group(), group)));
    }
    let prim = group.primitive_set();
    let mut out = vec![0; prim.len()];
    for (chi, &n) in lie.terms() {
        let c = prim.iter().position(|x| *x == chi).ok_or(Error::NotPrimitive(chi.exponent()))?;
        if n < 0 {
            return Err(Error::NegativeCoefficient { exponent: chi.exponent(), coeff: n.to_string() });
        }
        out[c] = n as usize;
    }
    Ok(out)
}

/// A random valid O_D-module, deterministic in `seed`.
pub fn random_od(seed: u64, cfg: &ODConfig) -> Result<ODModule> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let params = cfg.params()?;
    if cfg.h == 0 {
        return Err(Error::Invalid("height h must be positive".into()));
    }
    let ring = GaloisRing::new(cfg.p, cfg.m, cfg.s.unwrap_or(params.r()))?;
    let n_gens = (cfg.h * params.f * params.d) as usize;
    let gens = match &cfg.target_lie {
        Some(target) => search_generators(&params, n_gens, target, &mut rng)?,
        None => random_generators(&params, n_gens, &mut rng)?,
    };
    let perm = matching_permutation(&params, &gens)?;
    let module = ODModule::standard(params, ring, &gens, &perm)?;
    if cfg.conjugate {
        let u = module.random_graded_unit(&mut rng);
        module.conjugate(&u)
    } else {
        Ok(module)
    }
}

fn f_target(params: &ODParams, (c, a): (usize, u32)) -> usize {
    let r = params.r() as usize;
    (c + 1 + r * params.d as usize - (a as usize * params.pi_step()) % r) % r
}

/// Some permutation with c_{perm[i]} equal to the component F(g_i) lands in.
fn matching_permutation(params: &ODParams, gens: &[(usize, u32)]) -> Result<Vec<usize>> {
    let mut free: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &(c, _)) in gens.iter().enumerate().rev() {
        free.entry(c).or_default().push(i);
    }
    gens.iter()
        .map(|&g| {
            let t = f_target(params, g);
            free.get_mut(&t)
                .and_then(Vec::pop)
                .ok_or_else(|| Error::Unsatisfiable(format!("no generator left in component {t}")))
        })
        .collect()
}

/// Random generator data built cycle by cycle: along a cycle of π the
/// component advances by 1 − a·t, so the exponents must sum to the right
/// residue for the cycle to close.
fn random_generators<R: Rng + ?Sized>(params: &ODParams, n_gens: usize, rng: &mut R) -> Result<Vec<(usize, u32)>> {
    let r = params.r() as usize;
    let f = params.f as usize;
    let d = params.d;
    for _ in 0..64 {
        let mut gens = Vec::with_capacity(n_gens);
        let mut ok = true;
        while gens.len() < n_gens {
            let remaining = (n_gens - gens.len()) / f;
            let len = f * rng.gen_range(1..=remaining);
            let mut c = rng.gen_range(0..r);
            let start = c;
            let mut cycle = Vec::with_capacity(len);
            for k in 0..len {
                let a = if k + 1 < len {
                    rng.gen_range(0..=d)
                } else {
                    let choices: Vec<u32> = (0..=d).filter(|&a| f_target(params, (c, a)) == start).collect();
                    match choices.choose(rng) {
                        Some(&a) => a,
                        None => {
                            ok = false;
                            break;
                        }
                    }
                };
                cycle.push((c, a));
                c = f_target(params, (c, a));
            }
            if !ok {
                break;
            }
            gens.extend(cycle);
        }
        if ok {
            return Ok(gens);
        }
    }
    Err(Error::Unsatisfiable("no closed generator cycles for this twist shift".into()))
}

struct Search<'a> {
    params: &'a ODParams,
    target: &'a [usize],
    candidates: Vec<(usize, u32)>,
    n_gens: usize,
    chosen: Vec<(usize, u32)>,
    lie: Vec<usize>,
    class_count: Vec<usize>,
    nodes: u64,
}

impl Search<'_> {
    fn contribution(&self, (c, a): (usize, u32)) -> impl Iterator<Item = usize> + '_ {
        let r = self.params.r() as usize;
        let t = self.params.pi_step();
        (0..(self.params.d - a) as usize).map(move |j| (c + j * t) % r)
    }

    fn closes(&self) -> bool {
        let mut sources: Vec<usize> = self.chosen.iter().map(|g| g.0).collect();
        let mut targets: Vec<usize> = self.chosen.iter().map(|&g| f_target(self.params, g)).collect();
        sources.sort_unstable();
        targets.sort_unstable();
        sources == targets
    }

    fn run(&mut self, start: usize, lie_left: usize) -> Result<bool> {
        self.nodes += 1;
        if self.nodes > SEARCH_BUDGET {
            return Err(Error::Unsatisfiable("search budget exhausted".into()));
        }
        let left = self.n_gens - self.chosen.len();
        if left == 0 {
            return Ok(lie_left == 0 && self.closes());
        }
        if lie_left > left * self.params.d as usize {
            return Ok(false);
        }
        let f = self.params.f as usize;
        let per_class = self.n_gens / f;
        for idx in start..self.candidates.len() {
            let g = self.candidates[idx];
            let weight = (self.params.d - g.1) as usize;
            if weight > lie_left || self.class_count[g.0 % f] == per_class {
                continue;
            }
            let comps: Vec<usize> = self.contribution(g).collect();
            let mut trial = self.lie.clone();
            let mut fits = true;
            for &c in &comps {
                trial[c] += 1;
                fits &= trial[c] <= self.target[c];
            }
            if !fits {
                continue;
            }
            let saved = std::mem::replace(&mut self.lie, trial);
            self.chosen.push(g);
            self.class_count[g.0 % f] += 1;
            if self.run(idx, lie_left - weight)? {
                return Ok(true);
            }
            self.class_count[g.0 % f] -= 1;
            self.chosen.pop();
            self.lie = saved;
        }
        Ok(false)
    }
}

/// Depth-first search for generator data whose Lie character is `target`.
fn search_generators<R: Rng + ?Sized>(
    params: &ODParams,
    n_gens: usize,
    target: &[usize],
    rng: &mut R,
) -> Result<Vec<(usize, u32)>> {
    let r = params.r() as usize;
    if target.len() != r {
        return Err(Error::DimensionMismatch(format!("target Lie character needs {r} components")));
    }
    let mut candidates: Vec<(usize, u32)> = (0..r).flat_map(|c| (0..=params.d).map(move |a| (c, a))).collect();
    candidates.shuffle(rng);
    let mut search = Search {
        params,
        target,
        candidates,
        n_gens,
        chosen: Vec::new(),
        lie: vec![0; r],
        class_count: vec![0; params.f as usize],
        nodes: 0,
    };
    let total: usize = target.iter().sum();
    if search.run(0, total)? {
        Ok(search.chosen)
    } else {
        Err(Error::Unsatisfiable(format!("no generator configuration has Lie dimensions {target:?}")))
    }
}

/// Lie dimensions predicted from generator data, for tests of the search.
pub fn predicted_lie(params: &ODParams, gens: &[(usize, u32)]) -> Vec<usize> {
    let r = params.r() as usize;
    let t = params.pi_step();
    let mut out = vec![0; r];
    for &(c, a) in gens {
        for j in 0..(params.d - a) as usize {
            out[(c + j * t) % r] += 1;
        }
    }
    out
}
