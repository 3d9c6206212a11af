//! Galois rings GR(p^m, s) = W_m(F_{p^s}) realized as (Z/p^m)[x]/(g) for a
//! monic lift g of the residue field modulus.

use std::fmt;
use std::sync::Arc;

use super::finite_field::{FfElem, FiniteField, RingDescriptor};
use super::ring::Ring;
use crate::error::{Error, Result};

/// Largest p^m accepted; keeps coefficient products inside u64.
pub const MAX_CHARACTERISTIC: u64 = 1 << 31;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GrElem(Vec<u64>);

impl GrElem {
    /// Coefficients mod p^m, lowest degree first.
    pub fn coeffs(&self) -> &[u64] {
        &self.0
    }
}

impl fmt::Debug for GrElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

struct Inner {
    p: u64,
    m: u32,
    s: u32,
    pm: u64,
    modulus: Vec<u64>,
    residue: FiniteField,
}

#[derive(Clone)]
pub struct GaloisRing {
    inner: Arc<Inner>,
}

impl PartialEq for GaloisRing {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.pm == other.inner.pm && self.inner.modulus == other.inner.modulus)
    }
}

impl fmt::Debug for GaloisRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GR({}^{}, {}) mod {:?}", self.inner.p, self.inner.m, self.inner.s, self.inner.modulus)
    }
}

impl GaloisRing {
    /// GR(p^m, s) over the default residue field modulus.
    pub fn new(p: u64, m: u32, s: u32) -> Result<Self> {
        let k = FiniteField::new(p, s)?;
        Self::over(&k, m)
    }

    /// The Galois ring of length `m` over `k`, lifting k's modulus verbatim.
    pub fn over(k: &FiniteField, m: u32) -> Result<Self> {
        Self::build(k.clone(), m, k.modulus().to_vec())
    }

    /// Ring with an explicit monic modulus over Z/p^m whose reduction is
    /// irreducible.
    pub fn with_modulus(p: u64, m: u32, modulus: &[u64]) -> Result<Self> {
        let k = FiniteField::with_modulus(p, modulus)?;
        Self::build(k, m, modulus.to_vec())
    }

    pub fn from_descriptor(d: &RingDescriptor) -> Result<Self> {
        match &d.modulus {
            Some(g) => {
                if g.len() != d.s as usize + 1 {
                    return Err(Error::BadModulus(d.s));
                }
                Self::with_modulus(d.p, d.m, g)
            }
            None => Self::new(d.p, d.m, d.s),
        }
    }

    fn build(k: FiniteField, m: u32, modulus: Vec<u64>) -> Result<Self> {
        let p = k.p();
        if m == 0 {
            return Err(Error::Invalid("Witt length must be at least 1".into()));
        }
        let pm = (p as u128).checked_pow(m).unwrap_or(u128::MAX);
        if pm > MAX_CHARACTERISTIC as u128 {
            return Err(Error::SizeBound { what: "p^m", size: pm, bound: MAX_CHARACTERISTIC as u128 });
        }
        let pm = pm as u64;
        let modulus: Vec<u64> = modulus.iter().map(|c| c % pm).collect();
        if *modulus.last().unwrap() != 1 {
            return Err(Error::BadModulus(k.degree()));
        }
        Ok(GaloisRing { inner: Arc::new(Inner { p, m, s: k.degree(), pm, modulus, residue: k }) })
    }

    pub fn p(&self) -> u64 {
        self.inner.p
    }

    /// Witt length.
    pub fn length(&self) -> u32 {
        self.inner.m
    }

    /// Residue degree.
    pub fn degree(&self) -> u32 {
        self.inner.s
    }

    /// Characteristic p^m.
    pub fn characteristic(&self) -> u64 {
        self.inner.pm
    }

    pub fn modulus(&self) -> &[u64] {
        &self.inner.modulus
    }

    pub fn residue_field(&self) -> &FiniteField {
        &self.inner.residue
    }

    pub fn descriptor(&self) -> RingDescriptor {
        RingDescriptor { p: self.p(), m: self.length(), s: self.degree(), modulus: Some(self.modulus().to_vec()) }
    }

    /// Number of elements, p^{ms}.
    pub fn order(&self) -> u128 {
        (self.inner.pm as u128).pow(self.degree())
    }

    pub fn unit_count(&self) -> u128 {
        let k = self.residue_field().order() as u128;
        self.order() / k * (k - 1)
    }

    pub fn is_field(&self) -> bool {
        self.length() == 1
    }

    pub fn from_coeffs(&self, coeffs: &[u64]) -> GrElem {
        let pm = self.inner.pm;
        let c: Vec<u64> = coeffs.iter().map(|x| x % pm).collect();
        self.reduce_poly(c)
    }

    /// Enumeration index: coefficients read as base-p^m digits.
    pub fn index(&self, a: &GrElem) -> u128 {
        a.0.iter().rev().fold(0u128, |acc, &c| acc * self.inner.pm as u128 + c as u128)
    }

    pub fn from_index(&self, mut idx: u128) -> GrElem {
        let pm = self.inner.pm as u128;
        GrElem(
            (0..self.degree())
                .map(|_| {
                    let d = idx % pm;
                    idx /= pm;
                    d as u64
                })
                .collect(),
        )
    }

    /// All elements in index order; only sensible for small rings.
    pub fn elements(&self) -> impl Iterator<Item = GrElem> + '_ {
        (0..self.order()).map(|i| self.from_index(i))
    }

    pub fn units(&self) -> impl Iterator<Item = GrElem> + '_ {
        self.elements().filter(|a| self.is_unit(a))
    }

    fn reduce_poly(&self, mut c: Vec<u64>) -> GrElem {
        let s = self.degree() as usize;
        let pm = self.inner.pm;
        let g = &self.inner.modulus;
        while c.len() > s {
            let top = c.pop().unwrap();
            if top != 0 {
                let shift = c.len() - s;
                for i in 0..s {
                    c[shift + i] = (c[shift + i] + (pm - top) * g[i] % pm) % pm;
                }
            }
        }
        c.resize(s, 0);
        GrElem(c)
    }

    /// Reduction to the residue field.
    pub fn residue(&self, a: &GrElem) -> FfElem {
        self.residue_field().from_coeffs(&a.0)
    }

    /// The coefficient-wise lift of a residue field element.
    pub fn lift(&self, a: FfElem) -> GrElem {
        self.from_coeffs(&self.residue_field().coeffs(a))
    }

    /// p-adic valuation; `m` for zero.
    pub fn valuation(&self, a: &GrElem) -> u32 {
        let p = self.p();
        a.0.iter()
            .map(|&c| {
                if c == 0 {
                    self.length()
                } else {
                    let mut v = 0;
                    let mut x = c;
                    while x % p == 0 {
                        x /= p;
                        v += 1;
                    }
                    v
                }
            })
            .min()
            .unwrap_or(self.length())
    }

    pub fn p_power(&self, v: u32) -> GrElem {
        if v >= self.length() {
            return self.zero();
        }
        self.from_int(self.p().pow(v) as i64)
    }

    /// Some b with p^v · b = a; requires valuation(a) ≥ v.
    pub fn div_p_power(&self, a: &GrElem, v: u32) -> GrElem {
        debug_assert!(self.valuation(a) >= v);
        let d = self.p().pow(v);
        GrElem(a.0.iter().map(|c| c / d).collect())
    }

    pub fn pow(&self, a: &GrElem, mut e: u64) -> GrElem {
        let mut acc = self.one();
        let mut base = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// The unique root of x^{p^s} = x reducing to `a`.
    pub fn teichmuller(&self, a: FfElem) -> GrElem {
        let q = self.residue_field().order();
        let mut x = self.lift(a);
        for _ in 0..self.length() {
            let next = self.pow(&x, q);
            if next == x {
                break;
            }
            x = next;
        }
        x
    }

    /// Teichmüller digits t_0, …, t_{m-1} (residues) with a = Σ [t_i] p^i.
    pub fn teichmuller_digits(&self, a: &GrElem) -> Vec<FfElem> {
        let mut digits = Vec::with_capacity(self.length() as usize);
        let mut cur = a.clone();
        for _ in 0..self.length() {
            let t = self.residue(&cur);
            digits.push(t);
            let rest = self.sub(&cur, &self.teichmuller(t));
            cur = self.div_p_power(&rest, 1);
        }
        digits
    }

    pub fn random<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> GrElem {
        let pm = self.inner.pm;
        GrElem((0..self.degree()).map(|_| rng.gen_range(0..pm)).collect())
    }

    pub fn random_unit<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> GrElem {
        loop {
            let a = self.random(rng);
            if self.is_unit(&a) {
                return a;
            }
        }
    }
}

impl Ring for GaloisRing {
    type Elem = GrElem;

    fn zero(&self) -> GrElem {
        GrElem(vec![0; self.degree() as usize])
    }

    fn one(&self) -> GrElem {
        self.from_int(1)
    }

    fn from_int(&self, n: i64) -> GrElem {
        let mut c = vec![0; self.degree() as usize];
        c[0] = n.rem_euclid(self.inner.pm as i64) as u64;
        GrElem(c)
    }

    fn add(&self, a: &GrElem, b: &GrElem) -> GrElem {
        let pm = self.inner.pm;
        GrElem(a.0.iter().zip(&b.0).map(|(x, y)| (x + y) % pm).collect())
    }

    fn sub(&self, a: &GrElem, b: &GrElem) -> GrElem {
        let pm = self.inner.pm;
        GrElem(a.0.iter().zip(&b.0).map(|(x, y)| (x + pm - y) % pm).collect())
    }

    fn neg(&self, a: &GrElem) -> GrElem {
        let pm = self.inner.pm;
        GrElem(a.0.iter().map(|x| (pm - x) % pm).collect())
    }

    fn mul(&self, a: &GrElem, b: &GrElem) -> GrElem {
        let s = self.degree() as usize;
        let pm = self.inner.pm;
        let mut out = vec![0u64; 2 * s - 1];
        for (i, &x) in a.0.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.0.iter().enumerate() {
                out[i + j] = (out[i + j] + x * y % pm) % pm;
            }
        }
        self.reduce_poly(out)
    }

    fn is_zero(&self, a: &GrElem) -> bool {
        a.0.iter().all(|&c| c == 0)
    }

    fn unit_inverse(&self, a: &GrElem) -> Option<GrElem> {
        let k = self.residue_field();
        let r = k.unit_inverse(&self.residue(a))?;
        // Newton iteration y ← y(2 − a y) doubles the p-adic precision.
        let mut y = self.lift(r);
        let two = self.from_int(2);
        let mut precision = 1;
        while precision < self.length() {
            y = self.mul(&y, &self.sub(&two, &self.mul(a, &y)));
            precision *= 2;
        }
        debug_assert_eq!(self.mul(a, &y), self.one());
        Some(y)
    }

    /// σ^t through the Teichmüller expansion: σ(Σ [t_i] p^i) = Σ [t_i^p] p^i.
    fn frobenius(&self, a: &GrElem, t: i64) -> GrElem {
        let s = self.degree() as i64;
        if t.rem_euclid(s) == 0 {
            return a.clone();
        }
        let k = self.residue_field();
        let digits = self.teichmuller_digits(a);
        let mut out = self.zero();
        for (i, d) in digits.into_iter().enumerate().rev() {
            if k.is_zero(&d) {
                continue;
            }
            let term = self.mul(&self.teichmuller(k.frobenius(&d, t)), &self.p_power(i as u32));
            out = self.add(&out, &term);
        }
        out
    }
}
