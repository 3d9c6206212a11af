//! Finite fields F_{p^s} in a polynomial basis.
//!
//! An element is stored as the base-p integer of its coefficient vector
//! (coefficient of x^i is digit i), so elements are `Copy` and compare by
//! value. Multiplication goes through discrete-log tables built on first use.

use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use super::poly;
use super::ring::{Field, Ring};
use crate::error::{Error, Result};

/// Default bound on the number of field elements.
pub const DEFAULT_FIELD_BOUND: u64 = 1 << 20;

/// Fields up to this size are small enough for exhaustive loops in checks.
pub const EXHAUSTIVE_BOUND: u64 = 256;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct FfElem(u32);

impl FfElem {
    /// Base-p encoding of the coefficient vector.
    pub fn index(self) -> u32 {
        self.0
    }
}

impl fmt::Debug for FfElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

struct Tables {
    generator: FfElem,
    exp: Vec<u32>,
    log: Vec<u32>,
}

struct Inner {
    p: u64,
    s: u32,
    order: u64,
    modulus: Vec<u64>,
    tables: OnceLock<Tables>,
}

#[derive(Clone)]
pub struct FiniteField {
    inner: Arc<Inner>,
}

impl PartialEq for FiniteField {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.p == other.inner.p && self.inner.modulus == other.inner.modulus)
    }
}

impl fmt::Debug for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}^{} mod {:?}", self.inner.p, self.inner.s, self.inner.modulus)
    }
}

/// JSON descriptor shared by fields and Galois rings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingDescriptor {
    pub p: u64,
    pub m: u32,
    pub s: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Vec<u64>>,
}

impl FiniteField {
    /// The field with p^s elements defined by the lexicographically smallest
    /// monic irreducible of degree s, comparing coefficients from the
    /// constant term upwards.
    pub fn new(p: u64, s: u32) -> Result<Self> {
        Self::with_bound(p, s, DEFAULT_FIELD_BOUND)
    }

    pub fn with_bound(p: u64, s: u32, bound: u64) -> Result<Self> {
        check_size(p, s, bound)?;
        let modulus = smallest_irreducible(p, s);
        Ok(Self::from_parts(p, s, modulus))
    }

    /// A field with an explicit monic modulus (lowest degree first).
    pub fn with_modulus(p: u64, modulus: &[u64]) -> Result<Self> {
        if modulus.len() < 2 {
            return Err(Error::BadModulus(0));
        }
        let s = (modulus.len() - 1) as u32;
        check_size(p, s, DEFAULT_FIELD_BOUND)?;
        let reduced: Vec<u64> = modulus.iter().map(|c| c % p).collect();
        if reduced[s as usize] != 1 || !poly::is_irreducible(&reduced, p) {
            return Err(Error::BadModulus(s));
        }
        Ok(Self::from_parts(p, s, reduced))
    }

    fn from_parts(p: u64, s: u32, modulus: Vec<u64>) -> Self {
        FiniteField {
            inner: Arc::new(Inner { p, s, order: p.pow(s), modulus, tables: OnceLock::new() }),
        }
    }

    pub fn p(&self) -> u64 {
        self.inner.p
    }

    /// Degree over the prime field.
    pub fn degree(&self) -> u32 {
        self.inner.s
    }

    pub fn order(&self) -> u64 {
        self.inner.order
    }

    /// Monic modulus, lowest degree first, length s + 1.
    pub fn modulus(&self) -> &[u64] {
        &self.inner.modulus
    }

    pub fn descriptor(&self) -> RingDescriptor {
        RingDescriptor { p: self.p(), m: 1, s: self.degree(), modulus: Some(self.modulus().to_vec()) }
    }

    pub fn elements(&self) -> impl Iterator<Item = FfElem> + '_ {
        (0..self.order() as u32).map(FfElem)
    }

    pub fn from_index(&self, index: u32) -> FfElem {
        assert!((index as u64) < self.order(), "index {index} out of range");
        FfElem(index)
    }

    pub fn from_coeffs(&self, coeffs: &[u64]) -> FfElem {
        let p = self.p();
        let mut c: Vec<u64> = coeffs.iter().map(|x| x % p).collect();
        if c.len() > self.degree() as usize {
            c = poly::rem(&c, self.modulus(), p);
        }
        self.encode(&c)
    }

    pub fn coeffs(&self, a: FfElem) -> Vec<u64> {
        let p = self.p();
        let mut x = a.0 as u64;
        (0..self.degree())
            .map(|_| {
                let d = x % p;
                x /= p;
                d
            })
            .collect()
    }

    fn encode(&self, coeffs: &[u64]) -> FfElem {
        let p = self.p();
        let v = coeffs.iter().rev().fold(0u64, |acc, &c| acc * p + c);
        FfElem(v as u32)
    }

    fn poly_of(&self, a: FfElem) -> Vec<u64> {
        poly::trim(self.coeffs(a))
    }

    fn tables(&self) -> &Tables {
        self.inner.tables.get_or_init(|| self.build_tables())
    }

    fn build_tables(&self) -> Tables {
        let q = self.order();
        let p = self.p();
        let n = q - 1;
        let factors = poly::prime_factors(n);
        let m = self.modulus();
        let generator = (1..q as u32)
            .map(FfElem)
            .find(|&g| {
                let gp = self.poly_of(g);
                factors.iter().all(|&l| poly::powmod(&gp, (n / l) as u128, m, p) != [1])
            })
            .expect("multiplicative group is cyclic");
        let gp = self.poly_of(generator);
        let mut exp = Vec::with_capacity(n as usize);
        let mut log = vec![u32::MAX; q as usize];
        let mut cur = vec![1u64];
        for k in 0..n {
            let e = self.encode(&cur);
            exp.push(e.0);
            log[e.0 as usize] = k as u32;
            cur = poly::mulmod(&cur, &gp, m, p);
        }
        Tables { generator, exp, log }
    }

    /// A fixed generator of the multiplicative group.
    pub fn generator(&self) -> FfElem {
        self.tables().generator
    }

    /// Discrete logarithm to base [`Self::generator`]; `None` for zero.
    pub fn log(&self, a: FfElem) -> Option<u64> {
        if a.0 == 0 {
            None
        } else {
            Some(self.tables().log[a.0 as usize] as u64)
        }
    }

    /// generator^k.
    pub fn exp(&self, k: u64) -> FfElem {
        let t = self.tables();
        FfElem(t.exp[(k % (self.order() - 1)) as usize])
    }

    pub fn pow(&self, a: FfElem, e: u64) -> FfElem {
        if e == 0 {
            return self.one();
        }
        match self.log(a) {
            None => FfElem(0),
            Some(l) => {
                let n = self.order() - 1;
                self.exp(((l as u128 * (e % n) as u128) % n as u128) as u64)
            }
        }
    }

    /// p^(t mod s).
    fn frobenius_exponent(&self, t: i64) -> u64 {
        let s = self.degree() as i64;
        let t = t.rem_euclid(s) as u32;
        self.p().pow(t)
    }

    /// Generator of the subfield with p^r elements; requires r | s.
    pub fn subfield_generator(&self, r: u32) -> Result<FfElem> {
        if r == 0 || !self.degree().is_multiple_of(r) {
            return Err(Error::FieldNotContained { r, s: self.degree() });
        }
        let q = self.order() - 1;
        let qr = self.p().pow(r) - 1;
        Ok(self.exp(q / qr))
    }

    /// Elements of the subfield with p^r elements, nonzero ones listed as
    /// powers h^0, h^1, ... of [`Self::subfield_generator`].
    pub fn subfield_units(&self, r: u32) -> Result<Vec<FfElem>> {
        let h = self.subfield_generator(r)?;
        let n = self.p().pow(r) - 1;
        let mut out = Vec::with_capacity(n as usize);
        let mut cur = self.one();
        for _ in 0..n {
            out.push(cur);
            cur = self.mul(&cur, &h);
        }
        Ok(out)
    }

    pub fn random<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> FfElem {
        FfElem(rng.gen_range(0..self.order() as u32))
    }

    pub fn random_nonzero<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> FfElem {
        FfElem(rng.gen_range(1..self.order() as u32))
    }
}

impl Ring for FiniteField {
    type Elem = FfElem;

    fn zero(&self) -> FfElem {
        FfElem(0)
    }

    fn one(&self) -> FfElem {
        FfElem(1)
    }

    fn from_int(&self, n: i64) -> FfElem {
        FfElem(n.rem_euclid(self.p() as i64) as u32)
    }

    fn add(&self, a: &FfElem, b: &FfElem) -> FfElem {
        let p = self.p() as u32;
        if p == 2 {
            return FfElem(a.0 ^ b.0);
        }
        let (mut x, mut y) = (a.0, b.0);
        let mut out = 0u32;
        let mut place = 1u32;
        while x > 0 || y > 0 {
            let d = (x % p + y % p) % p;
            out += d * place;
            x /= p;
            y /= p;
            place = place.wrapping_mul(p);
        }
        FfElem(out)
    }

    fn neg(&self, a: &FfElem) -> FfElem {
        let p = self.p() as u32;
        if p == 2 {
            return *a;
        }
        let mut x = a.0;
        let mut out = 0u32;
        let mut place = 1u32;
        while x > 0 {
            let d = (p - x % p) % p;
            out += d * place;
            x /= p;
            place = place.wrapping_mul(p);
        }
        FfElem(out)
    }

    fn sub(&self, a: &FfElem, b: &FfElem) -> FfElem {
        self.add(a, &self.neg(b))
    }

    fn mul(&self, a: &FfElem, b: &FfElem) -> FfElem {
        if a.0 == 0 || b.0 == 0 {
            return FfElem(0);
        }
        let t = self.tables();
        let n = t.exp.len();
        let k = t.log[a.0 as usize] as usize + t.log[b.0 as usize] as usize;
        FfElem(t.exp[if k >= n { k - n } else { k }])
    }

    fn is_zero(&self, a: &FfElem) -> bool {
        a.0 == 0
    }

    fn unit_inverse(&self, a: &FfElem) -> Option<FfElem> {
        let l = self.log(*a)?;
        let n = self.order() - 1;
        Some(self.exp((n - l) % n))
    }

    fn frobenius(&self, a: &FfElem, t: i64) -> FfElem {
        self.pow(*a, self.frobenius_exponent(t))
    }
}

impl Field for FiniteField {}

fn check_size(p: u64, s: u32, bound: u64) -> Result<()> {
    if !poly::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if s == 0 {
        return Err(Error::InvalidDegree(s));
    }
    let size = (p as u128).checked_pow(s).unwrap_or(u128::MAX);
    if size > bound as u128 {
        return Err(Error::SizeBound { what: "field order", size, bound: bound as u128 });
    }
    Ok(())
}

/// Enumerates monic polynomials of degree s with (c_0, c_1, ...) in
/// lexicographic order and returns the first irreducible one.
fn smallest_irreducible(p: u64, s: u32) -> Vec<u64> {
    let s = s as usize;
    let total = p.pow(s as u32);
    (0..total)
        .map(|k| {
            // c_0 is the most significant digit of k.
            let mut c = vec![0u64; s + 1];
            let mut x = k;
            for i in (0..s).rev() {
                c[i] = x % p;
                x /= p;
            }
            c[s] = 1;
            c
        })
        .find(|c| poly::is_irreducible(c, p))
        .expect("irreducible polynomials exist in every degree")
}
