//! Characters of F^× as exponents, integer combinations of them, and the
//! F-exponential.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{CheckedAdd, CheckedMul, CheckedSub, One, ToPrimitive, Zero};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::galois::{poly, FiniteField, Ring};

/// Largest q accepted for a character group; exponents live in u64 and
/// convolutions are quadratic in q.
pub const MAX_GROUP_ORDER: u64 = 1 << 24;

/// The character group of F^× for F = F_{p^r}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CharacterGroup {
    p: u64,
    r: u32,
    q: u64,
}

impl CharacterGroup {
    pub fn new(p: u64, r: u32) -> Result<Self> {
        if !poly::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if r == 0 {
            return Err(Error::InvalidDegree(r));
        }
        let q = (p as u128).checked_pow(r).unwrap_or(u128::MAX);
        if q > MAX_GROUP_ORDER as u128 {
            return Err(Error::SizeBound { what: "q", size: q, bound: MAX_GROUP_ORDER as u128 });
        }
        Ok(CharacterGroup { p, r, q: q as u64 })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// q − 1, the number of characters.
    pub fn order(&self) -> u64 {
        self.q - 1
    }

    pub fn character(&self, exponent: i64) -> Character {
        Character { group: *self, exponent: exponent.rem_euclid(self.order() as i64) as u64 }
    }

    pub fn trivial(&self) -> Character {
        self.character(0)
    }

    /// χ_1, the Teichmüller character.
    pub fn teichmuller(&self) -> Character {
        self.character(1)
    }

    pub fn characters(&self) -> impl Iterator<Item = Character> + '_ {
        (0..self.order()).map(|e| Character { group: *self, exponent: e })
    }

    /// χ_1, χ_1^p, …, χ_1^{p^{r-1}}.
    pub fn primitive_set(&self) -> Vec<Character> {
        (0..self.r as i64).map(|i| self.teichmuller().twist(i)).collect()
    }

    /// p^t mod (q − 1) for any integer t.
    pub fn twist_factor(&self, t: i64) -> u64 {
        let n = self.order();
        let t = t.rem_euclid(self.r as i64) as u32;
        poly::mod_pow(self.p % n, t as u64, n)
    }

    fn check(&self, other: &CharacterGroup) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GroupMismatch(format!("F_{} vs F_{}", self.q, other.q)))
        }
    }
}

impl fmt::Display for CharacterGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}^", self.q)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Character {
    group: CharacterGroup,
    exponent: u64,
}

impl Character {
    pub fn group(&self) -> CharacterGroup {
        self.group
    }

    /// The exponent e with χ(λ) = λ^e, in [0, q − 1).
    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    pub fn is_trivial(&self) -> bool {
        self.exponent == 0
    }

    pub fn is_primitive(&self) -> bool {
        self.group.primitive_set().contains(self)
    }

    pub fn mul(&self, other: &Character) -> Result<Character> {
        self.group.check(&other.group)?;
        Ok(Character { group: self.group, exponent: (self.exponent + other.exponent) % self.group.order() })
    }

    pub fn pow(&self, n: i64) -> Character {
        let m = self.group.order() as i128;
        let e = (self.exponent as i128 * n as i128).rem_euclid(m);
        Character { group: self.group, exponent: e as u64 }
    }

    pub fn inverse(&self) -> Character {
        self.pow(-1)
    }

    /// χ^{p^t}.
    pub fn twist(&self, t: i64) -> Character {
        let n = self.group.order() as u128;
        let e = self.exponent as u128 * self.group.twist_factor(t) as u128 % n;
        Character { group: self.group, exponent: e as u64 }
    }

    /// Whether λ ↦ λ^e (with 0 ↦ 0) is additive on F, by exhaustive check.
    pub fn additivity_oracle(&self) -> Result<bool> {
        let g = self.group;
        let k = FiniteField::new(g.p, g.r)?;
        let eval = |x| if k.is_zero(&x) { k.zero() } else { k.pow(x, self.exponent) };
        let values: Vec<_> = k.elements().map(eval).collect();
        for a in k.elements() {
            for b in k.elements() {
                let sum = values[k.add(&a, &b).index() as usize];
                if sum != k.add(&values[a.index() as usize], &values[b.index() as usize]) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

impl fmt::Display for Character {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "χ^{}", self.exponent)
    }
}

/// Integer types usable as [`CharSum`] coefficients.
pub trait Coefficient:
    Clone + Ord + fmt::Debug + fmt::Display + Zero + One + CheckedAdd + CheckedSub + CheckedMul + ToPrimitive
{
}

impl<T> Coefficient for T where
    T: Clone + Ord + fmt::Debug + fmt::Display + Zero + One + CheckedAdd + CheckedSub + CheckedMul + ToPrimitive
{
}

/// A finite formal sum Σ n_χ [χ] in Z[F^∨].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CharSum<C = i64> {
    group: CharacterGroup,
    coeffs: BTreeMap<u64, C>,
}

fn checked_add<C: Coefficient>(a: &C, b: &C) -> Result<C> {
    a.checked_add(b).ok_or(Error::Overflow)
}

fn checked_mul<C: Coefficient>(a: &C, b: &C) -> Result<C> {
    a.checked_mul(b).ok_or(Error::Overflow)
}

impl<C: Coefficient> CharSum<C> {
    pub fn zero(group: CharacterGroup) -> Self {
        CharSum { group, coeffs: BTreeMap::new() }
    }

    pub fn one(group: CharacterGroup) -> Self {
        Self::from_character(&group.trivial())
    }

    pub fn from_character(chi: &Character) -> Self {
        let mut s = Self::zero(chi.group);
        s.coeffs.insert(chi.exponent, C::one());
        s
    }

    /// Σ [χ] over the given characters, with multiplicity.
    pub fn sum_of<'a>(group: CharacterGroup, chars: impl IntoIterator<Item = &'a Character>) -> Result<Self> {
        let mut s = Self::zero(group);
        for chi in chars {
            group.check(&chi.group)?;
            s.add_term(chi.exponent, C::one())?;
        }
        Ok(s)
    }

    /// Σ_{χ ∈ F^+} [χ].
    pub fn primitive_sum(group: CharacterGroup) -> Self {
        Self::sum_of(group, &group.primitive_set()).expect("same group")
    }

    /// Σ_{χ ∈ F^∨} [χ].
    pub fn full_sum(group: CharacterGroup) -> Self {
        let chars: Vec<_> = group.characters().collect();
        Self::sum_of(group, &chars).expect("same group")
    }

    /// Builds a sum from (exponent, coefficient) pairs; exponents are
    /// reduced mod q − 1 and repeated exponents accumulate.
    pub fn from_terms(group: CharacterGroup, terms: impl IntoIterator<Item = (i64, C)>) -> Result<Self> {
        let mut s = Self::zero(group);
        for (e, c) in terms {
            s.add_term(group.character(e).exponent, c)?;
        }
        Ok(s)
    }

    pub fn group(&self) -> CharacterGroup {
        self.group
    }

    pub fn coeff(&self, exponent: u64) -> C {
        self.coeffs.get(&(exponent % self.group.order())).cloned().unwrap_or_else(C::zero)
    }

    pub fn coeff_of(&self, chi: &Character) -> C {
        self.coeff(chi.exponent)
    }

    /// Nonzero terms ordered by exponent.
    pub fn terms(&self) -> impl Iterator<Item = (Character, &C)> + '_ {
        self.coeffs.iter().map(|(&e, c)| (Character { group: self.group, exponent: e }, c))
    }

    pub fn coefficients(&self) -> &BTreeMap<u64, C> {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.coeffs.values().all(|c| *c >= C::zero())
    }

    pub fn add_term(&mut self, exponent: u64, c: C) -> Result<()> {
        if c.is_zero() {
            return Ok(());
        }
        let e = exponent % self.group.order();
        let new = match self.coeffs.get(&e) {
            Some(old) => checked_add(old, &c)?,
            None => c,
        };
        if new.is_zero() {
            self.coeffs.remove(&e);
        } else {
            self.coeffs.insert(e, new);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.group.check(&other.group)?;
        let mut out = self.clone();
        for (&e, c) in &other.coeffs {
            out.add_term(e, c.clone())?;
        }
        Ok(out)
    }

    pub fn neg(&self) -> Result<Self> {
        let mut out = Self::zero(self.group);
        for (&e, c) in &self.coeffs {
            out.coeffs.insert(e, C::zero().checked_sub(c).ok_or(Error::Overflow)?);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg()?)
    }

    pub fn scale(&self, n: &C) -> Result<Self> {
        let mut out = Self::zero(self.group);
        for (&e, c) in &self.coeffs {
            out.add_term(e, checked_mul(c, n)?)?;
        }
        Ok(out)
    }

    /// Convolution product, [χ][χ'] = [χχ'].
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.group.check(&other.group)?;
        let n = self.group.order();
        let mut out = Self::zero(self.group);
        for (&a, ca) in &self.coeffs {
            for (&b, cb) in &other.coeffs {
                out.add_term((a + b) % n, checked_mul(ca, cb)?)?;
            }
        }
        Ok(out)
    }

    pub fn pow(&self, mut e: u64) -> Result<Self> {
        let mut acc = Self::one(self.group);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// Σ n_χ [χ^{p^t}].
    pub fn twist(&self, t: i64) -> Self {
        let mut out = Self::zero(self.group);
        for (chi, c) in self.terms() {
            out.add_term(chi.twist(t).exponent, c.clone()).expect("twist permutes characters");
        }
        out
    }

    /// Σ n_χ.
    pub fn mass(&self) -> Result<C> {
        self.coeffs.values().try_fold(C::zero(), |acc, c| checked_add(&acc, c))
    }

    pub fn is_supported_on_primitive(&self) -> bool {
        let prim = self.group.primitive_set();
        self.terms().all(|(chi, _)| prim.contains(&chi))
    }

    /// The F-exponential: Π_χ (1 + [χ] + … + [χ^{p−1}])^{n_χ}.
    pub fn exp_f(&self) -> Result<Self> {
        let g = self.group;
        let prim = g.primitive_set();
        let mut out = Self::one(g);
        for (chi, n) in self.terms() {
            if *n < C::zero() {
                return Err(Error::NegativeCoefficient { exponent: chi.exponent, coeff: n.to_string() });
            }
            if !prim.contains(&chi) {
                return Err(Error::NotPrimitive(chi.exponent));
            }
            let base = Self::sum_of(g, &(0..g.p as i64).map(|k| chi.pow(k)).collect::<Vec<_>>())?;
            let n = n.to_u64().ok_or(Error::Overflow)?;
            out = out.mul(&base.pow(n)?)?;
        }
        Ok(out)
    }

    /// Converts the coefficient type.
    pub fn convert<D: Coefficient>(&self, f: impl Fn(&C) -> Option<D>) -> Result<CharSum<D>> {
        let mut coeffs = BTreeMap::new();
        for (&e, c) in &self.coeffs {
            coeffs.insert(e, f(c).ok_or(Error::Overflow)?);
        }
        Ok(CharSum { group: self.group, coeffs })
    }
}

impl<C: Coefficient> fmt::Display for CharSum<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.coeffs.iter().map(|(e, c)| format!("{c}[χ^{e}]")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[derive(Serialize, Deserialize)]
struct CharSumRepr<C> {
    p: u64,
    r: u32,
    coeffs: BTreeMap<u64, C>,
}

impl<C: Coefficient + Serialize> Serialize for CharSum<C> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CharSumRepr { p: self.group.p, r: self.group.r, coeffs: self.coeffs.clone() }.serialize(s)
    }
}

impl<'de, C: Coefficient + DeserializeOwned> Deserialize<'de> for CharSum<C> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = CharSumRepr::<C>::deserialize(d)?;
        let group = CharacterGroup::new(repr.p, repr.r).map_err(serde::de::Error::custom)?;
        CharSum::from_terms(group, repr.coeffs.into_iter().map(|(e, c)| ((e % group.order()) as i64, c)))
            .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use proptest::prelude::*;

    fn g(p: u64, r: u32) -> CharacterGroup {
        CharacterGroup::new(p, r).unwrap()
    }

    fn exps(chars: &[Character]) -> Vec<u64> {
        chars.iter().map(|c| c.exponent()).collect()
    }

    fn cs(group: CharacterGroup, terms: &[(i64, i64)]) -> CharSum {
        CharSum::from_terms(group, terms.iter().copied()).unwrap()
    }

    #[test]
    fn primitive_sets() {
        assert_eq!(exps(&g(2, 2).primitive_set()), vec![1, 2]);
        assert_eq!(exps(&g(2, 1).primitive_set()), vec![0]);
        assert_eq!(exps(&g(3, 2).primitive_set()), vec![1, 3]);
        assert!(g(3, 2).character(3).is_primitive());
        assert!(!g(3, 2).character(5).is_primitive());
        assert!(!g(2, 2).character(0).is_primitive());
    }

    #[test]
    fn additivity_examples() {
        assert!(g(3, 2).character(1).additivity_oracle().unwrap());
        assert!(!g(3, 2).character(2).additivity_oracle().unwrap());
        assert!(g(2, 2).character(2).additivity_oracle().unwrap());
        assert!(!g(2, 2).character(0).additivity_oracle().unwrap());
        assert!(g(2, 1).character(0).additivity_oracle().unwrap());
    }

    #[test]
    fn primitive_iff_additive_small_fields() {
        for (p, r) in [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (5, 1), (7, 1)] {
            let group = g(p, r);
            for chi in group.characters() {
                assert_eq!(chi.is_primitive(), chi.additivity_oracle().unwrap(), "{chi} in {group}");
            }
        }
    }

    #[test]
    fn character_arithmetic() {
        let f4 = g(2, 2);
        assert_eq!(f4.character(1).mul(&f4.character(2)).unwrap(), f4.trivial());
        assert_eq!(g(3, 2).character(1).twist(1).exponent(), 3);
        for chi in g(3, 3).characters() {
            assert_eq!(chi.twist(3), chi);
            assert_eq!(chi.twist(-1).twist(1), chi);
        }
        assert!(f4.character(1).mul(&g(3, 1).character(1)).is_err());
    }

    #[test]
    fn charsum_examples() {
        let f4 = g(2, 2);
        let prod = cs(f4, &[(0, 1), (1, 1)]).mul(&cs(f4, &[(0, 1), (2, 1)])).unwrap();
        assert_eq!(prod, cs(f4, &[(0, 2), (1, 1), (2, 1)]));
        let f = cs(f4, &[(1, 3), (2, -1)]);
        assert_eq!(CharSum::one(f4).mul(&f).unwrap(), f);
        assert!(f.sub(&f).unwrap().is_zero());
        assert!(f.sub(&f).unwrap().coefficients().is_empty());
    }

    #[test]
    fn exponential_examples() {
        let f4 = g(2, 2);
        assert_eq!(CharSum::<i64>::zero(f4).exp_f().unwrap(), CharSum::one(f4));
        assert_eq!(CharSum::<i64>::primitive_sum(f4).exp_f().unwrap(), cs(f4, &[(0, 2), (1, 1), (2, 1)]));
        let f2 = g(2, 1);
        assert_eq!(cs(f2, &[(0, 5)]).exp_f().unwrap(), cs(f2, &[(0, 32)]));
        assert!(matches!(cs(f4, &[(1, -1)]).exp_f(), Err(Error::NegativeCoefficient { .. })));
        assert!(matches!(cs(f4, &[(0, 1)]).exp_f(), Err(Error::NotPrimitive(0))));
    }

    #[test]
    fn exponential_overflow_and_bigint() {
        let f2 = g(2, 1);
        assert!(matches!(cs(f2, &[(0, 64)]).exp_f(), Err(Error::Overflow)));
        let big = CharSum::<BigInt>::from_terms(f2, [(0, BigInt::from(64))]).unwrap();
        assert_eq!(big.exp_f().unwrap().coeff(0), BigInt::from(1u8) << 64);
    }

    #[test]
    fn json_round_trip() {
        let f4 = g(2, 2);
        let s = cs(f4, &[(0, 2), (1, 1), (2, 1)]);
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(text, r#"{"p":2,"r":2,"coeffs":{"0":2,"1":1,"2":1}}"#);
        let back: CharSum = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
        let wide = cs(g(3, 3), &[(2, 1), (10, 1)]);
        assert_eq!(serde_json::to_string(&wide).unwrap(), r#"{"p":3,"r":3,"coeffs":{"2":1,"10":1}}"#);
        let zeros: CharSum = serde_json::from_str(r#"{"p":2,"r":2,"coeffs":{"1":0}}"#).unwrap();
        assert!(zeros.is_zero());
    }

    fn group_strategy() -> impl Strategy<Value = CharacterGroup> {
        prop::sample::select(vec![(2, 1), (2, 2), (2, 3), (2, 4), (3, 1), (3, 2), (3, 3), (5, 1), (5, 2), (7, 1)])
            .prop_map(|(p, r)| g(p, r))
    }

    fn primitive_sum_strategy(group: CharacterGroup) -> impl Strategy<Value = CharSum> {
        let prim = group.primitive_set();
        prop::collection::vec(0i64..4, prim.len()).prop_map(move |ns| {
            CharSum::from_terms(group, prim.iter().zip(ns).map(|(c, n)| (c.exponent() as i64, n))).unwrap()
        })
    }

    proptest! {
        #[test]
        fn exponential_is_multiplicative(
            (f, h) in group_strategy().prop_flat_map(|gr| (primitive_sum_strategy(gr), primitive_sum_strategy(gr)))
        ) {
            let lhs = f.add(&h).unwrap().exp_f().unwrap();
            let rhs = f.exp_f().unwrap().mul(&h.exp_f().unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn exponential_mass((f, t) in group_strategy().prop_flat_map(|gr| (primitive_sum_strategy(gr), -5i64..5))) {
            let p = f.group().p() as i64;
            let e = f.exp_f().unwrap();
            prop_assert_eq!(e.mass().unwrap(), p.pow(f.mass().unwrap() as u32));
            prop_assert_eq!(e.twist(t), f.twist(t).exp_f().unwrap());
        }

        #[test]
        fn mass_is_multiplicative(
            (f, h) in group_strategy().prop_flat_map(|gr| {
                let n = gr.order() as i64;
                let terms = prop::collection::vec((0..n, -5i64..6), 0..6);
                (terms.clone(), terms).prop_map(move |(a, b)| {
                    (CharSum::from_terms(gr, a).unwrap(), CharSum::from_terms(gr, b).unwrap())
                })
            })
        ) {
            prop_assert_eq!(f.mul(&h).unwrap().mass().unwrap(), f.mass().unwrap() * h.mass().unwrap());
        }

        #[test]
        fn primitive_set_closed_under_twist(gr in group_strategy()) {
            let prim = gr.primitive_set();
            prop_assert_eq!(prim.len(), gr.r() as usize);
            for chi in &prim {
                prop_assert!(prim.contains(&chi.twist(1)));
            }
        }
    }
}
