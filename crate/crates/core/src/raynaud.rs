//! Raynaud schemes: classification data (x_i, y_i) with x_i y_i = w over a
//! finite base ring, Cartier duality, isomorphism search, and detection from
//! the character of the crystal.

use serde::{Deserialize, Serialize};

use crate::characters::CharSum;
use crate::error::{Error, Result};
use crate::galois::{GaloisRing, GrElem, Ring};
use crate::hopf_oracle::RaynaudAlgebraShape;
use crate::serial::{self, ElemRepr};

/// Default bound on the number of λ-tuples the isomorphism search may visit.
pub const ISOMORPHISM_BOUND: u128 = 10_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct RaynaudParams {
    ring: GaloisRing,
    w: GrElem,
    pairs: Vec<(GrElem, GrElem)>,
}

impl RaynaudParams {
    pub fn new(ring: GaloisRing, w: GrElem, pairs: Vec<(GrElem, GrElem)>) -> Result<Self> {
        let p = RaynaudParams { ring, w, pairs };
        p.validate()?;
        Ok(p)
    }

    /// Parameters with w = p, the default constant.
    pub fn with_default_w(ring: GaloisRing, pairs: Vec<(GrElem, GrElem)>) -> Result<Self> {
        let w = ring.p_power(1);
        Self::new(ring, w, pairs)
    }

    pub fn validate(&self) -> Result<()> {
        let ring = &self.ring;
        if self.pairs.is_empty() {
            return Err(Error::Invalid("at least one pair is required".into()));
        }
        if ring.valuation(&self.w) < 1 {
            return Err(Error::WNotInPR);
        }
        for (i, (x, y)) in self.pairs.iter().enumerate() {
            if ring.mul(x, y) != self.w {
                return Err(Error::RelationViolated { index: i });
            }
        }
        Ok(())
    }

    pub fn ring(&self) -> &GaloisRing {
        &self.ring
    }

    pub fn w(&self) -> &GrElem {
        &self.w
    }

    pub fn pairs(&self) -> &[(GrElem, GrElem)] {
        &self.pairs
    }

    /// Number of pairs, the degree of F over F_p.
    pub fn r(&self) -> usize {
        self.pairs.len()
    }

    /// Swaps the roles of x_i and y_i.
    pub fn cartier_dual(&self) -> Self {
        RaynaudParams {
            ring: self.ring.clone(),
            w: self.w.clone(),
            pairs: self.pairs.iter().map(|(x, y)| (y.clone(), x.clone())).collect(),
        }
    }

    /// The parameters transported by λ: x_i λ_i^p / λ_{i+1}, y_i λ_{i+1} / λ_i^p.
    pub fn transport(&self, lambda: &[GrElem]) -> Result<Self> {
        let ring = &self.ring;
        let r = self.r();
        if lambda.len() != r {
            return Err(Error::DimensionMismatch(format!("expected {r} units")));
        }
        let p = ring.p();
        let mut pairs = Vec::with_capacity(r);
        for i in 0..r {
            let lp = ring.pow(&lambda[i], p);
            let lp_inv = ring.unit_inverse(&lp).ok_or_else(|| Error::Invalid("λ must be units".into()))?;
            let next = &lambda[(i + 1) % r];
            let next_inv = ring.unit_inverse(next).ok_or_else(|| Error::Invalid("λ must be units".into()))?;
            let (x, y) = &self.pairs[i];
            pairs.push((ring.mul(&ring.mul(&lp, x), &next_inv), ring.mul(&ring.mul(&lp_inv, y), next)));
        }
        Ok(RaynaudParams { ring: ring.clone(), w: self.w.clone(), pairs })
    }

    /// The lexicographically first λ ∈ (R^×)^r transporting `self` to
    /// `other`, if any. Units are ordered by their enumeration index.
    pub fn is_isomorphic(&self, other: &Self, bound: u128) -> Result<Option<Vec<GrElem>>> {
        let ring = &self.ring;
        if *ring != other.ring {
            return Err(Error::RingMismatch(format!("{:?} vs {:?}", ring, other.ring)));
        }
        if self.w != other.w {
            return Err(Error::Invalid("parameter sets use different w".into()));
        }
        if self.r() != other.r() {
            return Err(Error::DimensionMismatch(format!("{} vs {} pairs", self.r(), other.r())));
        }
        let r = self.r();
        let units_count = ring.unit_count();
        // λ_{i+1} is forced by step i when x'_i or y_i is a unit.
        let forced: Vec<bool> =
            (0..r).map(|i| ring.is_unit(&other.pairs[i].0) || ring.is_unit(&self.pairs[i].1)).collect();
        let free = 1 + forced[..r - 1].iter().filter(|&&f| !f).count();
        let size = units_count.checked_pow(free as u32).unwrap_or(u128::MAX);
        if size > bound || units_count > bound {
            return Err(Error::SizeBound { what: "|R^x|^r", size, bound });
        }
        let units: Vec<GrElem> = ring.units().collect();
        let mut lambda = Vec::with_capacity(r);
        for l0 in &units {
            lambda.clear();
            lambda.push(l0.clone());
            if self.extend(other, &units, &forced, &mut lambda) {
                return Ok(Some(lambda));
            }
        }
        Ok(None)
    }

    /// Depth-first extension of λ_0, …, λ_i; on success `lambda` holds the
    /// full witness.
    fn extend(&self, other: &Self, units: &[GrElem], forced: &[bool], lambda: &mut Vec<GrElem>) -> bool {
        let ring = &self.ring;
        let r = self.r();
        let i = lambda.len() - 1;
        let lp = ring.pow(&lambda[i], ring.p());
        let (x, y) = &self.pairs[i];
        let (x2, y2) = &other.pairs[i];
        let ok = |next: &GrElem| {
            // x'_i λ_{i+1} = λ_i^p x_i and y'_i λ_i^p = y_i λ_{i+1}
            ring.mul(x2, next) == ring.mul(&lp, x) && ring.mul(y2, &lp) == ring.mul(y, next)
        };
        if i == r - 1 {
            return ok(&lambda[0]);
        }
        let candidates: Vec<GrElem> = if forced[i] {
            let next = match ring.unit_inverse(x2) {
                Some(inv) => ring.mul(&inv, &ring.mul(&lp, x)),
                None => {
                    let inv = ring.unit_inverse(y).expect("forced step");
                    ring.mul(&inv, &ring.mul(y2, &lp))
                }
            };
            if ring.is_unit(&next) { vec![next] } else { vec![] }
        } else {
            units.to_vec()
        };
        for next in candidates {
            if ok(&next) {
                lambda.push(next);
                if self.extend(other, units, forced, lambda) {
                    return true;
                }
                lambda.pop();
            }
        }
        false
    }

    /// Multiplicative presentation R[z_i] / (z_i^p − x_i z_{i+1}).
    pub fn algebra_presentation(&self) -> RaynaudAlgebraShape {
        RaynaudAlgebraShape::new(
            self.ring.clone(),
            self.r() as u32,
            Some(self.pairs.iter().map(|(x, _)| x.clone()).collect()),
        )
        .expect("r >= 1")
    }

    pub fn to_json(&self) -> serde_json::Value {
        let repr = ParamsRepr {
            w: serial::gr_to_repr(&self.w),
            pairs: self.pairs.iter().map(|(x, y)| [serial::gr_to_repr(x), serial::gr_to_repr(y)]).collect(),
        };
        serde_json::to_value(repr).expect("params JSON")
    }

    /// Reads {"w": …, "pairs": [[x, y], …]}; w defaults to p.
    pub fn from_json(ring: &GaloisRing, value: &serde_json::Value) -> Result<Self> {
        let repr: ParamsInput = serde_json::from_value(value.clone()).map_err(|e| Error::Invalid(e.to_string()))?;
        let w = match &repr.w {
            Some(w) => serial::gr_from_repr(ring, w)?,
            None => ring.p_power(1),
        };
        let pairs = repr
            .pairs
            .iter()
            .map(|[x, y]| Ok((serial::gr_from_repr(ring, x)?, serial::gr_from_repr(ring, y)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(ring.clone(), w, pairs)
    }
}

#[derive(Serialize)]
struct ParamsRepr {
    w: ElemRepr,
    pairs: Vec<[ElemRepr; 2]>,
}

#[derive(Deserialize)]
struct ParamsInput {
    #[serde(default)]
    w: Option<ElemRepr>,
    pairs: Vec<[ElemRepr; 2]>,
}

fn check_crystal_character(f: &CharSum) -> Result<()> {
    for (chi, n) in f.terms() {
        if *n < 0 {
            return Err(Error::NegativeCoefficient { exponent: chi.exponent(), coeff: n.to_string() });
        }
        if !chi.is_primitive() {
            return Err(Error::NotPrimitive(chi.exponent()));
        }
    }
    Ok(())
}

/// Whether a crystal with character `f` is special: f = Σ_{χ ∈ F^+} [χ].
pub fn is_raynaud_from_crystal(f: &CharSum) -> Result<bool> {
    check_crystal_character(f)?;
    Ok(*f == CharSum::primitive_sum(f.group()))
}

/// Whether every primitive isotypic component of the augmentation ideal is
/// invertible, read off exp_F(f). The augmentation ideal drops one copy of
/// the trivial character, which matters only when q = 2.
pub fn raynaud_from_primitive_coefficients(f: &CharSum) -> Result<bool> {
    check_crystal_character(f)?;
    let e = f.exp_f()?;
    Ok(f.group().primitive_set().iter().all(|chi| {
        let unit_part = i64::from(chi.is_trivial());
        e.coeff_of(chi) - unit_part == 1
    }))
}
