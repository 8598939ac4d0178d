//! Scalars of the three coefficient rings: `Z`, `Z/m` and `Z[1/p]`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Descriptor of a coefficient ring.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "param")]
pub enum Ring {
    Integer,
    Mod(u64),
    PLocal(u64),
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ring::Integer => write!(f, "Z"),
            Ring::Mod(m) => write!(f, "Z/{m}"),
            Ring::PLocal(p) => write!(f, "Z[1/{p}]"),
        }
    }
}

/// An exact ring element. Values are kept normalized at all times, so the
/// derived `Eq`/`Hash` are the mathematical equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum RingValue {
    Integer(BigInt),
    /// `residue` is always in `[0, modulus)`.
    ModInt {
        residue: u64,
        modulus: u64,
    },
    /// `numerator / p^pexp`, with `pexp == 0` or `p ∤ numerator`.
    PLocal {
        numerator: BigInt,
        pexp: u32,
        p: u64,
    },
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Inverse of `a` modulo `m`, if it exists. `m = 1` yields `Some(0)`.
pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let e = (a as i128).extended_gcd(&(m as i128));
    if e.gcd != 1 {
        return None;
    }
    Some(e.x.rem_euclid(m as i128) as u64)
}

fn bigint_mod(v: &BigInt, m: u64) -> u64 {
    v.mod_floor(&BigInt::from(m)).to_u64().expect("residue fits in u64")
}

impl RingValue {
    pub fn zero(ring: Ring) -> Self {
        Self::from_i64(ring, 0)
    }

    pub fn one(ring: Ring) -> Self {
        Self::from_i64(ring, 1)
    }

    pub fn from_i64(ring: Ring, v: i64) -> Self {
        Self::from_bigint(ring, BigInt::from(v))
    }

    pub fn from_bigint(ring: Ring, v: BigInt) -> Self {
        match ring {
            Ring::Integer => RingValue::Integer(v),
            Ring::Mod(m) => RingValue::ModInt { residue: bigint_mod(&v, m), modulus: m },
            Ring::PLocal(p) => Self::plocal(v, 0, p),
        }
    }

    /// Builds `numerator / p^pexp` in normal form.
    pub fn plocal(numerator: BigInt, pexp: u32, p: u64) -> Self {
        let mut num = numerator;
        let mut k = pexp;
        if num.is_zero() {
            k = 0;
        } else {
            let pb = BigInt::from(p);
            while k > 0 {
                let (q, r) = num.div_rem(&pb);
                if !r.is_zero() {
                    break;
                }
                num = q;
                k -= 1;
            }
        }
        RingValue::PLocal { numerator: num, pexp: k, p }
    }

    pub fn ring(&self) -> Ring {
        match self {
            RingValue::Integer(_) => Ring::Integer,
            RingValue::ModInt { modulus, .. } => Ring::Mod(*modulus),
            RingValue::PLocal { p, .. } => Ring::PLocal(*p),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            RingValue::Integer(v) => v.is_zero(),
            RingValue::ModInt { residue, .. } => *residue == 0,
            RingValue::PLocal { numerator, .. } => numerator.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        *self == Self::one(self.ring())
    }

    /// Integral values of `Z` or `Z[1/p]`; `None` for fractions and for `Z/m`.
    pub fn as_integer(&self) -> Option<BigInt> {
        match self {
            RingValue::Integer(v) => Some(v.clone()),
            RingValue::PLocal { numerator, pexp: 0, .. } => Some(numerator.clone()),
            _ => None,
        }
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.ring() != other.ring() {
            return Err(Error::RingMismatch(self.ring(), other.ring()));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(self.add_unchecked(other))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(self.add_unchecked(&other.neg()))
    }

    pub fn neg(&self) -> Self {
        match self {
            RingValue::Integer(v) => RingValue::Integer(-v),
            RingValue::ModInt { residue, modulus } => RingValue::ModInt { residue: (modulus - residue) % modulus, modulus: *modulus },
            RingValue::PLocal { numerator, pexp, p } => RingValue::PLocal { numerator: -numerator, pexp: *pexp, p: *p },
        }
    }

    pub(crate) fn add_unchecked(&self, other: &Self) -> Self {
        match (self, other) {
            (RingValue::Integer(a), RingValue::Integer(b)) => RingValue::Integer(a + b),
            (RingValue::ModInt { residue: a, modulus }, RingValue::ModInt { residue: b, .. }) => {
                let m = *modulus as u128;
                RingValue::ModInt { residue: ((*a as u128 + *b as u128) % m) as u64, modulus: *modulus }
            }
            (RingValue::PLocal { numerator: a, pexp: i, p }, RingValue::PLocal { numerator: b, pexp: j, .. }) => {
                let k = (*i).max(*j);
                let pb = BigInt::from(*p);
                let num = a * num_traits::pow(pb.clone(), (k - i) as usize) + b * num_traits::pow(pb, (k - j) as usize);
                Self::plocal(num, k, *p)
            }
            _ => unreachable!("ring kinds checked by caller"),
        }
    }

    pub(crate) fn mul_unchecked(&self, other: &Self) -> Self {
        match (self, other) {
            (RingValue::Integer(a), RingValue::Integer(b)) => RingValue::Integer(a * b),
            (RingValue::ModInt { residue: a, modulus }, RingValue::ModInt { residue: b, .. }) => {
                RingValue::ModInt { residue: ((*a as u128 * *b as u128) % *modulus as u128) as u64, modulus: *modulus }
            }
            (RingValue::PLocal { numerator: a, pexp: i, p }, RingValue::PLocal { numerator: b, pexp: j, .. }) => {
                Self::plocal(a * b, i + j, *p)
            }
            _ => unreachable!("ring kinds checked by caller"),
        }
    }

    /// Multiplicative inverse when the value is a unit (`±1`, a residue
    /// coprime to `m`, or `±p^k`).
    pub fn inverse(&self) -> Option<Self> {
        match self {
            RingValue::Integer(v) => {
                if v.abs().is_one() {
                    Some(self.clone())
                } else {
                    None
                }
            }
            RingValue::ModInt { residue, modulus } => {
                mod_inverse(*residue, *modulus).map(|r| RingValue::ModInt { residue: r, modulus: *modulus })
            }
            RingValue::PLocal { numerator, pexp, p } => {
                let mut rest = numerator.abs();
                if rest.is_zero() {
                    return None;
                }
                let pb = BigInt::from(*p);
                let mut j = 0u32;
                while !rest.is_one() {
                    let (q, r) = rest.div_rem(&pb);
                    if !r.is_zero() {
                        return None;
                    }
                    rest = q;
                    j += 1;
                }
                let mut num = num_traits::pow(pb, *pexp as usize);
                if numerator.is_negative() {
                    num = -num;
                }
                Some(Self::plocal(num, j, *p))
            }
        }
    }

    /// Image under the ring homomorphism onto `Z/m`.
    pub fn reduce_mod(&self, m: u64) -> Result<Self> {
        if m == 0 {
            return Err(Error::Parse("modulus must be at least 1".into()));
        }
        match self {
            RingValue::Integer(v) => Ok(RingValue::ModInt { residue: bigint_mod(v, m), modulus: m }),
            RingValue::ModInt { residue, modulus } => {
                if modulus % m != 0 {
                    return Err(Error::IncompatibleModulus { from: *modulus, to: m });
                }
                Ok(RingValue::ModInt { residue: residue % m, modulus: m })
            }
            RingValue::PLocal { numerator, pexp, p } => {
                let pinv = mod_inverse(p % m, m).ok_or(Error::NonInvertiblePrime { p: *p, modulus: m })?;
                let mut r = bigint_mod(numerator, m) as u128;
                for _ in 0..*pexp {
                    r = r * pinv as u128 % m as u128;
                }
                Ok(RingValue::ModInt { residue: r as u64, modulus: m })
            }
        }
    }

    /// Parses `"n"` or, for `Z[1/p]`, `"n/d"` with `d` a power of `p`.
    pub fn parse(ring: Ring, s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("bad entry `{s}` for ring {ring}"));
        match s.split_once('/') {
            None => {
                let v: BigInt = s.parse().map_err(|_| bad())?;
                Ok(Self::from_bigint(ring, v))
            }
            Some((num, den)) => {
                let Ring::PLocal(p) = ring else {
                    return Err(bad());
                };
                let num: BigInt = num.trim().parse().map_err(|_| bad())?;
                let mut den: u128 = den.trim().parse().map_err(|_| bad())?;
                let mut k = 0u32;
                while den > 1 {
                    if !den.is_multiple_of(p as u128) {
                        return Err(bad());
                    }
                    den /= p as u128;
                    k += 1;
                }
                if den == 0 {
                    return Err(bad());
                }
                Ok(Self::plocal(num, k, p))
            }
        }
    }
}

impl fmt::Display for RingValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingValue::Integer(v) => write!(f, "{v}"),
            RingValue::ModInt { residue, .. } => write!(f, "{residue}"),
            RingValue::PLocal { numerator, pexp: 0, .. } => write!(f, "{numerator}"),
            RingValue::PLocal { numerator, pexp, p } => {
                write!(f, "{numerator}/{}", num_traits::pow(BigInt::from(*p), *pexp as usize))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pl(n: i64, k: u32) -> RingValue {
        RingValue::plocal(BigInt::from(n), k, 2)
    }

    #[test]
    fn half_mod_three_is_two() {
        assert_eq!(pl(1, 1).reduce_mod(3).unwrap(), RingValue::ModInt { residue: 2, modulus: 3 });
    }

    #[test]
    fn reduce_rejects_shared_prime() {
        assert_eq!(pl(1, 1).reduce_mod(6), Err(Error::NonInvertiblePrime { p: 2, modulus: 6 }));
        // integral values still need p invertible: the map Z[1/2] -> Z/6 does not exist
        assert!(pl(3, 0).reduce_mod(4).is_err());
    }

    #[test]
    fn plocal_normal_form() {
        assert_eq!(pl(4, 2), pl(1, 0));
        assert_eq!(pl(6, 3), pl(3, 2));
        assert_eq!(pl(0, 5), RingValue::PLocal { numerator: BigInt::from(0), pexp: 0, p: 2 });
        assert_eq!(pl(1, 1).try_add(&pl(1, 1)).unwrap(), pl(1, 0));
    }

    #[test]
    fn units() {
        assert_eq!(pl(4, 0).inverse(), Some(pl(1, 2)));
        assert_eq!(pl(-1, 3).inverse(), Some(pl(-8, 0)));
        assert_eq!(pl(3, 0).inverse(), None);
        assert_eq!(RingValue::from_i64(Ring::Integer, -1).inverse(), Some(RingValue::from_i64(Ring::Integer, -1)));
        assert_eq!(RingValue::from_i64(Ring::Integer, 2).inverse(), None);
        assert_eq!(RingValue::from_i64(Ring::Mod(9), 3).inverse(), None);
        assert_eq!(RingValue::from_i64(Ring::Mod(9), 2).inverse(), Some(RingValue::from_i64(Ring::Mod(9), 5)));
    }

    #[test]
    fn parse_and_display() {
        let r = Ring::PLocal(3);
        assert_eq!(RingValue::parse(r, "-2/9").unwrap(), RingValue::plocal(BigInt::from(-2), 2, 3));
        assert_eq!(RingValue::parse(r, "-2/9").unwrap().to_string(), "-2/9");
        assert!(RingValue::parse(r, "1/2").is_err());
        assert!(RingValue::parse(Ring::Integer, "1/2").is_err());
        assert_eq!(RingValue::parse(Ring::Mod(5), "-1").unwrap().to_string(), "4");
    }

    #[test]
    fn mismatched_rings() {
        let a = RingValue::one(Ring::Integer);
        let b = RingValue::one(Ring::Mod(3));
        assert!(matches!(a.try_add(&b), Err(Error::RingMismatch(..))));
    }

    fn plocal_strategy() -> impl Strategy<Value = RingValue> {
        (-1000i64..1000, 0u32..6).prop_map(|(n, k)| RingValue::plocal(BigInt::from(n), k, 3))
    }

    proptest! {
        #[test]
        fn plocal_ring_axioms(a in plocal_strategy(), b in plocal_strategy(), c in plocal_strategy()) {
            let ab_c = a.try_mul(&b).unwrap().try_mul(&c).unwrap();
            let a_bc = a.try_mul(&b.try_mul(&c).unwrap()).unwrap();
            prop_assert_eq!(ab_c, a_bc);
            let lhs = a.try_mul(&b.try_add(&c).unwrap()).unwrap();
            let rhs = a.try_mul(&b).unwrap().try_add(&a.try_mul(&c).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
            prop_assert_eq!(a.try_sub(&a).unwrap(), RingValue::zero(Ring::PLocal(3)));
        }

        #[test]
        fn renormalizing_is_a_noop(a in plocal_strategy()) {
            if let RingValue::PLocal { numerator, pexp, p } = a.clone() {
                prop_assert_eq!(RingValue::plocal(numerator, pexp, p), a);
            }
        }

        #[test]
        fn reduction_is_a_ring_hom(a in plocal_strategy(), b in plocal_strategy(), m in 1u64..40) {
            prop_assume!(m % 3 != 0);
            let sum = a.try_add(&b).unwrap().reduce_mod(m).unwrap();
            let prod = a.try_mul(&b).unwrap().reduce_mod(m).unwrap();
            let (ra, rb) = (a.reduce_mod(m).unwrap(), b.reduce_mod(m).unwrap());
            prop_assert_eq!(sum, ra.try_add(&rb).unwrap());
            prop_assert_eq!(prod, ra.try_mul(&rb).unwrap());
        }

        #[test]
        fn modint_stays_reduced(a in 0u64..1000, b in 0u64..1000, m in 1u64..50) {
            let x = RingValue::from_i64(Ring::Mod(m), a as i64).try_mul(&RingValue::from_i64(Ring::Mod(m), b as i64)).unwrap();
            match x {
                RingValue::ModInt { residue, modulus } => prop_assert!(residue < modulus),
                _ => prop_assert!(false),
            }
        }
    }
}
