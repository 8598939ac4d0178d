use std::fmt;

use crate::error::{Error, Result};
use crate::exact::ring::{Ring, RingValue};

/// Square matrix with entries in a single exact ring, stored row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExactMatrix {
    n: usize,
    ring: Ring,
    entries: Vec<RingValue>,
}

impl ExactMatrix {
    pub fn identity(n: usize, ring: Ring) -> Self {
        let mut entries = vec![RingValue::zero(ring); n * n];
        for i in 0..n {
            entries[i * n + i] = RingValue::one(ring);
        }
        ExactMatrix { n, ring, entries }
    }

    pub fn from_entries(n: usize, ring: Ring, entries: Vec<RingValue>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch(entries.len(), n * n));
        }
        if let Some(bad) = entries.iter().find(|v| v.ring() != ring) {
            return Err(Error::RingMismatch(bad.ring(), ring));
        }
        Ok(ExactMatrix { n, ring, entries })
    }

    pub fn from_i64_rows(ring: Ring, rows: &[&[i64]]) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch(row.len(), n));
            }
            entries.extend(row.iter().map(|&v| RingValue::from_i64(ring, v)));
        }
        Self::from_entries(n, ring, entries)
    }

    /// `I + value·E_{ij}` (0-based indices).
    pub fn elementary(n: usize, i: usize, j: usize, value: RingValue) -> Self {
        let ring = value.ring();
        let mut m = Self::identity(n, ring);
        let slot = &mut m.entries[i * n + j];
        *slot = slot.add_unchecked(&value);
        m
    }

    pub fn diagonal(diag: Vec<RingValue>) -> Result<Self> {
        let n = diag.len();
        let ring = diag.first().map(RingValue::ring).unwrap_or(Ring::Integer);
        let mut m = Self::identity(n, ring);
        for (i, v) in diag.into_iter().enumerate() {
            if v.ring() != ring {
                return Err(Error::RingMismatch(v.ring(), ring));
            }
            m.entries[i * n + i] = v;
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn get(&self, i: usize, j: usize) -> &RingValue {
        &self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[RingValue] {
        &self.entries
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.n, self.ring)
    }

    pub fn is_upper_triangular(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j).is_zero()))
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(self.n, other.n));
        }
        if self.ring != other.ring {
            return Err(Error::RingMismatch(self.ring, other.ring));
        }
        Ok(())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let n = self.n;
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = RingValue::zero(self.ring);
                for k in 0..n {
                    let a = self.get(i, k);
                    let b = other.get(k, j);
                    if a.is_zero() || b.is_zero() {
                        continue;
                    }
                    acc = acc.add_unchecked(&a.mul_unchecked(b));
                }
                entries.push(acc);
            }
        }
        Ok(ExactMatrix { n, ring: self.ring, entries })
    }

    /// Inverse of an upper-triangular matrix whose diagonal entries are units,
    /// by back-substitution.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_upper_triangular() {
            return Err(Error::NotUpperTriangular);
        }
        let n = self.n;
        let mut diag_inv = Vec::with_capacity(n);
        for i in 0..n {
            let d = self.get(i, i);
            diag_inv.push(d.inverse().ok_or_else(|| Error::NotInvertible(d.to_string()))?);
        }
        let mut x = vec![RingValue::zero(self.ring); n * n];
        for j in 0..n {
            x[j * n + j] = diag_inv[j].clone();
            for i in (0..j).rev() {
                let mut acc = RingValue::zero(self.ring);
                for k in (i + 1)..=j {
                    let a = self.get(i, k);
                    if a.is_zero() {
                        continue;
                    }
                    acc = acc.add_unchecked(&a.mul_unchecked(&x[k * n + j]));
                }
                x[i * n + j] = diag_inv[i].mul_unchecked(&acc).neg();
            }
        }
        Ok(ExactMatrix { n, ring: self.ring, entries: x })
    }

    pub fn pow(&self, k: i64) -> Result<Self> {
        let mut base = if k < 0 { self.inverse()? } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = Self::identity(self.n, self.ring);
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

    /// `g · self · g⁻¹`.
    pub fn conjugate_by(&self, g: &Self) -> Result<Self> {
        g.mul(self)?.mul(&g.inverse()?)
    }

    /// `a b a⁻¹ b⁻¹`.
    pub fn commutator(a: &Self, b: &Self) -> Result<Self> {
        a.mul(b)?.mul(&a.inverse()?)?.mul(&b.inverse()?)
    }

    pub fn reduce_mod(&self, m: u64) -> Result<Self> {
        let entries = self.entries.iter().map(|v| v.reduce_mod(m)).collect::<Result<Vec<_>>>()?;
        Ok(ExactMatrix { n: self.n, ring: Ring::Mod(m), entries })
    }

    /// Entries as plain residues; only meaningful for `Z/m` matrices.
    pub fn residues(&self) -> Option<Vec<u32>> {
        self.entries
            .iter()
            .map(|v| match v {
                RingValue::ModInt { residue, .. } => u32::try_from(*residue).ok(),
                _ => None,
            })
            .collect()
    }

    pub fn from_residues(n: usize, m: u64, residues: &[u32]) -> Self {
        let entries = residues.iter().map(|&r| RingValue::ModInt { residue: r as u64, modulus: m }).collect();
        ExactMatrix { n, ring: Ring::Mod(m), entries }
    }

    /// Entries formatted as strings, row by row.
    pub fn to_rows(&self) -> Vec<Vec<String>> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.get(i, j).to_string()).collect()).collect()
    }
}

impl fmt::Display for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self.to_rows().into_iter().map(|r| r.join(" ")).collect();
        write!(f, "[{}]", rows.join("; "))
    }
}

pub fn mat_mul(a: &ExactMatrix, b: &ExactMatrix) -> Result<ExactMatrix> {
    a.mul(b)
}

pub fn mat_inv(a: &ExactMatrix) -> Result<ExactMatrix> {
    a.inverse()
}

pub fn reduce_mod(a: &ExactMatrix, m: u64) -> Result<ExactMatrix> {
    a.reduce_mod(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use proptest::prelude::*;

    fn heis(a: i64, b: i64, c: i64) -> ExactMatrix {
        ExactMatrix::from_i64_rows(Ring::Integer, &[&[1, a, c], &[0, 1, b], &[0, 0, 1]]).unwrap()
    }

    fn pl(n: i64, k: u32) -> RingValue {
        RingValue::plocal(BigInt::from(n), k, 2)
    }

    #[test]
    fn identity_product() {
        let i = ExactMatrix::identity(4, Ring::PLocal(5));
        assert_eq!(i.mul(&i).unwrap(), i);
    }

    #[test]
    fn heisenberg_products_do_not_commute() {
        let x = heis(1, 0, 0);
        let y = heis(0, 1, 0);
        assert_eq!(*x.mul(&y).unwrap().get(0, 2), RingValue::from_i64(Ring::Integer, 1));
        assert_eq!(*y.mul(&x).unwrap().get(0, 2), RingValue::from_i64(Ring::Integer, 0));
    }

    #[test]
    fn abels_diagonal_times_corner() {
        let r = Ring::PLocal(2);
        let d = ExactMatrix::diagonal(vec![pl(1, 0), pl(2, 0), pl(2, 0), pl(1, 0)]).unwrap();
        let u = ExactMatrix::elementary(4, 0, 3, pl(1, 1));
        let prod = d.mul(&u).unwrap();
        assert_eq!(*prod.get(0, 3), pl(1, 1));
        assert_eq!(prod.ring(), r);
    }

    #[test]
    fn inverses() {
        let i = ExactMatrix::identity(3, Ring::Integer);
        assert_eq!(i.inverse().unwrap(), i);
        assert_eq!(heis(1, 0, 0).inverse().unwrap(), heis(-1, 0, 0));
        let d = ExactMatrix::diagonal(vec![pl(1, 0), pl(2, 0), pl(2, 0), pl(1, 0)]).unwrap();
        let expected = ExactMatrix::diagonal(vec![pl(1, 0), pl(1, 1), pl(1, 1), pl(1, 0)]).unwrap();
        assert_eq!(d.inverse().unwrap(), expected);
        assert!(d.mul(&expected).unwrap().is_identity());
    }

    #[test]
    fn inverse_errors() {
        let two = ExactMatrix::from_i64_rows(Ring::Integer, &[&[2, 0], &[0, 1]]).unwrap();
        assert!(matches!(two.inverse(), Err(Error::NotInvertible(_))));
        let lower = ExactMatrix::from_i64_rows(Ring::Integer, &[&[1, 0], &[1, 1]]).unwrap();
        assert_eq!(lower.inverse(), Err(Error::NotUpperTriangular));
    }

    #[test]
    fn mismatches() {
        let a = ExactMatrix::identity(3, Ring::Integer);
        assert!(matches!(a.mul(&ExactMatrix::identity(2, Ring::Integer)), Err(Error::DimensionMismatch(3, 2))));
        assert!(matches!(a.mul(&ExactMatrix::identity(3, Ring::Mod(4))), Err(Error::RingMismatch(..))));
    }

    #[test]
    fn reduce_identity_and_half() {
        let i = ExactMatrix::identity(3, Ring::Integer);
        assert_eq!(i.reduce_mod(7).unwrap(), ExactMatrix::identity(3, Ring::Mod(7)));
        let u = ExactMatrix::elementary(4, 0, 3, pl(1, 1)).reduce_mod(3).unwrap();
        assert_eq!(u.get(0, 3).to_string(), "2");
    }

    #[test]
    fn reduce_is_multiplicative_on_seeded_heisenberg_pairs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let mut r = || rng.random_range(-40i64..40);
            let a = heis(r(), r(), r());
            let b = heis(r(), r(), r());
            let lhs = a.mul(&b).unwrap().reduce_mod(5).unwrap();
            let rhs = a.reduce_mod(5).unwrap().mul(&b.reduce_mod(5).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    fn abels_like() -> impl Strategy<Value = ExactMatrix> {
        (prop::collection::vec((-20i64..20, 0u32..3), 6), 0u32..3, 0u32..3, any::<bool>()).prop_map(|(ups, k, l, inv)| {
            let mut diag = vec![pl(1, 0), pl(1 << k, 0), pl(1 << l, 0), pl(1, 0)];
            if inv {
                diag[1] = pl(1, k);
            }
            let mut m = ExactMatrix::diagonal(diag).unwrap();
            let mut it = ups.into_iter();
            for i in 0..4 {
                for j in (i + 1)..4 {
                    let (n, e) = it.next().unwrap();
                    m.entries[i * 4 + j] = pl(n, e);
                }
            }
            m
        })
    }

    proptest! {
        #[test]
        fn inverse_is_exact(a in abels_like()) {
            let inv = a.inverse().unwrap();
            prop_assert!(a.mul(&inv).unwrap().is_identity());
            prop_assert!(inv.mul(&a).unwrap().is_identity());
        }

        #[test]
        fn product_is_associative(a in abels_like(), b in abels_like(), c in abels_like()) {
            prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
        }

        #[test]
        fn reduce_commutes_with_products(a in abels_like(), b in abels_like(), m in 1u64..30) {
            prop_assume!(m % 2 == 1);
            let lhs = a.mul(&b).unwrap().reduce_mod(m).unwrap();
            let rhs = a.reduce_mod(m).unwrap().mul(&b.reduce_mod(m).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn pow_agrees_with_repeated_product(a in abels_like(), k in -4i64..5) {
            let mut expected = ExactMatrix::identity(4, Ring::PLocal(2));
            let step = if k < 0 { a.inverse().unwrap() } else { a.clone() };
            for _ in 0..k.unsigned_abs() {
                expected = expected.mul(&step).unwrap();
            }
            prop_assert_eq!(a.pow(k).unwrap(), expected);
        }
    }
}
