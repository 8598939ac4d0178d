use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::characters::character::Character;
use crate::characters::root::{Angle, RootOfUnity};
use crate::error::{Error, Result};
use crate::exact::ExactMatrix;
use crate::quotients::{central_images_compatible, FiniteQuotient};

/// `k0 = ⌈2π·s·(L+1)/ε⌉`: for every `k ≥ k0` the `k`-th roots of unity are
/// an `ε/(s(L+1))`-net of the circle in chord distance.
pub fn k0_for(epsilon: f64, s: usize, l: u64) -> u64 {
    assert!(epsilon > 0.0, "epsilon must be positive");
    let k = (TAU * s.max(1) as f64 * (l as f64 + 1.0) / epsilon).ceil();
    (k as u64).max(1)
}

/// A character of the image of `C` in a finite quotient, stored as exact
/// root-of-unity values on every element of that image.
#[derive(Clone, Debug)]
pub struct QuotientCharacter {
    quotient: Arc<FiniteQuotient>,
    /// Image of each basis direction of `C`.
    basis_images: Vec<u32>,
    /// Order `k_i` of each basis image.
    orders: Vec<u64>,
    /// Value on each basis image; its denominator divides `orders[i]`.
    basis_values: Vec<RootOfUnity>,
    /// Value indexed by position in the quotient's `center_image`.
    values: Vec<RootOfUnity>,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct QuotientCharacterSummary {
    pub modulus: u64,
    pub orders: Vec<u64>,
    /// `l_i/k_i` per basis direction.
    pub exponents: Vec<RootOfUnity>,
}

/// Images and orders of the basis directions of `C` in `q`.
fn basis_data(q: &FiniteQuotient) -> Result<(Vec<u32>, Vec<u64>)> {
    let group = q.group();
    let rank = group.center().structure.rank();
    let mut images = Vec::with_capacity(rank);
    for i in 0..rank {
        images.push(q.image_of(&group.basis_element(i)?)?);
    }
    let orders = images.iter().map(|&b| q.element_order(b)).collect();
    Ok((images, orders))
}

impl QuotientCharacter {
    /// Builds the character with the given values on the basis images,
    /// checking exhaustively that it is well defined on the image of `C`.
    pub fn from_basis_values(quotient: Arc<FiniteQuotient>, basis_values: Vec<RootOfUnity>) -> Result<Self> {
        let (basis_images, orders) = basis_data(&quotient)?;
        if basis_values.len() != basis_images.len() {
            return Err(Error::BasisError(format!("{} values for {} basis directions", basis_values.len(), basis_images.len())));
        }
        for (v, &k) in basis_values.iter().zip(&orders) {
            if k % v.den() != 0 {
                return Err(Error::PreconditionFailed(format!("value {v} is not a {k}-th root of unity")));
            }
        }
        let size = quotient.center_image().len();
        let mut values: Vec<Option<RootOfUnity>> = vec![None; size];
        // odometer over exponent vectors n_i ∈ [0, k_i)
        let rank = basis_images.len();
        let mut digits = vec![0u64; rank];
        let mut elem = quotient.identity();
        let mut value = RootOfUnity::ONE;
        loop {
            let pos = quotient.center_position(elem).ok_or_else(|| Error::InvalidGroup("basis image lies outside the image of C".into()))?
                as usize;
            match values[pos] {
                None => values[pos] = Some(value),
                Some(v) if v == value => {}
                Some(v) => {
                    return Err(Error::PreconditionFailed(format!(
                        "character is not well defined mod {}: element has values {v} and {value}",
                        quotient.modulus()
                    )))
                }
            }
            let mut i = 0;
            loop {
                if i == rank {
                    break;
                }
                digits[i] += 1;
                elem = quotient.mul(elem, basis_images[i]);
                value = value * basis_values[i];
                if digits[i] < orders[i] {
                    break;
                }
                // b_i^{k_i} = e and the value's order divides k_i
                digits[i] = 0;
                i += 1;
            }
            if i == rank {
                break;
            }
        }
        let values = values
            .into_iter()
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::InvalidGroup(format!("basis images do not generate the image of C mod {}", quotient.modulus())))?;
        Ok(QuotientCharacter { quotient, basis_images, orders, basis_values, values })
    }

    /// Restricts a character with rational angles to the image of `C`.
    pub fn from_exact(quotient: Arc<FiniteQuotient>, lambda: &Character) -> Result<Self> {
        let mut values: Vec<RootOfUnity> = lambda
            .free
            .iter()
            .map(|a| a.as_root().ok_or_else(|| Error::PreconditionFailed(format!("angle {a} is not rational"))))
            .collect::<Result<_>>()?;
        values.extend(lambda.torsion.iter().zip(&lambda.structure.torsion).map(|(&e, &t)| RootOfUnity::new(e as i128, t)));
        Self::from_basis_values(quotient, values)
    }

    /// Nearest-root approximation of `lambda`: each free direction takes the
    /// nearest `k_i`-th root, torsion directions are copied exactly.
    pub fn approximate(quotient: Arc<FiniteQuotient>, lambda: &Character) -> Result<Self> {
        let (_, orders) = basis_data(&quotient)?;
        let s = lambda.free.len();
        let mut values = Vec::with_capacity(orders.len());
        for (angle, &k) in lambda.free.iter().zip(&orders) {
            values.push(RootOfUnity::new(angle.nearest_root(k) as i128, k));
        }
        for ((&e, &t), &k) in lambda.torsion.iter().zip(&lambda.structure.torsion).zip(&orders[s..]) {
            if k != t {
                return Err(Error::PreconditionFailed(format!(
                    "torsion direction of order {t} collapses to order {k} mod {}",
                    quotient.modulus()
                )));
            }
            values.push(RootOfUnity::new(e as i128, t));
        }
        Self::from_basis_values(quotient, values)
    }

    pub fn quotient(&self) -> &Arc<FiniteQuotient> {
        &self.quotient
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn basis_images(&self) -> &[u32] {
        &self.basis_images
    }

    pub fn basis_values(&self) -> &[RootOfUnity] {
        &self.basis_values
    }

    /// Exact value at a quotient element, `None` outside the image of `C`.
    pub fn value_at(&self, e: u32) -> Option<RootOfUnity> {
        self.quotient.center_position(e).map(|p| self.values[p as usize])
    }

    pub fn complex_at(&self, e: u32) -> Option<Complex64> {
        self.value_at(e).map(|r| r.to_complex())
    }

    /// The same values as a character of `C` with rational angles.
    pub fn as_character(&self) -> Character {
        let structure = self.quotient.group().center().structure.clone();
        let s = structure.free_rank;
        let free = self.basis_values[..s].iter().map(|r| Angle::rational(r.num() as i64, r.den())).collect();
        let torsion = self.basis_values[s..].iter().zip(&structure.torsion).map(|(r, &t)| r.num() * (t / r.den())).collect();
        Character { structure, free, torsion }
    }

    pub fn summary(&self) -> QuotientCharacterSummary {
        QuotientCharacterSummary { modulus: self.quotient.modulus(), orders: self.orders.clone(), exponents: self.basis_values.clone() }
    }
}

/// Output of [`build_compatible_characters`] with its error certificate.
#[derive(Clone, Debug)]
pub struct CompatibleCharacters {
    pub a: QuotientCharacter,
    pub b: QuotientCharacter,
    /// The guaranteed bound `k0_for(ε, s, L)`.
    pub k0: u64,
    /// `|χ^A(f^A(h)) − λ(h)|` recomputed for each requested generator.
    pub errors: Vec<f64>,
    pub max_error: f64,
}

/// Characters of the images of `C` in `qa` and `qb` that approximate `λ` on
/// `c_generators` within `epsilon` and agree under `f^A(h) ↦ f^B(h)`.
///
/// Accepted when every basis order reaches `k0`, or failing that when the
/// recomputed error certificate is still within `epsilon`.
pub fn build_compatible_characters(
    qa: &Arc<FiniteQuotient>,
    qb: &Arc<FiniteQuotient>,
    lambda: &Character,
    epsilon: f64,
    c_generators: &[ExactMatrix],
) -> Result<CompatibleCharacters> {
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::PreconditionFailed("epsilon must be positive".into()));
    }
    if !central_images_compatible(qa, qb) {
        return Err(Error::IncompatibleImages(format!("images of C mod {} and mod {} do not correspond", qa.modulus(), qb.modulus())));
    }
    let group = qa.group();
    let s = lambda.free.len();
    let mut l = 0u64;
    let mut coords = Vec::with_capacity(c_generators.len());
    for h in c_generators {
        let c = group.center_coordinates(h).ok_or_else(|| Error::PreconditionFailed(format!("{h} is not in the central subgroup")))?;
        for v in &c.free {
            l = l.max(u64::try_from(v.magnitude()).unwrap_or(u64::MAX));
        }
        coords.push(c);
    }
    let k0 = if s == 0 { 1 } else { k0_for(epsilon, s, l) };
    let a = QuotientCharacter::approximate(qa.clone(), lambda)?;
    if a.orders != basis_data(qb)?.1 {
        return Err(Error::IncompatibleImages("basis images have different orders".into()));
    }
    let b = QuotientCharacter::from_basis_values(qb.clone(), a.basis_values.clone())?;

    // exponent-level compatibility on the whole image of C
    for &ea in qa.center_image() {
        let eb = transport(qa, qb, &a, ea)?;
        if a.value_at(ea) != b.value_at(eb) {
            return Err(Error::IncompatibleImages(format!("values differ at element {ea}")));
        }
    }

    let mut errors = Vec::with_capacity(c_generators.len());
    for (h, c) in c_generators.iter().zip(&coords) {
        let chi = a.complex_at(qa.image_of(h)?).expect("central element maps into the image of C");
        errors.push((chi - lambda.value(c)?).norm());
    }
    let max_error = errors.iter().copied().fold(0.0, f64::max);
    let orders_ok = a.orders[..s].iter().all(|&k| k >= k0);
    if !orders_ok && max_error > epsilon {
        return Err(Error::PreconditionFailed(format!(
            "image orders {:?} below k0 = {k0} and error {max_error:.3e} exceeds {epsilon}",
            &a.orders[..s]
        )));
    }
    Ok(CompatibleCharacters { a, b, k0, errors, max_error })
}

/// Image in `qb` of an element of the `C`-image of `qa`, via basis exponents.
fn transport(qa: &FiniteQuotient, qb: &FiniteQuotient, chi: &QuotientCharacter, e: u32) -> Result<u32> {
    let (images_b, _) = basis_data(qb)?;
    // search exponent vector for e by odometer; C-images are small
    let rank = chi.basis_images.len();
    let mut digits = vec![0u64; rank];
    let mut ea = qa.identity();
    let mut eb = qb.identity();
    loop {
        if ea == e {
            return Ok(eb);
        }
        let mut i = 0;
        loop {
            if i == rank {
                return Err(Error::IncompatibleImages(format!("element {e} not reached from basis images")));
            }
            digits[i] += 1;
            ea = qa.mul(ea, chi.basis_images[i]);
            eb = qb.mul(eb, images_b[i]);
            if digits[i] < chi.orders[i] {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::heisenberg;
    use crate::quotients::{enumerate_center_quotient, enumerate_quotient, DEFAULT_CAP};

    fn heis_q(m: u64) -> Arc<FiniteQuotient> {
        Arc::new(enumerate_quotient(&Arc::new(heisenberg()), m, DEFAULT_CAP).unwrap())
    }

    fn lambda(angle: Angle) -> Character {
        Character::new(crate::groups::AbelianStructure { free_rank: 1, torsion: vec![] }, vec![angle], vec![]).unwrap()
    }

    #[test]
    fn k0_examples() {
        assert_eq!(k0_for(TAU, 1, 0), 1);
        assert_eq!(k0_for(0.01, 1, 0), 629);
        assert_eq!(k0_for(0.02, 1, 0), 315);
        for e in [0.3, 0.05, 0.001] {
            assert!(k0_for(e / 2.0, 2, 3) >= k0_for(e, 2, 3));
        }
    }

    #[test]
    fn k0_is_a_net() {
        // chord distance to nearest k-th root ≤ ε/(s(L+1)) for sampled angles
        let (eps, s, l) = (0.05, 2, 1);
        let k = k0_for(eps, s, l);
        for i in 0..1000 {
            let a = Angle::Real(i as f64 / 1000.0 + 0.000_37);
            let r = RootOfUnity::new(a.nearest_root(k) as i128, k).to_complex();
            let d = (r - crate::characters::cis_turns(a.turns())).norm();
            assert!(d <= eps / (s as f64 * (l as f64 + 1.0)));
        }
    }

    #[test]
    fn exact_third_root_mod_three() {
        let q = heis_q(3);
        let g = q.group().clone();
        let z = g.generator("z").unwrap().clone();
        let cc = build_compatible_characters(&q, &q, &lambda(Angle::rational(1, 3)), 0.1, std::slice::from_ref(&z)).unwrap();
        assert_eq!(cc.max_error, 0.0);
        assert_eq!(cc.a.value_at(q.image_of(&z).unwrap()), Some(RootOfUnity::new(1, 3)));
        assert_eq!(cc.a.value_at(q.identity()), Some(RootOfUnity::ONE));
        assert_eq!(cc.a.basis_values(), cc.b.basis_values());
    }

    #[test]
    fn irrational_angle_mod_315() {
        // the full quotient has order 315³; the image of C suffices here
        let q = Arc::new(enumerate_center_quotient(&Arc::new(heisenberg()), 315, DEFAULT_CAP).unwrap());
        assert_eq!(q.order(), 315);
        let z = q.group().generator("z").unwrap().clone();
        let theta = std::f64::consts::SQRT_2 - 1.0;
        let cc = build_compatible_characters(&q, &q, &lambda(Angle::Real(theta)), 0.02, &[z]).unwrap();
        // z has coordinate 1, so L = 1 and the guaranteed bound is larger than 315
        assert_eq!(cc.k0, 629);
        assert!(cc.max_error <= 0.02);
        // independent oracle: brute-force nearest root
        let best = (0..315)
            .map(|l| (RootOfUnity::new(l, 315).to_complex() - crate::characters::cis_turns(theta)).norm())
            .fold(f64::INFINITY, f64::min);
        assert!((cc.max_error - best).abs() < 1e-12);
    }

    #[test]
    fn small_order_rejected_when_error_too_large() {
        let q = heis_q(2);
        let z = q.group().generator("z").unwrap().clone();
        let err = build_compatible_characters(&q, &q, &lambda(Angle::Real(0.25)), 0.1, &[z]).unwrap_err();
        assert!(matches!(err, Error::PreconditionFailed(_)));
    }

    #[test]
    fn multiplicative_on_center_image() {
        let q = heis_q(6);
        let chi = QuotientCharacter::approximate(q.clone(), &lambda(Angle::rational(1, 6))).unwrap();
        for &a in q.center_image() {
            for &b in q.center_image() {
                assert_eq!(chi.value_at(q.mul(a, b)), Some(chi.value_at(a).unwrap() * chi.value_at(b).unwrap()));
            }
        }
        assert_eq!(chi.value_at(q.image_of(q.group().generator("x").unwrap()).unwrap()), None);
    }

    #[test]
    fn ill_defined_exact_character_rejected() {
        // 1/3 is not a character of Z/2
        let q = heis_q(2);
        assert!(QuotientCharacter::from_exact(q, &lambda(Angle::rational(1, 3))).is_err());
        let q = heis_q(6);
        let chi = QuotientCharacter::from_exact(q.clone(), &lambda(Angle::rational(1, 3))).unwrap();
        assert_eq!(chi.as_character().free, vec![Angle::rational(1, 3)]);
    }

    #[test]
    fn different_orders_are_incompatible() {
        let (a, b) = (heis_q(2), heis_q(3));
        let r = build_compatible_characters(&a, &b, &lambda(Angle::rational(0, 1)), 1.0, &[]);
        assert!(matches!(r, Err(Error::IncompatibleImages(_))));
    }
}
