//! The example groups: the integer Heisenberg group and Abels' group over
//! `Z[1/p]`.

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::exact::{is_prime, ExactMatrix, Ring, RingValue};
use crate::groups::predicate::{Coordinates, ShapePredicate};
use crate::groups::spec::{AbelianStructure, CentralSubgroup, GroupSpec, NamedElement};

/// 3×3 upper unitriangular integer matrices with `x = I+E12`, `y = I+E23`,
/// `z = I+E13` and `C = ⟨z⟩ ≅ Z`.
pub fn heisenberg() -> GroupSpec {
    let r = Ring::Integer;
    let one = RingValue::one(r);
    let x = ExactMatrix::elementary(3, 0, 1, one.clone());
    let y = ExactMatrix::elementary(3, 1, 2, one.clone());
    let z = ExactMatrix::elementary(3, 0, 2, one);
    let center = CentralSubgroup {
        generators: vec![NamedElement::new("z", z.clone())],
        predicate: ShapePredicate::UnipotentEntries { positions: vec![(0, 2)] },
        structure: AbelianStructure { free_rank: 1, torsion: vec![] },
        coordinates: vec![Coordinates { free: vec![BigInt::from(1)], torsion: vec![] }],
    };
    GroupSpec::new("heisenberg", r, 3, vec![NamedElement::new("x", x), NamedElement::new("y", y), NamedElement::new("z", z)], center)
        .expect("heisenberg group is valid")
}

/// Abels' group: 4×4 upper-triangular matrices over `Z[1/p]` with diagonal
/// `(1, p^k, p^n, 1)`, generated by `d1 = diag(1,p,1,1)`, `d2 = diag(1,1,p,1)`
/// and the elementary unipotents `u_ij = I+E_ij`. The central subgroup is
/// `N = {I + x·E14 : x ∈ Z}`.
pub fn abels(p: u64) -> Result<GroupSpec> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let r = Ring::PLocal(p);
    let one = RingValue::one(r);
    let pv = RingValue::from_i64(r, p as i64);
    let mut gens = Vec::new();
    for k in [1, 2] {
        let mut diag = vec![one.clone(); 4];
        diag[k] = pv.clone();
        gens.push(NamedElement::new(format!("d{k}"), ExactMatrix::diagonal(diag)?));
    }
    for i in 0..4 {
        for j in (i + 1)..4 {
            gens.push(NamedElement::new(format!("u{}{}", i + 1, j + 1), ExactMatrix::elementary(4, i, j, one.clone())));
        }
    }
    let center = CentralSubgroup {
        generators: vec![NamedElement::new("n", ExactMatrix::elementary(4, 0, 3, one))],
        predicate: ShapePredicate::UnipotentEntries { positions: vec![(0, 3)] },
        structure: AbelianStructure { free_rank: 1, torsion: vec![] },
        coordinates: vec![Coordinates { free: vec![BigInt::from(1)], torsion: vec![] }],
    };
    GroupSpec::new(format!("abels-{p}"), r, 4, gens, center)
}

/// `diag(1, p, p, 1)`, whose nonzero powers avoid `N`.
pub fn abels_g0(p: u64) -> ExactMatrix {
    let r = Ring::PLocal(p);
    let pv = RingValue::from_i64(r, p as i64);
    ExactMatrix::diagonal(vec![RingValue::one(r), pv.clone(), pv, RingValue::one(r)]).expect("same ring")
}

/// `I + (1/p)·E14`, an element outside `N` whose images in every congruence
/// quotient land inside the image of `N`.
pub fn abels_x0(p: u64) -> ExactMatrix {
    ExactMatrix::elementary(4, 0, 3, RingValue::plocal(BigInt::from(1), 1, p))
}

/// Resolves `heisenberg`, `abels` (p = 2) or `abels:<p>`.
pub fn builtin(name: &str) -> Result<GroupSpec> {
    match name {
        "heisenberg" => Ok(heisenberg()),
        "abels" => abels(2),
        _ => match name.strip_prefix("abels:").or_else(|| name.strip_prefix("abels-")) {
            Some(p) => abels(p.parse().map_err(|_| Error::Parse(format!("bad prime in `{name}`")))?),
            None => Err(Error::Config(format!("unknown built-in group `{name}`"))),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{evaluate_word, GroupWord};

    #[test]
    fn heisenberg_commutator_is_z() {
        let g = heisenberg();
        let (x, y, z) = (g.generator("x").unwrap(), g.generator("y").unwrap(), g.generator("z").unwrap());
        assert_eq!(ExactMatrix::commutator(x, y).unwrap(), *z);
        assert!(ExactMatrix::commutator(z, x).unwrap().is_identity());
        assert!(ExactMatrix::commutator(z, y).unwrap().is_identity());
    }

    #[test]
    fn heisenberg_predicate() {
        let g = heisenberg();
        assert!(g.in_center(&g.generator_power("z", 5).unwrap()));
        assert!(!g.in_center(g.generator("x").unwrap()));
    }

    #[test]
    fn word_evaluation() {
        let g = heisenberg();
        assert!(evaluate_word(&g, &GroupWord::parse("").unwrap()).unwrap().is_identity());
        let comm = evaluate_word(&g, &GroupWord::parse("x y x^-1 y^-1").unwrap()).unwrap();
        assert_eq!(comm, *g.generator("z").unwrap());
        let z3 = evaluate_word(&g, &GroupWord::parse("z^3").unwrap()).unwrap();
        assert_eq!(z3, ExactMatrix::elementary(3, 0, 2, RingValue::from_i64(Ring::Integer, 3)));
        assert_eq!(evaluate_word(&g, &GroupWord::parse("w").unwrap()), Err(Error::UnknownGenerator("w".into())));
    }

    #[test]
    fn abels_center_is_fixed_by_diagonal_conjugation() {
        let g = abels(2).unwrap();
        let n = g.generator("n").unwrap();
        let g0 = abels_g0(2);
        assert_eq!(n.conjugate_by(&g0).unwrap(), *n);
        for gen in g.generators() {
            assert!(ExactMatrix::commutator(n, &gen.matrix).unwrap().is_identity());
        }
    }

    #[test]
    fn abels_predicate_and_g0_powers() {
        let g = abels(3).unwrap();
        let seven = ExactMatrix::elementary(4, 0, 3, RingValue::from_i64(Ring::PLocal(3), 7));
        assert!(g.in_center(&seven));
        assert!(!g.in_center(&abels_x0(3)));
        let g0 = abels_g0(3);
        for k in (-6..=6).filter(|&k| k != 0) {
            assert!(!g.in_center(&g0.pow(k).unwrap()));
        }
    }

    #[test]
    fn abels_corner_powers() {
        for p in [2u64, 3, 5] {
            for k in 0..3u32 {
                let a = RingValue::plocal(BigInt::from(1), k, p);
                let u = ExactMatrix::elementary(4, 0, 3, a.clone());
                let pa = a.try_mul(&RingValue::from_i64(Ring::PLocal(p), p as i64)).unwrap();
                assert_eq!(u.pow(p as i64).unwrap(), ExactMatrix::elementary(4, 0, 3, pa));
            }
        }
    }

    #[test]
    fn abels_rejects_composite() {
        assert_eq!(abels(6), Err(Error::NotPrime(6)));
        assert!(builtin("abels:5").is_ok());
        assert!(builtin("nope").is_err());
    }

    #[test]
    fn invalid_center_is_rejected() {
        let g = heisenberg();
        let mut center = g.center().clone();
        center.generators = vec![NamedElement::new("x", g.generator("x").unwrap().clone())];
        assert!(GroupSpec::new("bad", Ring::Integer, 3, g.generators().to_vec(), center).is_err());
    }
}
