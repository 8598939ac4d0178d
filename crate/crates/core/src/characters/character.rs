use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::characters::root::{cis_turns, Angle, RootOfUnity};
use crate::error::{Error, Result};
use crate::exact::ExactMatrix;
use crate::groups::{AbelianStructure, Coordinates, GroupSpec};

/// A one-dimensional unitary character of `C ≅ Z^s × Γ`: one angle per free
/// direction and an exact exponent per torsion direction.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Character {
    pub structure: AbelianStructure,
    pub free: Vec<Angle>,
    /// `torsion[j]` gives the value `e^{2πi·torsion[j]/t_j}`.
    pub torsion: Vec<u64>,
}

impl Character {
    pub fn new(structure: AbelianStructure, free: Vec<Angle>, torsion: Vec<u64>) -> Result<Self> {
        if free.len() != structure.free_rank || torsion.len() != structure.torsion.len() {
            return Err(Error::BasisError(format!(
                "character has {} free and {} torsion angles, structure {:?}",
                free.len(),
                torsion.len(),
                structure
            )));
        }
        let torsion = torsion.iter().zip(&structure.torsion).map(|(e, t)| e % t).collect();
        Ok(Character { structure, free, torsion })
    }

    /// Character of a group's central subgroup from angle strings, free
    /// directions first. Torsion directions take `"e/t_j"` or an integer `e`.
    pub fn parse(group: &GroupSpec, specs: &[String]) -> Result<Self> {
        let structure = group.center().structure.clone();
        if specs.len() != structure.rank() {
            return Err(Error::Config(format!("character needs {} angles, got {}", structure.rank(), specs.len())));
        }
        let free = specs[..structure.free_rank].iter().map(|s| Angle::parse(s)).collect::<Result<Vec<_>>>()?;
        let mut torsion = Vec::new();
        for (s, &t) in specs[structure.free_rank..].iter().zip(&structure.torsion) {
            let root = Angle::parse(s)?.as_root().ok_or_else(|| Error::Config(format!("torsion angle `{s}` must be rational")))?;
            let e = if s.contains('/') { root.pow(t as i128) } else { RootOfUnity::ONE };
            if e != RootOfUnity::ONE {
                return Err(Error::Config(format!("angle `{s}` is not a {t}-th root of unity")));
            }
            let exponent =
                if s.contains('/') { root.num() * (t / root.den()) } else { s.trim().parse::<i64>().unwrap().rem_euclid(t as i64) as u64 };
            torsion.push(exponent);
        }
        Character::new(structure, free, torsion)
    }

    /// Exact part and real part (in turns) of the value at `coords`.
    fn phase(&self, coords: &Coordinates) -> Result<(RootOfUnity, f64)> {
        if coords.free.len() != self.free.len() || coords.torsion.len() != self.torsion.len() {
            return Err(Error::BasisError(format!("coordinates {coords:?} do not match {:?}", self.structure)));
        }
        let mut exact = RootOfUnity::ONE;
        let mut real = 0.0f64;
        for (n, angle) in coords.free.iter().zip(&self.free) {
            match angle {
                Angle::Rational(r) => {
                    let k = n.mod_floor(&BigInt::from(r.den)).to_i128().expect("reduced mod den");
                    exact = exact * RootOfUnity::new(r.num as i128, r.den).pow(k);
                }
                Angle::Real(t) => {
                    let nf = n.to_f64().ok_or_else(|| Error::BasisError("coordinate too large".into()))?;
                    real = (real + nf * t).rem_euclid(1.0);
                }
            }
        }
        for ((b, e), t) in coords.torsion.iter().zip(&self.torsion).zip(&self.structure.torsion) {
            exact = exact * RootOfUnity::new((*b as i128) * (*e as i128), *t);
        }
        Ok((exact, real))
    }

    pub fn value(&self, coords: &Coordinates) -> Result<Complex64> {
        let (exact, real) = self.phase(coords)?;
        if real == 0.0 {
            Ok(exact.to_complex())
        } else {
            Ok(cis_turns((exact.turns() + real).rem_euclid(1.0)))
        }
    }

    /// Exact value when every angle involved is rational.
    pub fn exact_value(&self, coords: &Coordinates) -> Result<Option<RootOfUnity>> {
        let (exact, real) = self.phase(coords)?;
        let all_rational = coords.free.iter().zip(&self.free).all(|(n, a)| matches!(a, Angle::Rational(_)) || n == &BigInt::from(0));
        Ok((all_rational && real == 0.0).then_some(exact))
    }
}

/// `λ̃(g) = λ(g)` for `g ∈ C`, `0` otherwise.
pub fn extend_by_zero(group: &GroupSpec, lambda: &Character, g: &ExactMatrix) -> Result<Complex64> {
    match group.center_coordinates(g) {
        Some(coords) => lambda.value(&coords),
        None => Ok(Complex64::new(0.0, 0.0)),
    }
}
