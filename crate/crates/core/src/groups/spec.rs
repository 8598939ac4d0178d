use num_bigint::BigInt;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{ExactMatrix, Ring};
use crate::groups::predicate::{Coordinates, ShapePredicate};

/// Declared isomorphism type `Z^s × Z/t_1 × … × Z/t_r` of the central subgroup.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbelianStructure {
    pub free_rank: usize,
    pub torsion: Vec<u64>,
}

impl AbelianStructure {
    pub fn rank(&self) -> usize {
        self.free_rank + self.torsion.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedElement {
    pub name: String,
    pub matrix: ExactMatrix,
}

impl NamedElement {
    pub fn new(name: impl Into<String>, matrix: ExactMatrix) -> Self {
        NamedElement { name: name.into(), matrix }
    }
}

/// The designated central subgroup `C` of a group: generators, a decidable
/// membership test and the declared basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CentralSubgroup {
    pub generators: Vec<NamedElement>,
    pub predicate: ShapePredicate,
    pub structure: AbelianStructure,
    /// Coordinates of each generator in the declared basis.
    pub coordinates: Vec<Coordinates>,
}

/// A finitely generated matrix group with a designated central subgroup.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupSpec {
    name: String,
    ring: Ring,
    dim: usize,
    generators: Vec<NamedElement>,
    inverses: Vec<ExactMatrix>,
    center: CentralSubgroup,
}

impl GroupSpec {
    /// Validates and assembles a group description. Checks invertibility of
    /// the generators, centrality of `C`, the membership smoke set and the
    /// declared abelian structure.
    pub fn new(name: impl Into<String>, ring: Ring, dim: usize, generators: Vec<NamedElement>, center: CentralSubgroup) -> Result<Self> {
        let name = name.into();
        let invalid = |msg: String| Error::InvalidGroup(format!("{name}: {msg}"));
        for g in generators.iter().chain(&center.generators) {
            if g.matrix.dim() != dim || g.matrix.ring() != ring {
                return Err(invalid(format!("element `{}` is not a {dim}x{dim} matrix over {ring}", g.name)));
            }
        }
        let mut seen = std::collections::HashSet::new();
        for g in &generators {
            if !seen.insert(g.name.as_str()) || g.name == "t" {
                return Err(invalid(format!("generator name `{}` is duplicated or reserved", g.name)));
            }
        }
        let inverses = generators.iter().map(|g| g.matrix.inverse()).collect::<Result<Vec<_>>>()?;

        let (free, tors) = center.predicate.shape(ring);
        if free != center.structure.free_rank || tors != center.structure.torsion.len() {
            return Err(invalid(format!(
                "predicate measures {free} free and {tors} torsion directions but structure declares {:?}",
                center.structure
            )));
        }
        if center.coordinates.len() != center.generators.len() {
            return Err(invalid("one coordinate vector per central generator is required".into()));
        }

        let spec = GroupSpec { name: name.clone(), ring, dim, generators, inverses, center };

        for (idx, &order) in spec.center.structure.torsion.iter().enumerate() {
            if order == 0 {
                return Err(invalid("torsion invariants must be positive".into()));
            }
            let b = spec.basis_element(spec.center.structure.free_rank + idx)?;
            if !b.pow(order as i64)?.is_identity() {
                return Err(invalid(format!("torsion basis element {idx} does not have order dividing {order}")));
            }
        }
        for i in 0..spec.center.structure.rank() {
            let b = spec.basis_element(i)?;
            let coords = spec.center_coordinates(&b).ok_or_else(|| invalid(format!("basis element {i} fails the predicate")))?;
            let mut unit = vec![0i64; spec.center.structure.rank()];
            unit[i] = 1;
            if coords != spec.coords_from_i64(&unit) {
                return Err(invalid(format!("basis element {i} has coordinates {coords:?}")));
            }
            spec.check_central(&b, &format!("basis element {i}"))?;
        }
        for (c, declared) in spec.center.generators.iter().zip(&spec.center.coordinates) {
            let coords =
                spec.center_coordinates(&c.matrix).ok_or_else(|| invalid(format!("central generator `{}` fails the predicate", c.name)))?;
            if coords != spec.normalize_coordinates(declared.clone()) {
                return Err(invalid(format!("central generator `{}` has coordinates {coords:?}, declared {declared:?}", c.name)));
            }
            spec.check_central(&c.matrix, &c.name)?;
        }
        spec.check_smoke_set()?;
        Ok(spec)
    }

    fn check_central(&self, c: &ExactMatrix, label: &str) -> Result<()> {
        for g in &self.generators {
            if c.mul(&g.matrix)? != g.matrix.mul(c)? {
                return Err(Error::InvalidGroup(format!("{}: `{label}` does not commute with `{}`", self.name, g.name)));
            }
        }
        Ok(())
    }

    /// Every product of at most three central generators (or inverses) must
    /// pass the membership predicate.
    fn check_smoke_set(&self) -> Result<()> {
        let mut letters = Vec::new();
        for c in &self.center.generators {
            letters.push(c.matrix.clone());
            letters.push(c.matrix.inverse()?);
        }
        let mut layer = vec![ExactMatrix::identity(self.dim, self.ring)];
        for _ in 0..3 {
            let mut next = Vec::with_capacity(layer.len() * letters.len());
            for w in &layer {
                for l in &letters {
                    let p = w.mul(l)?;
                    if !self.in_center(&p) {
                        return Err(Error::InvalidGroup(format!("{}: product {p} of central generators fails the predicate", self.name)));
                    }
                    next.push(p);
                }
            }
            layer = next;
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[NamedElement] {
        &self.generators
    }

    pub fn center(&self) -> &CentralSubgroup {
        &self.center
    }

    pub fn identity(&self) -> ExactMatrix {
        ExactMatrix::identity(self.dim, self.ring)
    }

    pub fn generator(&self, name: &str) -> Result<&ExactMatrix> {
        self.generators
            .iter()
            .chain(&self.center.generators)
            .find(|g| g.name == name)
            .map(|g| &g.matrix)
            .ok_or_else(|| Error::UnknownGenerator(name.to_string()))
    }

    /// `generator(name)^k`; inverses of group generators are cached.
    pub fn generator_power(&self, name: &str, k: i64) -> Result<ExactMatrix> {
        if let Some(i) = self.generators.iter().position(|g| g.name == name) {
            return match k {
                1 => Ok(self.generators[i].matrix.clone()),
                -1 => Ok(self.inverses[i].clone()),
                _ => self.generators[i].matrix.pow(k),
            };
        }
        self.generator(name)?.pow(k)
    }

    /// Generators followed by their inverses, in declaration order.
    pub fn generators_and_inverses(&self) -> impl Iterator<Item = &ExactMatrix> {
        self.generators.iter().map(|g| &g.matrix).chain(self.inverses.iter())
    }

    pub fn in_center(&self, g: &ExactMatrix) -> bool {
        g.dim() == self.dim && g.ring() == self.ring && self.center.predicate.contains(g)
    }

    /// Coordinates of `g` in the declared basis of `C`, or `None` when `g ∉ C`.
    pub fn center_coordinates(&self, g: &ExactMatrix) -> Option<Coordinates> {
        if g.dim() != self.dim || g.ring() != self.ring {
            return None;
        }
        self.center.predicate.coordinates(g).map(|c| self.normalize_coordinates(c))
    }

    fn normalize_coordinates(&self, mut c: Coordinates) -> Coordinates {
        for (r, &t) in c.torsion.iter_mut().zip(&self.center.structure.torsion) {
            *r %= t;
        }
        c
    }

    pub fn coords_from_i64(&self, v: &[i64]) -> Coordinates {
        let s = self.center.structure.free_rank;
        let torsion = v[s..].iter().zip(&self.center.structure.torsion).map(|(&x, &t)| x.rem_euclid(t as i64) as u64).collect();
        Coordinates { free: v[..s].iter().map(|&x| BigInt::from(x)).collect(), torsion }
    }

    /// Matrix of the `index`-th basis direction of `C` (free directions first).
    pub fn basis_element(&self, index: usize) -> Result<ExactMatrix> {
        self.center
            .predicate
            .basis_element(index, self.dim, self.ring)
            .ok_or_else(|| Error::BasisError(format!("no basis direction {index}")))
    }

    /// Largest free-coordinate magnitude among the central generators.
    pub fn max_center_coordinate(&self) -> u64 {
        self.center.coordinates.iter().flat_map(|c| c.free.iter()).map(|v| u64::try_from(v.abs()).unwrap_or(u64::MAX)).max().unwrap_or(0)
    }
}
