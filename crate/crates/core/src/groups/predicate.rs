use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::exact::{ExactMatrix, Ring, RingValue};

/// Coordinates of an element of `C ≅ Z^s × Γ` in the declared basis:
/// `free` holds the `Z^s` part, `torsion` the residues for `Γ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Coordinates {
    pub free: Vec<BigInt>,
    pub torsion: Vec<u64>,
}

/// Shape tests that decide membership in the designated central subgroup.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum ShapePredicate {
    /// The matrix is `I + Σ c_k E_{pos_k}` with every `c_k` integral; each
    /// listed position is one basis direction. Over `Z/m` the directions are
    /// torsion of order `m`.
    UnipotentEntries { positions: Vec<(usize, usize)> },
    /// The matrix is `±I`; one torsion direction of order 2.
    SignScalar,
}

impl ShapePredicate {
    /// Number of (free, torsion) basis directions the predicate measures.
    pub fn shape(&self, ring: Ring) -> (usize, usize) {
        match self {
            ShapePredicate::UnipotentEntries { positions } => match ring {
                Ring::Mod(_) => (0, positions.len()),
                _ => (positions.len(), 0),
            },
            ShapePredicate::SignScalar => (0, 1),
        }
    }

    pub fn contains(&self, g: &ExactMatrix) -> bool {
        self.coordinates(g).is_some()
    }

    /// Coordinates of `g` when it passes the shape test.
    pub fn coordinates(&self, g: &ExactMatrix) -> Option<Coordinates> {
        let n = g.dim();
        match self {
            ShapePredicate::UnipotentEntries { positions } => {
                for i in 0..n {
                    for j in 0..n {
                        if positions.contains(&(i, j)) {
                            continue;
                        }
                        let expected = if i == j { RingValue::one(g.ring()) } else { RingValue::zero(g.ring()) };
                        if *g.get(i, j) != expected {
                            return None;
                        }
                    }
                }
                let mut coords = Coordinates { free: Vec::new(), torsion: Vec::new() };
                for &(i, j) in positions {
                    match g.get(i, j) {
                        RingValue::ModInt { residue, .. } => coords.torsion.push(*residue),
                        v => coords.free.push(v.as_integer()?),
                    }
                }
                Some(coords)
            }
            ShapePredicate::SignScalar => {
                let one = ExactMatrix::identity(n, g.ring());
                if *g == one {
                    return Some(Coordinates { free: vec![], torsion: vec![0] });
                }
                let minus_one: Vec<RingValue> = one.entries().iter().map(RingValue::neg).collect();
                (g.entries() == minus_one.as_slice()).then(|| Coordinates { free: vec![], torsion: vec![1] })
            }
        }
    }

    /// Matrix of the `index`-th basis direction (free directions first).
    pub fn basis_element(&self, index: usize, n: usize, ring: Ring) -> Option<ExactMatrix> {
        match self {
            ShapePredicate::UnipotentEntries { positions } => {
                let &(i, j) = positions.get(index)?;
                Some(ExactMatrix::elementary(n, i, j, RingValue::one(ring)))
            }
            ShapePredicate::SignScalar => (index == 0).then(|| {
                let entries = ExactMatrix::identity(n, ring).entries().iter().map(RingValue::neg).collect();
                ExactMatrix::from_entries(n, ring, entries).expect("same shape")
            }),
        }
    }
}
