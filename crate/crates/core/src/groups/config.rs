//! TOML description of a matrix group.
//!
//! ```toml
//! name = "heisenberg-mod-7"
//! dim = 3
//! ring = "mod"          # "integer" | "mod" | "plocal"
//! modulus = 7           # ring = "mod"
//! # p = 2               # ring = "plocal"
//!
//! [[generators]]
//! name = "x"
//! rows = [[1, 1, 0], [0, 1, 0], [0, 0, 1]]   # integers or strings such as "1/4"
//!
//! [center]
//! generators = ["z"]    # names from [[generators]] or [[center.elements]]
//! predicate = { kind = "unipotent-entries", positions = [[1, 3]] }  # 1-based
//! free_rank = 0
//! torsion = [7]
//! coordinates = [[1]]   # per central generator: free part, then torsion part
//! ```

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::exact::{ExactMatrix, Ring, RingValue};
use crate::groups::predicate::ShapePredicate;
use crate::groups::spec::{AbelianStructure, CentralSubgroup, GroupSpec, NamedElement};

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum Entry {
    Int(i64),
    Text(String),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixConfig {
    name: String,
    rows: Vec<Vec<Entry>>,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", deny_unknown_fields)]
enum PredicateConfig {
    UnipotentEntries { positions: Vec<(usize, usize)> },
    SignScalar,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CenterConfig {
    generators: Vec<String>,
    #[serde(default)]
    elements: Vec<MatrixConfig>,
    predicate: PredicateConfig,
    free_rank: usize,
    #[serde(default)]
    torsion: Vec<u64>,
    coordinates: Vec<Vec<i64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GroupConfig {
    name: String,
    dim: usize,
    ring: String,
    p: Option<u64>,
    modulus: Option<u64>,
    generators: Vec<MatrixConfig>,
    center: CenterConfig,
}

fn build_matrix(ring: Ring, dim: usize, m: &MatrixConfig) -> Result<NamedElement> {
    if m.rows.len() != dim || m.rows.iter().any(|r| r.len() != dim) {
        return Err(Error::Config(format!("matrix `{}` must be {dim}x{dim}", m.name)));
    }
    let mut entries = Vec::with_capacity(dim * dim);
    for row in &m.rows {
        for e in row {
            entries.push(match e {
                Entry::Int(v) => RingValue::from_i64(ring, *v),
                Entry::Text(s) => RingValue::parse(ring, s)?,
            });
        }
    }
    Ok(NamedElement::new(m.name.clone(), ExactMatrix::from_entries(dim, ring, entries)?))
}

/// Parses and validates a group description.
pub fn group_from_toml(text: &str) -> Result<GroupSpec> {
    let cfg: GroupConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    let ring = match cfg.ring.as_str() {
        "integer" => Ring::Integer,
        "mod" => Ring::Mod(cfg.modulus.filter(|&m| m >= 1).ok_or_else(|| Error::Config("ring = \"mod\" needs modulus >= 1".into()))?),
        "plocal" => {
            let p = cfg.p.ok_or_else(|| Error::Config("ring = \"plocal\" needs p".into()))?;
            if !crate::exact::is_prime(p) {
                return Err(Error::NotPrime(p));
            }
            Ring::PLocal(p)
        }
        other => return Err(Error::Config(format!("unknown ring `{other}`"))),
    };
    let generators = cfg.generators.iter().map(|m| build_matrix(ring, cfg.dim, m)).collect::<Result<Vec<_>>>()?;
    let extra = cfg.center.elements.iter().map(|m| build_matrix(ring, cfg.dim, m)).collect::<Result<Vec<_>>>()?;
    let center_gens = cfg
        .center
        .generators
        .iter()
        .map(|name| {
            extra
                .iter()
                .chain(&generators)
                .find(|g| &g.name == name)
                .cloned()
                .ok_or_else(|| Error::Config(format!("central generator `{name}` is not defined")))
        })
        .collect::<Result<Vec<_>>>()?;
    let predicate = match cfg.center.predicate {
        PredicateConfig::UnipotentEntries { positions } => {
            let mut zero_based = Vec::with_capacity(positions.len());
            for (i, j) in positions {
                if i == 0 || j == 0 || i > cfg.dim || j > cfg.dim || i == j {
                    return Err(Error::Config(format!("bad off-diagonal position ({i}, {j})")));
                }
                zero_based.push((i - 1, j - 1));
            }
            ShapePredicate::UnipotentEntries { positions: zero_based }
        }
        PredicateConfig::SignScalar => ShapePredicate::SignScalar,
    };
    let structure = AbelianStructure { free_rank: cfg.center.free_rank, torsion: cfg.center.torsion };
    let rank = structure.rank();
    if cfg.center.coordinates.iter().any(|c| c.len() != rank) {
        return Err(Error::Config(format!("each coordinate vector must have {rank} entries")));
    }
    let coordinates = cfg
        .center
        .coordinates
        .iter()
        .map(|v| {
            let s = structure.free_rank;
            crate::groups::Coordinates {
                free: v[..s].iter().map(|&x| x.into()).collect(),
                torsion: v[s..].iter().zip(&structure.torsion).map(|(&x, &t)| x.rem_euclid(t.max(1) as i64) as u64).collect(),
            }
        })
        .collect();
    let center = CentralSubgroup { generators: center_gens, predicate, structure, coordinates };
    GroupSpec::new(cfg.name, ring, cfg.dim, generators, center)
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEIS_MOD_7: &str = r#"
name = "heisenberg-mod-7"
dim = 3
ring = "mod"
modulus = 7

[[generators]]
name = "x"
rows = [[1, 1, 0], [0, 1, 0], [0, 0, 1]]

[[generators]]
name = "y"
rows = [[1, 0, 0], [0, 1, 1], [0, 0, 1]]

[center]
generators = ["z"]
elements = [{ name = "z", rows = [[1, 0, 1], [0, 1, 0], [0, 0, 1]] }]
predicate = { kind = "unipotent-entries", positions = [[1, 3]] }
free_rank = 0
torsion = [7]
coordinates = [[1]]
"#;

    #[test]
    fn parses_modular_heisenberg() {
        let g = group_from_toml(HEIS_MOD_7).unwrap();
        assert_eq!(g.ring(), Ring::Mod(7));
        assert_eq!(g.generators().len(), 2);
        assert_eq!(g.center().structure.torsion, vec![7]);
    }

    #[test]
    fn parses_fractions() {
        let text = r#"
name = "abels-like"
dim = 2
ring = "plocal"
p = 3
[[generators]]
name = "a"
rows = [[1, "1/9"], [0, 1]]
[center]
generators = ["c"]
elements = [{ name = "c", rows = [[1, 0], [0, 1]] }]
predicate = { kind = "sign-scalar" }
free_rank = 0
torsion = [2]
coordinates = [[0]]
"#;
        let g = group_from_toml(text).unwrap();
        assert_eq!(g.generator("a").unwrap().get(0, 1).to_string(), "1/9");
    }

    #[test]
    fn rejects_malformed() {
        assert!(matches!(group_from_toml("name = 3"), Err(Error::Config(_))));
        let wrong_structure = HEIS_MOD_7.replace("torsion = [7]", "torsion = [5]");
        assert!(group_from_toml(&wrong_structure).is_err());
        let non_central = HEIS_MOD_7.replace("generators = [\"z\"]", "generators = [\"x\"]");
        assert!(group_from_toml(&non_central).is_err());
    }
}
