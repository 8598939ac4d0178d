use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::Args;
use serde::{Deserialize, Serialize};

use rfdkit::groups::{builtin, group_from_toml, GroupSpec};

/// A configuration problem; reported with exit code 64.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn config_err(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

/// Inclusive modulus range written `a..b` (or `a..=b`, or a single `m`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModulusRange {
    pub lo: u64,
    pub hi: u64,
}

impl ModulusRange {
    pub fn parse(s: &str) -> Result<Self, String> {
        let s = s.trim();
        let (lo, hi) = match s.split_once("..") {
            Some((a, b)) => (a.trim(), b.trim().trim_start_matches('=')),
            None => (s, s),
        };
        let lo: u64 = lo.parse().map_err(|_| format!("bad modulus range `{s}`"))?;
        let hi: u64 = hi.parse().map_err(|_| format!("bad modulus range `{s}`"))?;
        if lo == 0 || lo > hi {
            return Err(format!("modulus range `{s}` must satisfy 1 ≤ a ≤ b"));
        }
        Ok(ModulusRange { lo, hi })
    }

    pub fn moduli(&self) -> Vec<u64> {
        (self.lo..=self.hi).collect()
    }
}

impl fmt::Display for ModulusRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.lo, self.hi)
    }
}

impl Serialize for ModulusRange {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ModulusRange {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        ModulusRange::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// Flags shared by every subcommand. A `--config` file overrides them.
#[derive(Args, Clone, Debug, Default)]
pub struct Flags {
    /// Built-in group (`heisenberg`, `abels`, `abels:<p>`) or a TOML group file.
    #[arg(long, global = true)]
    pub group: Option<String>,
    /// Character angles in turns, one per central direction (`1/3`, `0.4142`).
    #[arg(long = "character", global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub character: Option<Vec<String>>,
    #[arg(long, global = true)]
    pub epsilon: Option<f64>,
    /// Inclusive range `a..b`.
    #[arg(long = "modulus-range", global = true, value_parser = ModulusRange::parse)]
    pub modulus_range: Option<ModulusRange>,
    /// Enumeration cap per congruence quotient.
    #[arg(long, global = true)]
    pub cap: Option<usize>,
    /// Largest representation dimension evaluated.
    #[arg(long = "dim-cap", global = true)]
    pub dim_cap: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory for `results.jsonl` and `report.json`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// TOML file whose keys override the flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Amalgam word (`L:x R:y^-1`) or HNN word (`t^-1 x t`).
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub word: Option<String>,
    /// Group element as a word in the generators; `x0` and `g0` name the Abels elements.
    #[arg(long = "element", global = true, allow_hyphen_values = true)]
    pub elements: Option<Vec<String>>,
    /// Number of tolerance levels `ε/2^k`.
    #[arg(long, global = true)]
    pub levels: Option<usize>,
    /// Unitaries tried per modulus and level in `separate-hnn`.
    #[arg(long, global = true)]
    pub seeds: Option<usize>,
    /// Sample count for `psd` and `kernel`.
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Prime for `abels`.
    #[arg(long, global = true)]
    pub p: Option<u64>,
}

/// Keys accepted in a `--config` file.
#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
struct FileOverrides {
    group: Option<String>,
    character: Option<Vec<String>>,
    epsilon: Option<f64>,
    modulus_range: Option<ModulusRange>,
    cap: Option<usize>,
    dim_cap: Option<usize>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    word: Option<String>,
    elements: Option<Vec<String>>,
    levels: Option<usize>,
    seeds: Option<usize>,
    samples: Option<usize>,
    p: Option<u64>,
}

/// The fully resolved configuration, embedded in every report.
#[derive(Serialize, Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub command: String,
    pub group: String,
    pub character: Vec<String>,
    pub epsilon: f64,
    pub modulus_range: ModulusRange,
    pub cap: usize,
    pub dim_cap: usize,
    pub seed: Option<u64>,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    pub word: Option<String>,
    pub elements: Vec<String>,
    pub levels: usize,
    pub seeds: usize,
    pub samples: usize,
    pub p: u64,
}

/// Per-subcommand defaults.
pub struct Defaults {
    pub group: &'static str,
    pub character: Option<&'static str>,
    pub epsilon: f64,
    pub range: (u64, u64),
    pub cap: usize,
    pub dim_cap: usize,
    pub levels: usize,
    pub needs_seed: bool,
    pub needs_word: bool,
}

impl Default for Defaults {
    fn default() -> Self {
        Defaults {
            group: "heisenberg",
            character: None,
            epsilon: 0.1,
            range: (1, 16),
            cap: rfdkit::quotients::DEFAULT_CAP,
            dim_cap: rfdkit::repkit::DEFAULT_DIM_CAP,
            levels: 1,
            needs_seed: false,
            needs_word: false,
        }
    }
}

impl ExperimentConfig {
    pub fn resolve(command: &str, flags: &Flags, defaults: Defaults) -> anyhow::Result<Self> {
        let file = match &flags.config {
            Some(path) => {
                let text =
                    std::fs::read_to_string(path).map_err(|e| config_err(format!("cannot read config `{}`: {e}", path.display())))?;
                toml::from_str::<FileOverrides>(&text).map_err(|e| config_err(format!("malformed config `{}`: {e}", path.display())))?
            }
            None => FileOverrides::default(),
        };
        let cfg = ExperimentConfig {
            command: command.to_string(),
            group: file.group.or(flags.group.clone()).unwrap_or_else(|| defaults.group.to_string()),
            character: file.character.or(flags.character.clone()).unwrap_or_default(),
            epsilon: file.epsilon.or(flags.epsilon).unwrap_or(defaults.epsilon),
            modulus_range: file
                .modulus_range
                .or(flags.modulus_range)
                .unwrap_or(ModulusRange { lo: defaults.range.0, hi: defaults.range.1 }),
            cap: file.cap.or(flags.cap).unwrap_or(defaults.cap),
            dim_cap: file.dim_cap.or(flags.dim_cap).unwrap_or(defaults.dim_cap),
            seed: file.seed.or(flags.seed),
            out: file.out.or(flags.out.clone()),
            word: file.word.or(flags.word.clone()),
            elements: file.elements.or(flags.elements.clone()).unwrap_or_default(),
            levels: file.levels.or(flags.levels).unwrap_or(defaults.levels),
            seeds: file.seeds.or(flags.seeds).unwrap_or(8),
            samples: file.samples.or(flags.samples).unwrap_or(100),
            p: file.p.or(flags.p).unwrap_or(2),
        };
        cfg.validate(&defaults)?;
        let mut cfg = cfg;
        if cfg.character.is_empty() {
            if let Some(c) = defaults.character {
                cfg.character = vec![c.to_string()];
            }
        }
        Ok(cfg)
    }

    fn validate(&self, defaults: &Defaults) -> anyhow::Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(config_err("epsilon must be positive"));
        }
        for (name, v) in
            [("cap", self.cap), ("dim-cap", self.dim_cap), ("levels", self.levels), ("seeds", self.seeds), ("samples", self.samples)]
        {
            if v == 0 {
                return Err(config_err(format!("{name} must be positive")));
            }
        }
        if self.p == 0 {
            return Err(config_err("p must be positive"));
        }
        if defaults.needs_seed && self.seed.is_none() {
            return Err(config_err(format!("`{}` is randomized and needs --seed", self.command)));
        }
        if defaults.needs_word && self.word.is_none() {
            return Err(config_err(format!("`{}` needs --word", self.command)));
        }
        Ok(())
    }

    /// The group named by `group`: a built-in, or else a TOML file.
    pub fn load_group(&self) -> anyhow::Result<Arc<GroupSpec>> {
        let g = match builtin(&self.group) {
            Ok(g) => g,
            Err(_) if Path::new(&self.group).is_file() => {
                let text = std::fs::read_to_string(&self.group)
                    .map_err(|e| config_err(format!("cannot read group file `{}`: {e}", self.group)))?;
                group_from_toml(&text).map_err(|e| config_err(format!("group file `{}`: {e}", self.group)))?
            }
            Err(e) => return Err(config_err(format!("{e}"))),
        };
        Ok(Arc::new(g))
    }

    pub fn seed(&self) -> u64 {
        self.seed.expect("validated: randomized commands carry a seed")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modulus_ranges() {
        assert_eq!(ModulusRange::parse("3..99").unwrap(), ModulusRange { lo: 3, hi: 99 });
        assert_eq!(ModulusRange::parse("2..=5").unwrap(), ModulusRange { lo: 2, hi: 5 });
        assert_eq!(ModulusRange::parse("7").unwrap().moduli(), vec![7]);
        assert!(ModulusRange::parse("0..4").is_err());
        assert!(ModulusRange::parse("5..4").is_err());
        assert!(ModulusRange::parse("a..b").is_err());
    }

    #[test]
    fn config_file_overrides_flags() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.toml");
        std::fs::write(&path, "epsilon = 0.25\nmodulus_range = \"2..4\"\n").unwrap();
        let flags = Flags { epsilon: Some(0.5), cap: Some(10), config: Some(path), ..Flags::default() };
        let cfg = ExperimentConfig::resolve("psd", &flags, Defaults::default()).unwrap();
        assert_eq!(cfg.epsilon, 0.25);
        assert_eq!(cfg.modulus_range, ModulusRange { lo: 2, hi: 4 });
        assert_eq!(cfg.cap, 10);
    }

    #[test]
    fn malformed_configs_are_config_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.toml");
        std::fs::write(&path, "epsilon = \"lots\"\n").unwrap();
        let flags = Flags { config: Some(path.clone()), ..Flags::default() };
        let err = ExperimentConfig::resolve("psd", &flags, Defaults::default()).unwrap_err();
        assert!(err.is::<ConfigError>());
        std::fs::write(&path, "unknown_key = 1\n").unwrap();
        assert!(ExperimentConfig::resolve("psd", &flags, Defaults::default()).unwrap_err().is::<ConfigError>());
        let flags = Flags { epsilon: Some(-1.0), ..Flags::default() };
        assert!(ExperimentConfig::resolve("psd", &flags, Defaults::default()).unwrap_err().is::<ConfigError>());
        let defaults = Defaults { needs_seed: true, ..Defaults::default() };
        assert!(ExperimentConfig::resolve("psd", &Flags::default(), defaults).unwrap_err().is::<ConfigError>());
    }
}
