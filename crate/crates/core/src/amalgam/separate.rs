use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::amalgam::eval::{evaluate_amalgam, evaluate_hnn};
use crate::amalgam::hnn::{britton_reduce, HnnWord};
use crate::amalgam::word::{reduce_amalgam, Amalgam, AmalgamWord};
use crate::characters::{build_compatible_characters, Character, QuotientCharacter};
use crate::error::Result;
use crate::exact::ExactMatrix;
use crate::groups::GroupSpec;
use crate::quotients::{enumerate_quotient, FiniteQuotient, DEFAULT_CAP};
use crate::repkit::{align_dims, induce, random_unitary, DEFAULT_DIM_CAP};

/// `‖σ(w) − I‖_op` at or above this counts as separated.
pub const SEPARATION_THRESHOLD: f64 = 0.1;

pub const INCONCLUSIVE_CAVEAT: &str = "no separating representation was found within the budget; this is not evidence that none exists";

/// Search limits. Level `k` accepts character approximations within `epsilon / 2^k`.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct SeparationBudget {
    pub moduli: Vec<u64>,
    pub max_levels: usize,
    pub max_seeds: usize,
    pub epsilon: f64,
    /// Enumeration cap per congruence quotient.
    pub cap: usize,
    /// Largest representation dimension evaluated.
    pub dim_cap: usize,
}

impl SeparationBudget {
    /// Moduli `1..=max_modulus` with one level and eight seeds.
    pub fn up_to(max_modulus: u64) -> Self {
        SeparationBudget {
            moduli: (1..=max_modulus).collect(),
            max_levels: 1,
            max_seeds: 8,
            epsilon: 0.5,
            cap: DEFAULT_CAP,
            dim_cap: DEFAULT_DIM_CAP,
        }
    }
}

impl Default for SeparationBudget {
    fn default() -> Self {
        SeparationBudget::up_to(16)
    }
}

#[derive(Clone, Copy, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum SeparationStatus {
    Separated,
    Inconclusive,
    /// The word reduces to the identity; no search was run.
    Identity,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
#[serde(tag = "outcome", rename_all = "lowercase")]
pub enum AttemptOutcome {
    Evaluated { norm: f64, separated: bool },
    Skipped { reason: String },
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Attempt {
    /// `[m1, m2]` for amalgams, `[m]` for HNN-extensions.
    pub moduli: Vec<u64>,
    pub level: usize,
    pub epsilon: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed_index: Option<usize>,
    /// ChaCha stream of the unitary for this attempt.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stream: Option<u64>,
    pub dim: Option<usize>,
    #[serde(flatten)]
    pub outcome: AttemptOutcome,
}

impl Attempt {
    pub fn norm(&self) -> Option<f64> {
        match self.outcome {
            AttemptOutcome::Evaluated { norm, .. } => Some(norm),
            AttemptOutcome::Skipped { .. } => None,
        }
    }

    pub fn separated(&self) -> bool {
        matches!(self.outcome, AttemptOutcome::Evaluated { separated: true, .. })
    }
}

/// Wall-clock data, kept apart from the reproducible part of a report.
#[derive(Clone, Debug, Default, Serialize, PartialEq)]
pub struct SeparationTimings {
    pub elapsed_ms: f64,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct SeparationReport {
    pub setting: &'static str,
    pub group: String,
    pub word: String,
    pub reduced: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub britton_form: Option<u8>,
    pub character: Character,
    pub status: SeparationStatus,
    pub threshold: f64,
    pub budget: SeparationBudget,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub attempts: Vec<Attempt>,
    pub evaluated: usize,
    pub successes: usize,
    pub max_norm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub caveat: Option<&'static str>,
    pub metadata: SeparationTimings,
}

impl SeparationReport {
    /// The report with timing metadata cleared, for reproducibility checks.
    pub fn reproducible(&self) -> SeparationReport {
        SeparationReport { metadata: SeparationTimings::default(), ..self.clone() }
    }

    fn finish(mut self, start: Instant) -> Self {
        self.evaluated = self.attempts.iter().filter(|a| a.norm().is_some()).count();
        self.successes = self.attempts.iter().filter(|a| a.separated()).count();
        self.max_norm = self.attempts.iter().filter_map(Attempt::norm).reduce(f64::max);
        if self.status != SeparationStatus::Identity {
            self.status = if self.successes > 0 { SeparationStatus::Separated } else { SeparationStatus::Inconclusive };
        }
        self.caveat = (self.status == SeparationStatus::Inconclusive).then_some(INCONCLUSIVE_CAVEAT);
        self.metadata.elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
        self
    }
}

type CachedQuotient = std::result::Result<Arc<FiniteQuotient>, String>;
type CacheSlot = Arc<OnceLock<CachedQuotient>>;

/// Quotients shared between attempts; failures are cached too.
#[derive(Default)]
struct QuotientCache {
    slots: Mutex<HashMap<(String, u64), CacheSlot>>,
}

impl QuotientCache {
    fn get(&self, group: &Arc<GroupSpec>, m: u64, cap: usize) -> CachedQuotient {
        let slot = {
            let mut slots = self.slots.lock().expect("cache lock");
            slots.entry((group.name().to_string(), m)).or_default().clone()
        };
        slot.get_or_init(|| enumerate_quotient(group, m, cap).map(Arc::new).map_err(|e| e.to_string())).clone()
    }
}

/// Runs `attempts` in canonical order, in parallel batches, stopping after
/// the batch containing the first success. The trace ends at that success.
fn run_in_order<T: Sync>(keys: &[T], eval: impl Fn(&T) -> Attempt + Sync) -> Vec<Attempt> {
    let batch = rayon::current_num_threads().max(1);
    let mut out = Vec::new();
    for chunk in keys.chunks(batch) {
        let results: Vec<Attempt> = chunk.par_iter().map(&eval).collect();
        for a in results {
            let hit = a.separated();
            out.push(a);
            if hit {
                return out;
            }
        }
    }
    out
}

fn level_epsilon(budget: &SeparationBudget, level: usize) -> f64 {
    budget.epsilon / 2f64.powi(level as i32)
}

fn skipped(reason: impl Into<String>) -> AttemptOutcome {
    AttemptOutcome::Skipped { reason: reason.into() }
}

fn evaluated(norm: f64) -> AttemptOutcome {
    AttemptOutcome::Evaluated { norm, separated: norm >= SEPARATION_THRESHOLD }
}

fn center_generators(group: &GroupSpec) -> Vec<ExactMatrix> {
    group.center().generators.iter().map(|c| c.matrix.clone()).collect()
}

/// Character of the image of `C` in `q` approximating `λ` within `eps`.
fn approximant(q: &Arc<FiniteQuotient>, lambda: &Character, eps: f64) -> Result<QuotientCharacter> {
    let cc = build_compatible_characters(q, q, lambda, eps, &center_generators(q.group()))?;
    Ok(cc.a)
}

/// Searches for induced representations `ρ1` of the left factor mod `m1` and
/// `ρ2` of the right factor mod `m2`, agreeing on `C`, with
/// `‖σ_{ρ1,ρ2}(w) − I‖_op ≥ 0.1`. Pairs are tried in the order of
/// `(max(m1, m2), m1, m2)`, then level. For `m1 = m2` the characters come from
/// [`build_compatible_characters`]; otherwise the character on the right is
/// the exact transport of the one on the left, and the pair is skipped when
/// that transport is not well defined.
pub fn separate_amalgam(amalgam: &Amalgam, w: &AmalgamWord, lambda: &Character, budget: &SeparationBudget) -> Result<SeparationReport> {
    let start = Instant::now();
    let reduced = reduce_amalgam(amalgam, w)?;
    let mut report = SeparationReport {
        setting: "amalgam",
        group: amalgam.name(),
        word: w.to_string(),
        reduced: reduced.to_string(),
        britton_form: None,
        character: lambda.clone(),
        status: SeparationStatus::Inconclusive,
        threshold: SEPARATION_THRESHOLD,
        budget: budget.clone(),
        seed: None,
        attempts: Vec::new(),
        evaluated: 0,
        successes: 0,
        max_norm: None,
        caveat: None,
        metadata: SeparationTimings::default(),
    };
    if reduced.is_empty() {
        report.status = SeparationStatus::Identity;
        return Ok(report.finish(start));
    }

    let mut keys: Vec<(u64, u64, usize)> = Vec::new();
    for &m1 in &budget.moduli {
        for &m2 in &budget.moduli {
            for level in 0..budget.max_levels.max(1) {
                keys.push((m1, m2, level));
            }
        }
    }
    keys.sort_by_key(|&(m1, m2, level)| (m1.max(m2), m1, m2, level));
    keys.dedup();

    let cache = QuotientCache::default();
    let attempt = |&(m1, m2, level): &(u64, u64, usize)| {
        let eps = level_epsilon(budget, level);
        let (dim, outcome) = match amalgam_attempt(amalgam, &reduced, lambda, &cache, budget, m1, m2, eps) {
            Ok((dim, outcome)) => (dim, outcome),
            Err(e) => (None, skipped(e.to_string())),
        };
        Attempt { moduli: vec![m1, m2], level, epsilon: eps, seed_index: None, stream: None, dim, outcome }
    };
    report.attempts = run_in_order(&keys, attempt);
    Ok(report.finish(start))
}

#[allow(clippy::too_many_arguments)]
fn amalgam_attempt(
    amalgam: &Amalgam,
    w: &AmalgamWord,
    lambda: &Character,
    cache: &QuotientCache,
    budget: &SeparationBudget,
    m1: u64,
    m2: u64,
    eps: f64,
) -> Result<(Option<usize>, AttemptOutcome)> {
    let qa = match cache.get(amalgam.left(), m1, budget.cap) {
        Ok(q) => q,
        Err(e) => return Ok((None, skipped(e))),
    };
    let qb = match cache.get(amalgam.right(), m2, budget.cap) {
        Ok(q) => q,
        Err(e) => return Ok((None, skipped(e))),
    };
    let (da, db) = (qa.transversal().len(), qb.transversal().len());
    let dim = num_integer::lcm(da, db);
    if dim > budget.dim_cap {
        return Ok((Some(dim), skipped(format!("aligned dimension {dim} exceeds {}", budget.dim_cap))));
    }
    let (chi_a, chi_b) = if Arc::ptr_eq(&qa, &qb) {
        let cc = build_compatible_characters(&qa, &qb, lambda, eps, &center_generators(amalgam.left()))?;
        (cc.a, cc.b)
    } else {
        let a = approximant(&qa, lambda, eps)?;
        let b = match QuotientCharacter::from_exact(qb.clone(), &a.as_character()) {
            Ok(b) => b,
            Err(e) => return Ok((Some(dim), skipped(format!("character does not transport to modulus {m2}: {e}")))),
        };
        (a, b)
    };
    let rho_a = Arc::new(induce(&qa, &chi_a)?);
    let rho_b =
        if Arc::ptr_eq(&qa, &qb) && chi_a.basis_values() == chi_b.basis_values() { rho_a.clone() } else { Arc::new(induce(&qb, &chi_b)?) };
    let (r1, r2) = align_dims(&rho_a, &rho_b, budget.dim_cap)?;
    let sigma = evaluate_amalgam(amalgam, &r1, &r2, w)?;
    Ok((Some(dim), evaluated(sigma.distance_to_identity())))
}

/// Searches for an induced representation `ρ` mod `m` and a seeded random
/// unitary `U` with `‖σ_{ρ,U}(w) − I‖_op ≥ 0.1`, in the order of
/// `(m, level, seed index)`. The unitary of each attempt is drawn from
/// ChaCha8 seeded with `seed` on a stream derived from the attempt key.
pub fn separate_hnn(
    group: &Arc<GroupSpec>,
    w: &HnnWord,
    lambda: &Character,
    seed: u64,
    budget: &SeparationBudget,
) -> Result<SeparationReport> {
    let start = Instant::now();
    let reduced = britton_reduce(group, w)?;
    let mut report = SeparationReport {
        setting: "hnn",
        group: format!("{} *_C (HNN)", group.name()),
        word: w.to_string(),
        reduced: reduced.word.to_string(),
        britton_form: Some(reduced.form.number()),
        character: lambda.clone(),
        status: SeparationStatus::Inconclusive,
        threshold: SEPARATION_THRESHOLD,
        budget: budget.clone(),
        seed: Some(seed),
        attempts: Vec::new(),
        evaluated: 0,
        successes: 0,
        max_norm: None,
        caveat: None,
        metadata: SeparationTimings::default(),
    };
    if !reduced.nontrivial {
        report.status = SeparationStatus::Identity;
        return Ok(report.finish(start));
    }

    let mut keys: Vec<(u64, usize, usize)> = Vec::new();
    for &m in &budget.moduli {
        for level in 0..budget.max_levels.max(1) {
            for s in 0..budget.max_seeds.max(1) {
                keys.push((m, level, s));
            }
        }
    }
    keys.sort();
    keys.dedup();

    let cache = QuotientCache::default();
    let word = &reduced.word;
    let attempt = |&(m, level, s): &(u64, usize, usize)| {
        let eps = level_epsilon(budget, level);
        let stream = (m << 24) | ((level as u64 & 0xff) << 16) | (s as u64 & 0xffff);
        let (dim, outcome) = match hnn_attempt(group, word, lambda, &cache, budget, m, eps, seed, stream) {
            Ok(r) => r,
            Err(e) => (None, skipped(e.to_string())),
        };
        Attempt { moduli: vec![m], level, epsilon: eps, seed_index: Some(s), stream: Some(stream), dim, outcome }
    };
    report.attempts = run_in_order(&keys, attempt);
    Ok(report.finish(start))
}

#[allow(clippy::too_many_arguments)]
fn hnn_attempt(
    group: &Arc<GroupSpec>,
    w: &HnnWord,
    lambda: &Character,
    cache: &QuotientCache,
    budget: &SeparationBudget,
    m: u64,
    eps: f64,
    seed: u64,
    stream: u64,
) -> Result<(Option<usize>, AttemptOutcome)> {
    let q = match cache.get(group, m, budget.cap) {
        Ok(q) => q,
        Err(e) => return Ok((None, skipped(e))),
    };
    let dim = q.transversal().len();
    if dim > budget.dim_cap {
        return Ok((Some(dim), skipped(format!("dimension {dim} exceeds {}", budget.dim_cap))));
    }
    let chi = approximant(&q, lambda, eps)?;
    let rho = induce(&q, &chi)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let u = random_unitary(dim, &mut rng);
    let sigma = evaluate_hnn(&rho, &u, w)?;
    Ok((Some(dim), evaluated(sigma.distance_to_identity())))
}
