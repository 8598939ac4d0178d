use std::sync::Arc;

use serde::Serialize;

use crate::characters::{build_compatible_characters, Character, QuotientCharacter, QuotientCharacterSummary};
use crate::error::{Error, Result};
use crate::exact::ExactMatrix;
use crate::groups::GroupSpec;
use crate::quotients::{enumerate_center_quotient, enumerate_quotient, verify_filtration, FiniteQuotient, DEFAULT_CAP};
use crate::repkit::matrix::RepMatrix;
use crate::repkit::rep::{induce, FinDimRep};

#[derive(Clone, Copy, Debug, Serialize, PartialEq, Eq)]
pub struct ApproxBudget {
    /// First modulus tried at level 0.
    pub min_modulus: u64,
    pub max_modulus: u64,
    /// Number of tolerance levels `ε/2^k`, `k = 0..levels`.
    pub levels: usize,
    pub cap: usize,
}

impl Default for ApproxBudget {
    fn default() -> Self {
        ApproxBudget { min_modulus: 1, max_modulus: 100, levels: 4, cap: DEFAULT_CAP }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Certificate {
    pub level: usize,
    pub modulus: u64,
    pub dim: usize,
    pub epsilon_level: f64,
    /// `max_h |tr ρ(h) − λ(h)|` over the central test elements.
    pub max_central_error: f64,
    /// Whether `tr ρ(a)` is structurally zero, per outside test element.
    pub outside_traces: Vec<bool>,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Rejection {
    pub level: usize,
    pub modulus: u64,
    pub reason: String,
}

#[derive(Debug)]
pub struct ApproxLevel {
    pub certificate: Certificate,
    pub character: QuotientCharacterSummary,
    pub k0: u64,
    pub rep: Arc<FinDimRep>,
}

#[derive(Debug)]
pub struct ApproxSequence {
    pub levels: Vec<ApproxLevel>,
    pub rejected: Vec<Rejection>,
    /// Set when some level found no modulus within the budget.
    pub exhausted: Option<Error>,
}

impl ApproxSequence {
    pub fn certificates(&self) -> Vec<Certificate> {
        self.levels.iter().map(|l| l.certificate.clone()).collect()
    }
}

fn check_tests(group: &GroupSpec, outside: &[ExactMatrix], central: &[ExactMatrix]) -> Result<()> {
    if let Some(a) = outside.iter().find(|a| group.in_center(a)) {
        return Err(Error::PreconditionFailed(format!("{a} lies in the central subgroup")));
    }
    if let Some(h) = central.iter().find(|h| !group.in_center(h)) {
        return Err(Error::PreconditionFailed(format!("{h} is not in the central subgroup")));
    }
    Ok(())
}

/// Certificate of `rho` against `λ` at one tolerance level.
pub fn certify(
    group: &GroupSpec,
    lambda: &Character,
    rho: &FinDimRep,
    level: usize,
    epsilon_level: f64,
    outside: &[ExactMatrix],
    central: &[ExactMatrix],
) -> Result<Certificate> {
    let mut max_central_error = 0.0f64;
    for h in central {
        let coords = group.center_coordinates(h).ok_or_else(|| Error::PreconditionFailed(format!("{h} is not central")))?;
        max_central_error = max_central_error.max((rho.normalized_trace(h)? - lambda.value(&coords)?).norm());
    }
    let outside_traces = outside
        .iter()
        .map(|a| {
            Ok(match rho.eval(a)? {
                RepMatrix::Monomial(m) => m.diagonal_is_zero(),
                RepMatrix::Dense(_) => false,
            })
        })
        .collect::<Result<_>>()?;
    Ok(Certificate {
        level,
        modulus: rho.quotient().map(|q| q.modulus()).unwrap_or(0),
        dim: rho.dim(),
        epsilon_level,
        max_central_error,
        outside_traces,
    })
}

/// Independent recheck from dense matrices: central errors within the level
/// and every outside diagonal exactly zero.
pub fn verify_certificate(
    group: &GroupSpec,
    lambda: &Character,
    rho: &FinDimRep,
    cert: &Certificate,
    outside: &[ExactMatrix],
    central: &[ExactMatrix],
) -> Result<bool> {
    let mut worst = 0.0f64;
    for h in central {
        let coords = match group.center_coordinates(h) {
            Some(c) => c,
            None => return Ok(false),
        };
        let m = rho.eval(h)?.to_dense();
        let tr = m.trace() / m.nrows() as f64;
        worst = worst.max((tr - lambda.value(&coords)?).norm());
    }
    if worst > cert.epsilon_level || (worst - cert.max_central_error).abs() > 1e-9 {
        return Ok(false);
    }
    for (a, &flag) in outside.iter().zip(&cert.outside_traces) {
        let m = rho.eval(a)?.to_dense();
        let zero = m.diagonal().iter().all(|z| z.re == 0.0 && z.im == 0.0);
        if !zero || !flag {
            return Ok(false);
        }
    }
    Ok(rho.dim() == cert.dim && outside.len() == cert.outside_traces.len())
}

/// Induced representations approximating `λ̃` along the schedule `ε/2^k`.
///
/// Levels are searched in order, each starting from the previous level's
/// modulus, since a modulus that meets `ε/2^k` also meets every coarser level.
pub fn character_approx_sequence(
    group: &Arc<GroupSpec>,
    lambda: &Character,
    epsilon: f64,
    outside: &[ExactMatrix],
    central: &[ExactMatrix],
    budget: ApproxBudget,
) -> Result<ApproxSequence> {
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::PreconditionFailed("epsilon must be positive".into()));
    }
    check_tests(group, outside, central)?;
    let mut levels = Vec::new();
    let mut rejected = Vec::new();
    let mut full: Option<Arc<FiniteQuotient>> = None;
    let mut m = budget.min_modulus.max(1);
    for level in 0..budget.levels {
        let eps = epsilon / 2f64.powi(level as i32);
        let found = loop {
            if m > budget.max_modulus {
                break None;
            }
            match try_modulus(group, lambda, eps, outside, central, m, budget.cap, &mut full) {
                Ok(hit) => break Some(hit),
                Err(reason) => rejected.push(Rejection { level, modulus: m, reason }),
            }
            m += 1;
        };
        let Some((chi, k0, q)) = found else {
            return Ok(ApproxSequence {
                levels,
                rejected,
                exhausted: Some(Error::SearchExhausted { lo: budget.min_modulus.max(1), hi: budget.max_modulus }),
            });
        };
        let rep = Arc::new(induce(&q, &chi)?);
        let certificate = certify(group, lambda, &rep, level, eps, outside, central)?;
        if certificate.max_central_error > eps || certificate.outside_traces.iter().any(|z| !z) {
            return Err(Error::Numerical(format!("certificate at modulus {m} fails its own bound")));
        }
        levels.push(ApproxLevel { certificate, character: chi.summary(), k0, rep });
    }
    Ok(ApproxSequence { levels, rejected, exhausted: None })
}

/// Checks one modulus cheaply on the image of `C` before enumerating the
/// whole quotient; `Err` carries the rejection reason.
#[allow(clippy::too_many_arguments)]
fn try_modulus(
    group: &Arc<GroupSpec>,
    lambda: &Character,
    eps: f64,
    outside: &[ExactMatrix],
    central: &[ExactMatrix],
    m: u64,
    cap: usize,
    full: &mut Option<Arc<FiniteQuotient>>,
) -> std::result::Result<(QuotientCharacter, u64, Arc<FiniteQuotient>), String> {
    let cq = Arc::new(enumerate_center_quotient(group, m, cap).map_err(|e| e.to_string())?);
    for a in outside {
        let r = a.reduce_mod(m).map_err(|e| e.to_string())?;
        if cq.lookup_residues(&r.residues().expect("reduced")).is_some() {
            return Err(format!("{a} maps into the image of C"));
        }
    }
    let cc = build_compatible_characters(&cq, &cq, lambda, eps, central).map_err(|e| e.to_string())?;
    if cc.max_error > eps {
        return Err(format!("central error {:.3e} exceeds {eps}", cc.max_error));
    }
    let q = match full {
        Some(q) if q.modulus() == m => q.clone(),
        _ => {
            let q = Arc::new(enumerate_quotient(group, m, cap).map_err(|e| e.to_string())?);
            *full = Some(q.clone());
            q
        }
    };
    if !verify_filtration(&q, outside, &[]).map_err(|e| e.to_string())? {
        return Err("filtration conditions fail on the full quotient".into());
    }
    let chi = QuotientCharacter::from_basis_values(q.clone(), cc.a.basis_values().to_vec()).map_err(|e| e.to_string())?;
    Ok((chi, cc.k0, q))
}
