use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::ExactMatrix;
use crate::groups::GroupSpec;
use crate::quotients::finite::{center_image_residues, residues_of};

pub const ONE_SIDED_CAVEAT: &str = "congruence quotients are a subfamily of all finite quotients: \
     'inside' at every tested modulus is consistent with non-separability but does not prove it";

#[derive(Clone, Copy, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Inside,
    Outside,
    Error,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct ProbeVerdict {
    pub modulus: u64,
    pub verdict: Verdict,
    /// Order of the image of `C` modulo `modulus`.
    pub center_image_order: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, Default, Serialize, PartialEq)]
pub struct ProbeTimings {
    pub elapsed_ms: Vec<(u64, f64)>,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct ProbeReport {
    pub group: String,
    pub element: String,
    pub verdicts: Vec<ProbeVerdict>,
    pub inside: usize,
    pub outside: usize,
    pub errors: usize,
    pub caveat: &'static str,
    pub metadata: ProbeTimings,
}

/// For each modulus, decides whether the image of `x` lies in the image of
/// `C`. Moduli are processed in parallel; output is ordered as `moduli`.
pub fn profinite_probe(group: &GroupSpec, x: &ExactMatrix, moduli: &[u64], cap: usize) -> Result<ProbeReport> {
    if group.in_center(x) {
        return Err(Error::PreconditionFailed(format!("{x} lies in the central subgroup")));
    }
    let results: Vec<(ProbeVerdict, f64)> = moduli
        .par_iter()
        .map(|&m| {
            let start = Instant::now();
            let outcome = center_image_residues(group, m, cap).and_then(|center| Ok((center.len(), center.contains(&residues_of(x, m)?))));
            let v = match outcome {
                Ok((order, inside)) => ProbeVerdict {
                    modulus: m,
                    verdict: if inside { Verdict::Inside } else { Verdict::Outside },
                    center_image_order: Some(order),
                    error: None,
                },
                Err(e) => ProbeVerdict { modulus: m, verdict: Verdict::Error, center_image_order: None, error: Some(e.to_string()) },
            };
            (v, start.elapsed().as_secs_f64() * 1e3)
        })
        .collect();
    let count = |v: Verdict| results.iter().filter(|(r, _)| r.verdict == v).count();
    Ok(ProbeReport {
        group: group.name().to_string(),
        element: x.to_string(),
        inside: count(Verdict::Inside),
        outside: count(Verdict::Outside),
        errors: count(Verdict::Error),
        caveat: ONE_SIDED_CAVEAT,
        metadata: ProbeTimings { elapsed_ms: results.iter().map(|(v, t)| (v.modulus, *t)).collect() },
        verdicts: results.into_iter().map(|(v, _)| v).collect(),
    })
}
