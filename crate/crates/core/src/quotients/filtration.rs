use std::collections::HashSet;
use std::ops::RangeInclusive;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::ExactMatrix;
use crate::groups::GroupSpec;
use crate::quotients::finite::{enumerate_quotient, FiniteQuotient};

/// A congruence quotient certified to keep the listed elements outside the
/// image of `C` and the listed central pairs apart.
#[derive(Debug)]
pub struct FiltrationWitness {
    pub modulus: u64,
    pub quotient: Arc<FiniteQuotient>,
    /// Moduli tried before `modulus`, with the reason each was rejected.
    pub rejected: Vec<RejectedModulus>,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct RejectedModulus {
    pub modulus: u64,
    pub reason: String,
}

fn check_inputs(group: &GroupSpec, outside: &[ExactMatrix], pairs: &[(ExactMatrix, ExactMatrix)]) -> Result<()> {
    for a in outside {
        if group.in_center(a) {
            return Err(Error::PreconditionFailed(format!("{a} lies in the central subgroup")));
        }
    }
    for (h, k) in pairs {
        if !group.in_center(h) || !group.in_center(k) {
            return Err(Error::PreconditionFailed(format!("pair ({h}, {k}) is not in the central subgroup")));
        }
        if h == k {
            return Err(Error::PreconditionFailed(format!("pair ({h}, {k}) is not distinct")));
        }
    }
    Ok(())
}

/// First violated condition, if any.
fn violation(q: &FiniteQuotient, outside: &[ExactMatrix], pairs: &[(ExactMatrix, ExactMatrix)]) -> Result<Option<String>> {
    for a in outside {
        if q.in_center_image(q.image_of(a)?) {
            return Ok(Some(format!("{a} maps into the image of C")));
        }
    }
    for (h, k) in pairs {
        if q.image_of(h)? == q.image_of(k)? {
            return Ok(Some(format!("{h} and {k} have the same image")));
        }
    }
    Ok(None)
}

/// Re-verifies a witness from scratch: the image of `C` is recomputed as the
/// set of reduced products of central generators, and every condition is
/// checked against it.
pub fn verify_filtration(q: &FiniteQuotient, outside: &[ExactMatrix], pairs: &[(ExactMatrix, ExactMatrix)]) -> Result<bool> {
    let group = q.group();
    let center = crate::quotients::finite::center_image_residues(group, q.modulus(), q.order().max(1))?;
    for a in outside {
        let r = crate::quotients::finite::residues_of(a, q.modulus())?;
        if center.contains(&r) {
            return Ok(false);
        }
    }
    for (h, k) in pairs {
        let m = q.modulus();
        if h.reduce_mod(m)? == k.reduce_mod(m)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Smallest modulus in `range` whose congruence quotient separates every
/// `outside` element from the image of `C` and every central pair from
/// each other.
pub fn filtration_witness(
    group: &Arc<GroupSpec>,
    outside: &[ExactMatrix],
    pairs: &[(ExactMatrix, ExactMatrix)],
    range: RangeInclusive<u64>,
    cap: usize,
) -> Result<FiltrationWitness> {
    check_inputs(group, outside, pairs)?;
    let mut rejected = Vec::new();
    for m in range.clone() {
        if m == 0 {
            continue;
        }
        let q = match enumerate_quotient(group, m, cap) {
            Ok(q) => q,
            Err(e @ (Error::CapExceeded { .. } | Error::NonInvertiblePrime { .. } | Error::IncompatibleModulus { .. })) => {
                rejected.push(RejectedModulus { modulus: m, reason: e.to_string() });
                continue;
            }
            Err(e) => return Err(e),
        };
        match violation(&q, outside, pairs)? {
            Some(reason) => rejected.push(RejectedModulus { modulus: m, reason }),
            None => {
                debug_assert!(verify_filtration(&q, outside, pairs)?);
                return Ok(FiltrationWitness { modulus: m, quotient: Arc::new(q), rejected });
            }
        }
    }
    Err(Error::SearchExhausted { lo: *range.start(), hi: *range.end() })
}

/// Whether `f_A(h) ↦ f_B(h)` on central generator images (identity
/// amalgam map) is a well-defined isomorphism of the central images. The
/// graph of the map, generated inside `C_A × C_B`, must have the order of
/// both factors.
pub fn central_images_compatible(qa: &FiniteQuotient, qb: &FiniteQuotient) -> bool {
    let ga = qa.center_generator_images();
    let gb = qb.center_generator_images();
    if ga.len() != gb.len() || qa.center_image().len() != qb.center_image().len() {
        return false;
    }
    let gens: Vec<(u32, u32)> = ga.iter().zip(gb).map(|((_, a), (_, b))| (*a, *b)).collect();
    let mut seen = HashSet::from([(qa.identity(), qb.identity())]);
    let mut frontier = vec![(qa.identity(), qb.identity())];
    while let Some((a, b)) = frontier.pop() {
        for &(x, y) in &gens {
            let next = (qa.mul(a, x), qb.mul(b, y));
            if seen.insert(next) {
                if seen.len() > qa.center_image().len() {
                    return false;
                }
                frontier.push(next);
            }
        }
    }
    seen.len() == qa.center_image().len()
}

/// Two-group form: one modulus for both groups, with the four separation
/// conditions and compatibility of the central images.
#[allow(clippy::too_many_arguments)]
pub fn filtration_witness_pair(
    a: &Arc<GroupSpec>,
    b: &Arc<GroupSpec>,
    outside_a: &[ExactMatrix],
    outside_b: &[ExactMatrix],
    pairs_a: &[(ExactMatrix, ExactMatrix)],
    pairs_b: &[(ExactMatrix, ExactMatrix)],
    range: RangeInclusive<u64>,
    cap: usize,
) -> Result<(FiltrationWitness, FiltrationWitness)> {
    check_inputs(a, outside_a, pairs_a)?;
    check_inputs(b, outside_b, pairs_b)?;
    let mut rejected = Vec::new();
    for m in range.clone() {
        let wa = filtration_witness(a, outside_a, pairs_a, m..=m, cap);
        let wb = filtration_witness(b, outside_b, pairs_b, m..=m, cap);
        match (wa, wb) {
            (Ok(wa), Ok(wb)) => {
                if central_images_compatible(&wa.quotient, &wb.quotient) {
                    let done = |w: FiltrationWitness| FiltrationWitness { rejected: rejected.clone(), ..w };
                    return Ok((done(wa), done(wb)));
                }
                rejected.push(RejectedModulus { modulus: m, reason: "central images not compatible".into() });
            }
            (Err(Error::SearchExhausted { .. }), _) | (_, Err(Error::SearchExhausted { .. })) => {
                rejected.push(RejectedModulus { modulus: m, reason: "separation conditions fail".into() });
            }
            (Err(e), _) | (_, Err(e)) => return Err(e),
        }
    }
    Err(Error::SearchExhausted { lo: *range.start(), hi: *range.end() })
}
