use std::sync::Arc;

use crate::amalgam::hnn::{HnnLetter, HnnWord};
use crate::amalgam::word::{reduce_amalgam, Amalgam, AmalgamWord, Letter, Side};
use crate::error::{Error, Result};
use crate::repkit::{conjugate, max_abs, CMatrix, FinDimRep, RepMatrix};

/// Entrywise distance, exact for two monomial matrices.
fn disagreement(a: &RepMatrix, b: &RepMatrix) -> f64 {
    match (a, b) {
        (RepMatrix::Monomial(x), RepMatrix::Monomial(y)) => {
            if x == y {
                0.0
            } else {
                f64::INFINITY
            }
        }
        _ => max_abs(&(a.to_dense() - b.to_dense())),
    }
}

/// Checks `ρ1(c) = ρ2(φ(c))` on the central generators.
pub fn check_amalgam_agreement(amalgam: &Amalgam, rho1: &FinDimRep, rho2: &FinDimRep) -> Result<()> {
    if rho1.dim() != rho2.dim() {
        return Err(Error::DimensionMismatch(rho1.dim(), rho2.dim()));
    }
    for c in &amalgam.left().center().generators {
        let d = disagreement(&rho1.eval(&c.matrix)?, &rho2.eval(&c.matrix)?);
        if d > 1e-12 {
            return Err(Error::AmalgamDisagreement(format!("representations differ on `{}` by {d:.3e}", c.name)));
        }
    }
    Ok(())
}

/// `σ_{ρ1,ρ2}(w)`: the ordered product of letter images.
pub fn evaluate_amalgam(amalgam: &Amalgam, rho1: &FinDimRep, rho2: &FinDimRep, w: &AmalgamWord) -> Result<RepMatrix> {
    check_amalgam_agreement(amalgam, rho1, rho2)?;
    let mut acc = RepMatrix::identity(rho1.dim());
    for (side, letter) in &w.letters {
        let rho = match side {
            Side::Left => rho1,
            Side::Right => rho2,
        };
        acc = acc.mul(&rho.eval(&letter.element)?)?;
    }
    Ok(acc)
}

/// `max_c ‖[U, ρ(c)]‖_max` over the central generators.
fn commutator_defect(rho: &FinDimRep, u: &CMatrix) -> Result<f64> {
    let mut worst = 0.0f64;
    for c in &rho.group().center().generators {
        let m = rho.eval(&c.matrix)?.to_dense();
        worst = worst.max(max_abs(&(u * &m - &m * u)));
    }
    Ok(worst)
}

/// `σ_{ρ,U}(w)` with `t ↦ U`, `t⁻¹ ↦ U*`.
pub fn evaluate_hnn(rho: &FinDimRep, u: &CMatrix, w: &HnnWord) -> Result<RepMatrix> {
    let d = rho.dim();
    if u.nrows() != d || u.ncols() != d {
        return Err(Error::DimensionMismatch(d, u.nrows()));
    }
    let defect = max_abs(&(u.adjoint() * u - CMatrix::identity(d, d)));
    if defect > 1e-9 {
        return Err(Error::Numerical(format!("U is not unitary (defect {defect:.3e})")));
    }
    let comm = commutator_defect(rho, u)?;
    if comm > 1e-12 {
        return Err(Error::CommutationFailure(format!("[U, ρ(c)] has size {comm:.3e}")));
    }
    let (pos, neg) = (RepMatrix::Dense(u.clone()), RepMatrix::Dense(u.adjoint()));
    let mut acc = RepMatrix::identity(d);
    for l in &w.letters {
        match l {
            HnnLetter::Group(g) => acc = acc.mul(&rho.eval(&g.element)?)?,
            HnnLetter::Stable(k) => {
                let step = if *k > 0 { &pos } else { &neg };
                for _ in 0..k.unsigned_abs() {
                    acc = acc.mul(step)?;
                }
            }
        }
    }
    Ok(acc)
}

/// `(U*γU, γ)`: a pair agreeing on `C`, usable for `G ∗_{C=C} G`.
pub fn hnn_to_amalgam_transfer(gamma: &Arc<FinDimRep>, u: &CMatrix) -> Result<(Arc<FinDimRep>, Arc<FinDimRep>)> {
    let comm = commutator_defect(gamma, u)?;
    if comm > 1e-12 {
        return Err(Error::CommutationFailure(format!("[U, γ(c)] has size {comm:.3e}")));
    }
    let rho = Arc::new(conjugate(gamma, u)?);
    for c in &gamma.group().center().generators {
        let d = max_abs(&(rho.eval(&c.matrix)?.to_dense() - gamma.eval(&c.matrix)?.to_dense()));
        if d > 1e-12 {
            return Err(Error::AmalgamDisagreement(format!("U*γ(`{}`)U differs from γ by {d:.3e}", c.name)));
        }
    }
    Ok((rho, gamma.clone()))
}

/// The image of `w` under `t ↦ R:g0`, `g ↦ L:g`, reduced.
pub fn embed_hnn_word(amalgam: &Amalgam, w: &HnnWord, g0: &Letter) -> Result<AmalgamWord> {
    let k_max = w.max_stable_power() as i64;
    let right = amalgam.right();
    for k in -k_max..=k_max {
        if k != 0 && right.in_center(&g0.element.pow(k)?) {
            return Err(Error::PreconditionFailed(format!("{}^{k} lies in the central subgroup", g0.label)));
        }
    }
    let mut letters = Vec::with_capacity(w.letters.len());
    for l in &w.letters {
        match l {
            HnnLetter::Group(g) => letters.push((Side::Left, g.clone())),
            HnnLetter::Stable(k) => {
                let label = if *k == 1 { g0.label.clone() } else { format!("{}^{k}", g0.label) };
                letters.push((Side::Right, Letter::new(label, g0.element.pow(*k)?)));
            }
        }
    }
    reduce_amalgam(amalgam, &AmalgamWord::new(letters))
}
