use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::characters::character::{extend_by_zero, Character};
use crate::error::{Error, Result};
use crate::exact::ExactMatrix;
use crate::groups::GroupSpec;

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct PsdReport {
    pub size: usize,
    pub min_eigenvalue: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Largest `|M_ts − conj(M_st)|` before symmetrization.
    pub hermitian_defect: f64,
}

/// Gram matrix `M_st = λ̃(s⁻¹t)` over `elements`.
pub fn gram_matrix(group: &GroupSpec, lambda: &Character, elements: &[ExactMatrix]) -> Result<DMatrix<Complex64>> {
    let inverses: Vec<ExactMatrix> = elements.iter().map(|e| e.inverse()).collect::<Result<_>>()?;
    let n = elements.len();
    let mut m = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = extend_by_zero(group, lambda, &inverses[i].mul(&elements[j])?)?;
        }
    }
    Ok(m)
}

/// Minimal eigenvalue of the Gram matrix of `λ̃` on `elements`; passes iff it
/// is at least `-tol`.
pub fn psd_check(group: &GroupSpec, lambda: &Character, elements: &[ExactMatrix], tol: f64) -> Result<PsdReport> {
    if elements.is_empty() {
        return Err(Error::PreconditionFailed("element list is empty".into()));
    }
    let m = gram_matrix(group, lambda, elements)?;
    let defect = (&m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if defect > 1e-12 {
        return Err(Error::Numerical(format!("Gram matrix is not Hermitian (defect {defect:.3e})")));
    }
    let min = (&m + m.adjoint()).scale(0.5).symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
    Ok(PsdReport { size: elements.len(), min_eigenvalue: min, tolerance: tol, pass: min >= -tol, hermitian_defect: defect })
}
