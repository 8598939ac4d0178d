use num_complex::Complex64;
use serde::Serialize;

use crate::characters::{extend_by_zero, Character};
use crate::error::Result;
use crate::exact::ExactMatrix;
use crate::groups::GroupSpec;
use crate::repkit::matrix::{operator_norm, CMatrix};
use crate::repkit::rep::FinDimRep;

#[derive(Clone, Copy, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum KernelStatus {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct KernelReport {
    pub status: KernelStatus,
    /// `|λ̃(F*F)|`.
    pub null_value: f64,
    /// `‖ρ(F)‖_op`, absent when skipped.
    pub norm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

fn skipped(null_value: f64, reason: String) -> KernelReport {
    KernelReport { status: KernelStatus::Skipped, null_value, norm: None, reason: Some(reason) }
}

/// For `F = Σ t_g g` with `λ̃(F*F) = 0`, checks `‖ρ(F)‖ ≤ 1e−9` for a
/// representation that restricts to `λ·1` on `C`.
pub fn kernel_consistency_check(
    group: &GroupSpec,
    lambda: &Character,
    coefficients: &[(ExactMatrix, Complex64)],
    rho: &FinDimRep,
) -> Result<KernelReport> {
    // λ̃(F*F) = Σ conj(t_g) t_h λ̃(g⁻¹h)
    let mut null = Complex64::new(0.0, 0.0);
    for (g, tg) in coefficients {
        let gi = g.inverse()?;
        for (h, th) in coefficients {
            null += tg.conj() * th * extend_by_zero(group, lambda, &gi.mul(h)?)?;
        }
    }
    let null_value = null.norm();
    if null_value > 1e-12 {
        return Ok(skipped(null_value, format!("λ̃(F*F) = {null_value:.3e} is not zero")));
    }
    for c in &group.center().generators {
        let coords = group.center_coordinates(&c.matrix).expect("central generator has coordinates");
        let expected = lambda.value(&coords)?;
        let m = rho.eval(&c.matrix)?.to_dense();
        let d = m.nrows();
        let defect = (m - CMatrix::identity(d, d) * expected).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if defect > 1e-12 {
            return Ok(skipped(null_value, format!("ρ({}) differs from λ·1 by {defect:.3e}", c.name)));
        }
    }
    let d = rho.dim();
    let mut total = CMatrix::zeros(d, d);
    for (g, t) in coefficients {
        total += rho.eval(g)?.to_dense() * *t;
    }
    let norm = operator_norm(&total);
    let status = if norm <= 1e-9 { KernelStatus::Pass } else { KernelStatus::Fail };
    Ok(KernelReport { status, null_value, norm: Some(norm), reason: None })
}
