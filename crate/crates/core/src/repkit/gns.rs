use std::sync::{Arc, OnceLock};

use nalgebra::DVector;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quotients::FiniteQuotient;
use crate::repkit::matrix::CMatrix;
use crate::repkit::rep::{FinDimRep, Realization};

/// Largest quotient order accepted by [`gns_from_state`].
pub const GNS_ORDER_LIMIT: usize = 4096;
const RANK_TOL: f64 = 1e-9;

/// A state on the algebra generated by a representation.
#[derive(Clone, Debug, PartialEq)]
pub enum StateVector {
    NormalizedTrace,
    /// Vector state `A ↦ ⟨Av, v⟩` for a unit vector `v`.
    Vector(DVector<Complex64>),
}

impl StateVector {
    pub fn vector(v: DVector<Complex64>) -> Result<Self> {
        let n = v.norm();
        if (n - 1.0).abs() > 1e-12 {
            return Err(Error::StateNotPositive(n));
        }
        Ok(StateVector::Vector(v))
    }

    pub fn apply(&self, m: &crate::repkit::RepMatrix) -> Result<Complex64> {
        match self {
            StateVector::NormalizedTrace => Ok(m.normalized_trace()),
            StateVector::Vector(v) => {
                if v.len() != m.dim() {
                    return Err(Error::DimensionMismatch(m.dim(), v.len()));
                }
                Ok(v.dotc(&(m.to_dense() * v)))
            }
        }
    }
}

/// The action of a quotient on a GNS space. The space is realized isometrically
/// inside `ℂ^{d×d}` (trace state, `a ↦ a/√d`) or `ℂ^d` (vector state, `a ↦ av`),
/// with an orthonormal basis stored as the columns of `basis`.
#[derive(Debug)]
pub struct GnsAction {
    quotient: Arc<FiniteQuotient>,
    source: Arc<FinDimRep>,
    state: StateVector,
    basis: CMatrix,
    cache: Vec<OnceLock<Arc<CMatrix>>>,
}

impl GnsAction {
    pub fn quotient(&self) -> &Arc<FiniteQuotient> {
        &self.quotient
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// `Λ(a)_{kl} = ⟨ρ(a) e_l, e_k⟩`.
    pub fn matrix(&self, a: u32) -> Result<CMatrix> {
        let slot = self.cache.get(a as usize).ok_or_else(|| Error::Numerical(format!("no quotient element {a}")))?;
        if let Some(m) = slot.get() {
            return Ok((**m).clone());
        }
        let rho_a = self.source.eval_index(a)?.to_dense();
        let mut moved = CMatrix::zeros(self.basis.nrows(), self.basis.ncols());
        for l in 0..self.basis.ncols() {
            let col = left_multiply(&self.state, &rho_a, &self.basis.column(l).into_owned());
            moved.set_column(l, &col);
        }
        let m = Arc::new(self.basis.adjoint() * moved);
        Ok((**slot.get_or_init(|| m)).clone())
    }
}

fn embed(state: &StateVector, m: &CMatrix) -> DVector<Complex64> {
    match state {
        StateVector::NormalizedTrace => {
            let d = m.nrows() as f64;
            DVector::from_iterator(m.len(), m.iter().map(|z| z / d.sqrt()))
        }
        StateVector::Vector(v) => m * v,
    }
}

/// Image of the embedded vector `w` under left multiplication by `a`.
fn left_multiply(state: &StateVector, a: &CMatrix, w: &DVector<Complex64>) -> DVector<Complex64> {
    match state {
        StateVector::NormalizedTrace => {
            let d = a.nrows();
            let m = CMatrix::from_column_slice(d, d, w.as_slice());
            let p = a * m;
            DVector::from_column_slice(p.as_slice())
        }
        StateVector::Vector(_) => a * w,
    }
}

#[derive(Debug)]
pub struct GnsResult {
    pub dim: usize,
    pub rep: Arc<FinDimRep>,
    pub cyclic: DVector<Complex64>,
    /// `max_a |⟨Λ(a)ξ, ξ⟩ − f(ρ(a))|` over the quotient.
    pub state_error: f64,
    pub min_gram_eigenvalue: f64,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct GnsSummary {
    pub modulus: u64,
    pub source_dim: usize,
    pub dim: usize,
    pub state_error: f64,
    pub cyclic_norm: f64,
    pub min_gram_eigenvalue: f64,
}

impl GnsResult {
    pub fn summary(&self, source_dim: usize) -> GnsSummary {
        GnsSummary {
            modulus: self.rep.quotient().map(|q| q.modulus()).unwrap_or(0),
            source_dim,
            dim: self.dim,
            state_error: self.state_error,
            cyclic_norm: self.cyclic.norm(),
            min_gram_eigenvalue: self.min_gram_eigenvalue,
        }
    }
}

/// Finite GNS construction for the state `f ∘ ρ` on the span of `{ρ(q)}`.
pub fn gns_from_state(rho: &Arc<FinDimRep>, f: &StateVector, q: &Arc<FiniteQuotient>) -> Result<GnsResult> {
    match rho.quotient() {
        Some(own) if own.modulus() == q.modulus() && own.order() == q.order() => {}
        _ => return Err(Error::PreconditionFailed("representation does not factor through this quotient".into())),
    }
    let n = q.order();
    if n > GNS_ORDER_LIMIT {
        return Err(Error::CapExceeded { modulus: q.modulus(), cap: GNS_ORDER_LIMIT });
    }
    let mats: Vec<CMatrix> = (0..n as u32).map(|e| Ok(rho.eval_index(e)?.to_dense())).collect::<Result<_>>()?;
    let phi: Vec<Complex64> = (0..n as u32).map(|e| f.apply(&rho.eval_index(e)?)).collect::<Result<_>>()?;
    if (phi[q.identity() as usize] - 1.0).norm() > 1e-12 {
        return Err(Error::StateNotPositive(phi[q.identity() as usize].re));
    }
    // Gram matrix ⟨ρ(a), ρ(b)⟩ = f(ρ(b⁻¹a)), checked for positivity
    let inverses: Vec<u32> = (0..n as u32).map(|b| q.inverse(b)).collect();
    let gram = CMatrix::from_fn(n, n, |b, a| phi[q.mul(inverses[b], a as u32) as usize]);
    let min_eig = (&gram + gram.adjoint()).scale(0.5).symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
    if min_eig < -RANK_TOL {
        return Err(Error::StateNotPositive(min_eig));
    }

    // Gram–Schmidt with a re-orthogonalization pass
    let mut basis: Vec<DVector<Complex64>> = Vec::new();
    for m in &mats {
        let mut w = embed(f, m);
        for _ in 0..2 {
            for e in &basis {
                let c = e.dotc(&w);
                w -= e * c;
            }
        }
        let norm = w.norm();
        if norm > RANK_TOL {
            basis.push(w / Complex64::new(norm, 0.0));
        }
    }
    let dim = basis.len();
    let basis = CMatrix::from_columns(&basis);
    let d = rho.dim();
    let cyclic = basis.adjoint() * embed(f, &CMatrix::identity(d, d));

    let action =
        GnsAction { quotient: q.clone(), source: rho.clone(), state: f.clone(), basis, cache: (0..n).map(|_| OnceLock::new()).collect() };
    let mut state_error = 0.0f64;
    for a in 0..n as u32 {
        let m = action.matrix(a)?;
        let value = cyclic.dotc(&(m * &cyclic));
        state_error = state_error.max((value - phi[a as usize]).norm());
    }
    let rep = Arc::new(FinDimRep::from_parts(dim, q.group().clone(), Realization::Gns(action)));
    Ok(GnsResult { dim, rep, cyclic, state_error, min_gram_eigenvalue: min_eig })
}
