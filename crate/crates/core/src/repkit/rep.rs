use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use num_integer::Integer;

use crate::characters::QuotientCharacter;
use crate::error::{Error, Result};
use crate::exact::ExactMatrix;
use crate::groups::{evaluate_word, GroupSpec, GroupWord};
use crate::quotients::FiniteQuotient;
use crate::repkit::gns::GnsAction;
use crate::repkit::matrix::{max_abs, CMatrix, MonomialMatrix, RepMatrix};

/// Default bound on dimensions produced by [`align_dims`].
pub const DEFAULT_DIM_CAP: usize = 4096;

/// A finite-dimensional unitary representation of a group.
#[derive(Debug)]
pub struct FinDimRep {
    dim: usize,
    group: Arc<GroupSpec>,
    realization: Realization,
}

#[derive(Debug)]
pub enum Realization {
    /// Induced from a character of the image of `C`; matrices are built on
    /// first use and cached per quotient element.
    Induced {
        chi: QuotientCharacter,
        cache: Vec<OnceLock<Arc<MonomialMatrix>>>,
    },
    /// Block-diagonal sum of `copies` copies of `base`.
    Replicated {
        base: Arc<FinDimRep>,
        copies: usize,
    },
    /// `g ↦ U* base(g) U`.
    Conjugated {
        base: Arc<FinDimRep>,
        u: CMatrix,
    },
    Gns(GnsAction),
    /// A unitary per generator name; evaluable on words only.
    Explicit {
        generators: Vec<(String, CMatrix)>,
    },
}

impl FinDimRep {
    pub(crate) fn from_parts(dim: usize, group: Arc<GroupSpec>, realization: Realization) -> Self {
        FinDimRep { dim, group, realization }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn group(&self) -> &Arc<GroupSpec> {
        &self.group
    }

    pub fn realization(&self) -> &Realization {
        &self.realization
    }

    /// The finite quotient the representation factors through, if any.
    pub fn quotient(&self) -> Option<&Arc<FiniteQuotient>> {
        match &self.realization {
            Realization::Induced { chi, .. } => Some(chi.quotient()),
            Realization::Replicated { base, .. } | Realization::Conjugated { base, .. } => base.quotient(),
            Realization::Gns(g) => Some(g.quotient()),
            Realization::Explicit { .. } => None,
        }
    }

    /// The inducing character, looking through replication.
    pub fn inducing_character(&self) -> Option<&QuotientCharacter> {
        match &self.realization {
            Realization::Induced { chi, .. } => Some(chi),
            Realization::Replicated { base, .. } => base.inducing_character(),
            _ => None,
        }
    }

    pub fn explicit(group: Arc<GroupSpec>, generators: Vec<(String, CMatrix)>) -> Result<Self> {
        let dim = generators.first().map(|(_, m)| m.nrows()).unwrap_or(1);
        for (name, m) in &generators {
            group.generator(name)?;
            if m.nrows() != dim || m.ncols() != dim {
                return Err(Error::DimensionMismatch(dim, m.nrows()));
            }
            let defect = max_abs(&(m.adjoint() * m - CMatrix::identity(dim, dim)));
            if defect > 1e-9 {
                return Err(Error::Numerical(format!("generator `{name}` is not unitary (defect {defect:.3e})")));
            }
        }
        Ok(FinDimRep { dim, group, realization: Realization::Explicit { generators } })
    }

    /// Matrix of the quotient element with index `e`.
    pub fn eval_index(&self, e: u32) -> Result<RepMatrix> {
        match &self.realization {
            Realization::Induced { chi, cache } => {
                let slot = cache.get(e as usize).ok_or_else(|| Error::Numerical(format!("no quotient element {e}")))?;
                Ok(RepMatrix::Monomial((**slot.get_or_init(|| Arc::new(induced_matrix(chi, e)))).clone()))
            }
            Realization::Replicated { base, copies } => Ok(match base.eval_index(e)? {
                RepMatrix::Monomial(m) => RepMatrix::Monomial(m.replicate(*copies)),
                RepMatrix::Dense(m) => {
                    let d = m.nrows();
                    let mut out = CMatrix::zeros(d * copies, d * copies);
                    for b in 0..*copies {
                        out.view_mut((b * d, b * d), (d, d)).copy_from(&m);
                    }
                    RepMatrix::Dense(out)
                }
            }),
            Realization::Conjugated { base, u } => {
                let inner = base.eval_index(e)?;
                let left = RepMatrix::Dense(u.adjoint()).mul(&inner)?;
                left.mul(&RepMatrix::Dense(u.clone()))
            }
            Realization::Gns(g) => Ok(RepMatrix::Dense(g.matrix(e)?)),
            Realization::Explicit { .. } => Err(Error::Unsupported("explicit representations evaluate words only".into())),
        }
    }

    /// Matrix of a group element.
    pub fn eval(&self, g: &ExactMatrix) -> Result<RepMatrix> {
        match self.quotient() {
            Some(q) => self.eval_index(q.image_of(g)?),
            None => Err(Error::Unsupported("explicit representations evaluate words only".into())),
        }
    }

    pub fn eval_word(&self, w: &GroupWord) -> Result<RepMatrix> {
        if let Realization::Explicit { generators } = &self.realization {
            let mut acc = RepMatrix::identity(self.dim);
            for (name, k) in w.letters() {
                let m = &generators.iter().find(|(n, _)| n == name).ok_or_else(|| Error::UnknownGenerator(name.clone()))?.1;
                let step = RepMatrix::Dense(if *k > 0 { m.clone() } else { m.adjoint() });
                for _ in 0..k.unsigned_abs() {
                    acc = acc.mul(&step)?;
                }
            }
            return Ok(acc);
        }
        self.eval(&evaluate_word(&self.group, w)?)
    }

    /// `Tr ρ(g) / d`.
    pub fn normalized_trace(&self, g: &ExactMatrix) -> Result<Complex64> {
        Ok(self.eval(g)?.normalized_trace())
    }
}

/// Column `j` of `Ind χ (q)`: `q t_j = t_i c` gives entry `χ(c)` at `(i, j)`.
fn induced_matrix(chi: &QuotientCharacter, e: u32) -> MonomialMatrix {
    let q = chi.quotient();
    let (perm, phases) = q
        .transversal()
        .iter()
        .map(|&t| {
            let (coset, pos) = q.coset_decomposition(q.mul(e, t));
            let c = q.center_image()[pos as usize];
            (coset, chi.value_at(c).expect("central part lies in the image of C"))
        })
        .unzip();
    MonomialMatrix::new(perm, phases).expect("cosets are permuted")
}

/// The representation of `G` induced from `χ` on the image of `C` in `q`.
pub fn induce(q: &Arc<FiniteQuotient>, chi: &QuotientCharacter) -> Result<FinDimRep> {
    if !Arc::ptr_eq(q, chi.quotient()) && (q.modulus() != chi.quotient().modulus() || q.group().name() != chi.quotient().group().name()) {
        return Err(Error::PreconditionFailed("character lives on a different quotient".into()));
    }
    if !chi.quotient().is_full() {
        return Err(Error::PreconditionFailed("induction needs the full quotient, not only the image of C".into()));
    }
    let quotient = chi.quotient();
    let cache = (0..quotient.order()).map(|_| OnceLock::new()).collect();
    Ok(FinDimRep {
        dim: quotient.transversal().len(),
        group: quotient.group().clone(),
        realization: Realization::Induced { chi: chi.clone(), cache },
    })
}

/// `Tr ρ(g) / d`.
pub fn normalized_trace(rho: &FinDimRep, g: &ExactMatrix) -> Result<Complex64> {
    rho.normalized_trace(g)
}

/// `k`-fold block-diagonal sum of `rho`.
pub fn replicate(rho: &Arc<FinDimRep>, copies: usize) -> Arc<FinDimRep> {
    if copies == 1 {
        return rho.clone();
    }
    Arc::new(FinDimRep {
        dim: rho.dim * copies,
        group: rho.group.clone(),
        realization: Realization::Replicated { base: rho.clone(), copies },
    })
}

/// Replaces each representation by a multiple of common dimension `lcm(d1, d2)`.
pub fn align_dims(r1: &Arc<FinDimRep>, r2: &Arc<FinDimRep>, cap: usize) -> Result<(Arc<FinDimRep>, Arc<FinDimRep>)> {
    let l = r1.dim.lcm(&r2.dim);
    if l > cap {
        return Err(Error::DimensionCapExceeded { dim: l, cap });
    }
    Ok((replicate(r1, l / r1.dim), replicate(r2, l / r2.dim)))
}

/// `g ↦ U* ρ(g) U`.
pub fn conjugate(rho: &Arc<FinDimRep>, u: &CMatrix) -> Result<FinDimRep> {
    if u.nrows() != rho.dim || u.ncols() != rho.dim {
        return Err(Error::DimensionMismatch(rho.dim, u.nrows()));
    }
    Ok(FinDimRep { dim: rho.dim, group: rho.group.clone(), realization: Realization::Conjugated { base: rho.clone(), u: u.clone() } })
}
