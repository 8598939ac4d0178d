use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::characters::RootOfUnity;
use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// A monomial unitary: column `j` is `phases[j] · e_{perm[j]}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialMatrix {
    perm: Vec<u32>,
    phases: Vec<RootOfUnity>,
}

impl MonomialMatrix {
    pub fn new(perm: Vec<u32>, phases: Vec<RootOfUnity>) -> Result<Self> {
        if perm.len() != phases.len() {
            return Err(Error::DimensionMismatch(perm.len(), phases.len()));
        }
        let mut seen = vec![false; perm.len()];
        for &p in &perm {
            if p as usize >= perm.len() || std::mem::replace(&mut seen[p as usize], true) {
                return Err(Error::Numerical("monomial matrix pattern is not a permutation".into()));
            }
        }
        Ok(MonomialMatrix { perm, phases })
    }

    pub fn identity(d: usize) -> Self {
        MonomialMatrix { perm: (0..d as u32).collect(), phases: vec![RootOfUnity::ONE; d] }
    }

    pub fn scalar(d: usize, value: RootOfUnity) -> Self {
        MonomialMatrix { perm: (0..d as u32).collect(), phases: vec![value; d] }
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn perm(&self) -> &[u32] {
        &self.perm
    }

    pub fn phases(&self) -> &[RootOfUnity] {
        &self.phases
    }

    /// Entry `(i, j)`, exact.
    pub fn entry(&self, i: usize, j: usize) -> Option<RootOfUnity> {
        (self.perm[j] as usize == i).then_some(self.phases[j])
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        let (perm, phases) =
            other.perm.iter().zip(&other.phases).map(|(&k, &b)| (self.perm[k as usize], self.phases[k as usize] * b)).unzip();
        Ok(MonomialMatrix { perm, phases })
    }

    pub fn adjoint(&self) -> Self {
        let d = self.dim();
        let mut perm = vec![0u32; d];
        let mut phases = vec![RootOfUnity::ONE; d];
        for j in 0..d {
            let i = self.perm[j] as usize;
            perm[i] = j as u32;
            phases[i] = self.phases[j].inverse();
        }
        MonomialMatrix { perm, phases }
    }

    /// `k`-fold block-diagonal sum.
    pub fn replicate(&self, k: usize) -> Self {
        let d = self.dim() as u32;
        let mut perm = Vec::with_capacity(self.dim() * k);
        let mut phases = Vec::with_capacity(self.dim() * k);
        for b in 0..k as u32 {
            perm.extend(self.perm.iter().map(|&p| p + b * d));
            phases.extend_from_slice(&self.phases);
        }
        MonomialMatrix { perm, phases }
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(j, &p)| p as usize == j) && self.phases.iter().all(|&p| p == RootOfUnity::ONE)
    }

    /// `Some(ω)` when the matrix is exactly `ω·I`.
    pub fn as_scalar(&self) -> Option<RootOfUnity> {
        let first = *self.phases.first()?;
        let diagonal = self.perm.iter().enumerate().all(|(j, &p)| p as usize == j);
        (diagonal && self.phases.iter().all(|&p| p == first)).then_some(first)
    }

    /// Normalized trace; exactly zero when no column is fixed.
    pub fn normalized_trace(&self) -> Complex64 {
        let mut counts: BTreeMap<RootOfUnity, usize> = BTreeMap::new();
        for (j, &p) in self.perm.iter().enumerate() {
            if p as usize == j {
                *counts.entry(self.phases[j]).or_default() += 1;
            }
        }
        let d = self.dim() as f64;
        counts.into_iter().map(|(w, c)| w.to_complex() * (c as f64 / d)).sum()
    }

    /// Whether every diagonal entry is structurally zero.
    pub fn diagonal_is_zero(&self) -> bool {
        self.perm.iter().enumerate().all(|(j, &p)| p as usize != j)
    }

    /// `‖M − I‖_op` from the cycle structure: a cycle of length `L` with
    /// phase product `e^{2πiα}` has eigenvalues `e^{2πi(α+j)/L}`.
    pub fn distance_to_identity(&self) -> f64 {
        let d = self.dim();
        let mut visited = vec![false; d];
        let mut best = 0.0f64;
        for start in 0..d {
            if visited[start] {
                continue;
            }
            let mut len = 0u64;
            let mut phase = RootOfUnity::ONE;
            let mut j = start;
            while !visited[j] {
                visited[j] = true;
                phase = phase * self.phases[j];
                j = self.perm[j] as usize;
                len += 1;
            }
            let alpha = phase.turns();
            for k in 0..len {
                let arg = PI * (alpha + k as f64) / len as f64;
                best = best.max(2.0 * arg.sin().abs());
            }
        }
        best
    }

    pub fn to_dense(&self) -> CMatrix {
        let d = self.dim();
        let mut m = CMatrix::zeros(d, d);
        for j in 0..d {
            m[(self.perm[j] as usize, j)] = self.phases[j].to_complex();
        }
        m
    }
}

/// A representation matrix, monomial when it can be kept exact.
#[derive(Clone, Debug, PartialEq)]
pub enum RepMatrix {
    Monomial(MonomialMatrix),
    Dense(CMatrix),
}

impl RepMatrix {
    pub fn identity(d: usize) -> Self {
        RepMatrix::Monomial(MonomialMatrix::identity(d))
    }

    pub fn dim(&self) -> usize {
        match self {
            RepMatrix::Monomial(m) => m.dim(),
            RepMatrix::Dense(m) => m.nrows(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        Ok(match (self, other) {
            (RepMatrix::Monomial(a), RepMatrix::Monomial(b)) => RepMatrix::Monomial(a.mul(b)?),
            (RepMatrix::Monomial(a), RepMatrix::Dense(b)) => RepMatrix::Dense(monomial_times_dense(a, b)),
            (RepMatrix::Dense(a), RepMatrix::Monomial(b)) => RepMatrix::Dense(dense_times_monomial(a, b)),
            (RepMatrix::Dense(a), RepMatrix::Dense(b)) => RepMatrix::Dense(a * b),
        })
    }

    pub fn adjoint(&self) -> Self {
        match self {
            RepMatrix::Monomial(m) => RepMatrix::Monomial(m.adjoint()),
            RepMatrix::Dense(m) => RepMatrix::Dense(m.adjoint()),
        }
    }

    pub fn to_dense(&self) -> CMatrix {
        match self {
            RepMatrix::Monomial(m) => m.to_dense(),
            RepMatrix::Dense(m) => m.clone(),
        }
    }

    pub fn normalized_trace(&self) -> Complex64 {
        match self {
            RepMatrix::Monomial(m) => m.normalized_trace(),
            RepMatrix::Dense(m) => m.trace() / m.nrows() as f64,
        }
    }

    /// `‖M − I‖_op`.
    pub fn distance_to_identity(&self) -> f64 {
        match self {
            RepMatrix::Monomial(m) => m.distance_to_identity(),
            RepMatrix::Dense(m) => operator_norm(&(m - CMatrix::identity(m.nrows(), m.ncols()))),
        }
    }

    /// `‖M*M − I‖_max`.
    pub fn unitarity_defect(&self) -> f64 {
        match self {
            RepMatrix::Monomial(_) => 0.0,
            RepMatrix::Dense(m) => max_abs(&(m.adjoint() * m - CMatrix::identity(m.nrows(), m.ncols()))),
        }
    }
}

fn monomial_times_dense(a: &MonomialMatrix, b: &CMatrix) -> CMatrix {
    // row perm[k] of the product is phases[k] · row k of b
    let mut out = CMatrix::zeros(b.nrows(), b.ncols());
    for k in 0..a.dim() {
        let w = a.phases[k].to_complex();
        let i = a.perm[k] as usize;
        for j in 0..b.ncols() {
            out[(i, j)] = w * b[(k, j)];
        }
    }
    out
}

fn dense_times_monomial(a: &CMatrix, b: &MonomialMatrix) -> CMatrix {
    // column j of the product is phases[j] · column perm[j] of a
    let mut out = CMatrix::zeros(a.nrows(), a.ncols());
    for j in 0..b.dim() {
        let w = b.phases[j].to_complex();
        let k = b.perm[j] as usize;
        for i in 0..a.nrows() {
            out[(i, j)] = a[(i, k)] * w;
        }
    }
    out
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest singular value.
pub fn operator_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().iter().copied().fold(0.0, f64::max)
}
