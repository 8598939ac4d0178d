//! Finite-dimensional unitary representations: induction from quotient
//! characters, traces, dimension alignment, finite GNS and the kernel test.

mod approx;
mod gns;
mod kernel;
mod matrix;
mod rep;
mod unitary;

pub use approx::{
    certify, character_approx_sequence, verify_certificate, ApproxBudget, ApproxLevel, ApproxSequence, Certificate, Rejection,
};
pub use gns::{gns_from_state, GnsAction, GnsResult, GnsSummary, StateVector, GNS_ORDER_LIMIT};
pub use kernel::{kernel_consistency_check, KernelReport, KernelStatus};
pub use matrix::{max_abs, operator_norm, CMatrix, MonomialMatrix, RepMatrix};
pub use rep::{align_dims, conjugate, induce, normalized_trace, replicate, FinDimRep, Realization, DEFAULT_DIM_CAP};
pub use unitary::random_unitary;
