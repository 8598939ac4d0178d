use thiserror::Error;

use crate::exact::Ring;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("ring mismatch: {0} vs {1}")]
    RingMismatch(Ring, Ring),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("matrix is not upper triangular")]
    NotUpperTriangular,
    #[error("diagonal entry {0} is not a unit")]
    NotInvertible(String),
    #[error("modulus {modulus} is not coprime to p = {p}")]
    NonInvertiblePrime { p: u64, modulus: u64 },
    #[error("cannot reduce Z/{from} modulo {to}")]
    IncompatibleModulus { from: u64, to: u64 },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("quotient modulo {modulus} has more than {cap} elements")]
    CapExceeded { modulus: u64, cap: usize },
    #[error("no modulus in {lo}..={hi} satisfies the conditions")]
    SearchExhausted { lo: u64, hi: u64 },
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("basis error: {0}")]
    BasisError(String),
    #[error("central images are not compatible: {0}")]
    IncompatibleImages(String),
    #[error("not a subgroup: {0}")]
    NotSubgroup(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("state is not positive (min Gram eigenvalue {0:e})")]
    StateNotPositive(f64),
    #[error("dimension {dim} exceeds cap {cap}")]
    DimensionCapExceeded { dim: usize, cap: usize },
    #[error("representations disagree on the amalgam: {0}")]
    AmalgamDisagreement(String),
    #[error("unitary does not commute with the central subgroup: {0}")]
    CommutationFailure(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("config: {0}")]
    Config(String),
}
