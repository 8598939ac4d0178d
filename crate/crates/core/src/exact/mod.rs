//! Exact ring and matrix arithmetic over `Z`, `Z/m` and `Z[1/p]`.

mod matrix;
mod ring;

pub use matrix::{mat_inv, mat_mul, reduce_mod, ExactMatrix};
pub use ring::{is_prime, mod_inverse, Ring, RingValue};
