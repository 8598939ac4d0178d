//! Concrete group descriptions with a designated central subgroup.

mod builtin;
mod config;
mod predicate;
mod spec;
mod word;

pub use builtin::{abels, abels_g0, abels_x0, builtin, heisenberg};
pub use config::group_from_toml;
pub use predicate::{Coordinates, ShapePredicate};
pub use spec::{AbelianStructure, CentralSubgroup, GroupSpec, NamedElement};
pub(crate) use word::parse_power;
pub use word::{evaluate_word, GroupWord};
