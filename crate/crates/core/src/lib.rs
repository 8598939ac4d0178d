pub mod amalgam;
pub mod characters;
pub mod error;
pub mod exact;
pub mod groups;
pub mod quotients;
pub mod repkit;

pub use error::{Error, Result};
