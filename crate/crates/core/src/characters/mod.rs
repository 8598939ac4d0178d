//! Characters of the central subgroup, their zero-extension, positivity of
//! the resulting Gram matrices, and compatible characters of finite quotients.

mod character;
mod psd;
mod quotient;
mod root;

pub use character::{extend_by_zero, Character};
pub use psd::{gram_matrix, psd_check, PsdReport};
pub use quotient::{build_compatible_characters, k0_for, CompatibleCharacters, QuotientCharacter, QuotientCharacterSummary};
pub use root::{cis_turns, Angle, RationalAngle, RootOfUnity};
