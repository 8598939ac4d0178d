//! Amalgamated free products `A ∗_C B` and HNN-extensions over a central
//! subgroup: normal forms, evaluation under finite-dimensional
//! representations, separation search, and the Abels experiment.

mod abels;
mod eval;
mod hnn;
mod separate;
mod word;


pub use abels::{abels_experiment, ExperimentReport, WitnessReport};
pub use eval::{check_amalgam_agreement, embed_hnn_word, evaluate_amalgam, evaluate_hnn, hnn_to_amalgam_transfer};
pub use hnn::{britton_reduce, BrittonForm, BrittonReduced, HnnLetter, HnnWord};
pub use separate::{
    separate_amalgam, separate_hnn, Attempt, AttemptOutcome, SeparationBudget, SeparationReport, SeparationStatus, SeparationTimings,
    INCONCLUSIVE_CAVEAT, SEPARATION_THRESHOLD,
};
pub use word::{reduce_amalgam, Amalgam, AmalgamWord, Letter, Side};
