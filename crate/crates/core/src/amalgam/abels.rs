use std::sync::Arc;

use serde::Serialize;

use crate::amalgam::eval::embed_hnn_word;
use crate::amalgam::hnn::{britton_reduce, HnnLetter, HnnWord};
use crate::amalgam::separate::{separate_amalgam, SeparationBudget, SeparationReport, SeparationStatus};
use crate::amalgam::word::{Amalgam, Letter};
use crate::characters::{Angle, Character};
use crate::error::{Error, Result};
use crate::groups::{abels, abels_g0, abels_x0};
use crate::quotients::{profinite_probe, ProbeReport};

/// The witness `t⁻¹ x0 t x0⁻¹` and its image in `A ∗_N A`.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct WitnessReport {
    pub hnn_word: String,
    pub britton_form: u8,
    pub britton_nontrivial: bool,
    pub g0: String,
    pub amalgam_word: String,
    pub length: usize,
    pub reduced: bool,
    pub nontrivial: bool,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct ExperimentReport {
    pub p: u64,
    pub moduli: Vec<u64>,
    pub x0: String,
    pub probe: ProbeReport,
    pub witness: WitnessReport,
    pub separation: SeparationReport,
    /// The probe found `f(x0) ∈ f(N)` at every tested modulus.
    pub probe_inside_everywhere: bool,
    pub separation_successes: usize,
    pub summary: String,
}

impl ExperimentReport {
    /// Inside everywhere, witness certified, and no separation found.
    pub fn matches_expectation(&self) -> bool {
        self.probe_inside_everywhere
            && self.witness.reduced
            && self.witness.nontrivial
            && self.separation.status == SeparationStatus::Inconclusive
    }

    pub fn reproducible(&self) -> ExperimentReport {
        let mut r = self.clone();
        r.probe.metadata = Default::default();
        r.separation = r.separation.reproducible();
        r
    }
}

/// Probes `x0 = I + (1/p)E14` against `N` over `moduli`, certifies the
/// embedded witness word, and searches for a separating pair of induced
/// representations of `A ∗_N A` for it over the same moduli.
pub fn abels_experiment(p: u64, moduli: &[u64], budget: &SeparationBudget) -> Result<ExperimentReport> {
    if let Some(m) = moduli.iter().find(|&&m| m % p == 0) {
        return Err(Error::PreconditionFailed(format!("modulus {m} is not coprime to {p}")));
    }
    let group = Arc::new(abels(p)?);
    let x0 = abels_x0(p);
    let probe = profinite_probe(&group, &x0, moduli, budget.cap)?;

    let x0_letter = Letter::new("x0", x0.clone());
    let x0_inv = Letter::new("x0^-1", x0.pow(-1)?);
    let hnn = HnnWord::new(vec![HnnLetter::Stable(-1), HnnLetter::Group(x0_letter), HnnLetter::Stable(1), HnnLetter::Group(x0_inv)]);
    let britton = britton_reduce(&group, &hnn)?;
    let amalgam = Amalgam::double(group.clone());
    let g0 = Letter::new("g0", abels_g0(p));
    let embedded = embed_hnn_word(&amalgam, &hnn, &g0)?;
    let witness = WitnessReport {
        hnn_word: hnn.to_string(),
        britton_form: britton.form.number(),
        britton_nontrivial: britton.nontrivial,
        g0: g0.element.to_string(),
        amalgam_word: embedded.to_string(),
        length: embedded.len(),
        reduced: embedded.is_reduced(&amalgam),
        nontrivial: !embedded.is_empty(),
    };

    let lambda = Character::new(group.center().structure.clone(), vec![Angle::rational(0, 1)], vec![])?;
    let budget = SeparationBudget { moduli: moduli.to_vec(), ..budget.clone() };
    let separation = separate_amalgam(&amalgam, &embedded, &lambda, &budget)?;

    let probe_inside_everywhere = probe.inside == moduli.len();
    let summary = format!(
        "probe: x0 inside the image of N at {}/{} moduli; witness {} (length {}, {}); separation: {} successes in {} evaluated attempts",
        probe.inside,
        moduli.len(),
        witness.amalgam_word,
        witness.length,
        if witness.reduced && witness.nontrivial { "reduced, nontrivial" } else { "NOT certified" },
        separation.successes,
        separation.evaluated,
    );
    Ok(ExperimentReport {
        p,
        moduli: moduli.to_vec(),
        x0: x0.to_string(),
        probe,
        witness,
        separation_successes: separation.successes,
        separation,
        probe_inside_everywhere,
        summary,
    })
}
