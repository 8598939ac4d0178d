use std::sync::Arc;

use anyhow::Context;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use rfdkit::amalgam::{
    abels_experiment, separate_amalgam, separate_hnn, Amalgam, AmalgamWord, HnnWord, SeparationBudget, SeparationReport, SeparationStatus,
};
use rfdkit::characters::{psd_check, Character, QuotientCharacter};
use rfdkit::exact::ExactMatrix;
use rfdkit::groups::{abels_g0, abels_x0, evaluate_word, GroupSpec, GroupWord};
use rfdkit::quotients::{enumerate_quotient, filtration_witness, profinite_probe, verify_filtration};
use rfdkit::repkit::{
    character_approx_sequence, gns_from_state, induce, kernel_consistency_check, max_abs, verify_certificate, ApproxBudget, CMatrix,
    KernelStatus, StateVector,
};
use rfdkit::Error;

use crate::config::{ConfigError, ExperimentConfig};
use crate::report::{Outcome, Status};

fn config_err(e: impl std::fmt::Display) -> anyhow::Error {
    ConfigError(e.to_string()).into()
}

fn character(cfg: &ExperimentConfig, group: &GroupSpec) -> anyhow::Result<Character> {
    let specs = if cfg.character.is_empty() { vec!["0".to_string(); group.center().structure.rank()] } else { cfg.character.clone() };
    Character::parse(group, &specs).map_err(config_err)
}

/// A word in the generators, or `x0` / `g0` in an Abels group.
fn element(group: &GroupSpec, spec: &str) -> anyhow::Result<ExactMatrix> {
    let abels_p = group.name().strip_prefix("abels-").and_then(|p| p.parse::<u64>().ok());
    match (spec.trim(), abels_p) {
        ("x0", Some(p)) => Ok(abels_x0(p)),
        ("g0", Some(p)) => Ok(abels_g0(p)),
        (s, _) => {
            let w = GroupWord::parse(s).map_err(config_err)?;
            evaluate_word(group, &w).map_err(config_err)
        }
    }
}

fn elements_or(cfg: &ExperimentConfig, group: &GroupSpec, default: impl FnOnce() -> Vec<ExactMatrix>) -> anyhow::Result<Vec<ExactMatrix>> {
    if cfg.elements.is_empty() {
        Ok(default())
    } else {
        cfg.elements.iter().map(|s| element(group, s)).collect()
    }
}

fn noncentral_generators(group: &GroupSpec) -> Vec<ExactMatrix> {
    group.generators().iter().filter(|g| !group.in_center(&g.matrix)).map(|g| g.matrix.clone()).collect()
}

fn central_generators(group: &GroupSpec) -> Vec<ExactMatrix> {
    group.center().generators.iter().map(|c| c.matrix.clone()).collect()
}

fn is_budget_error(e: &Error) -> bool {
    matches!(e, Error::CapExceeded { .. } | Error::DimensionCapExceeded { .. } | Error::SearchExhausted { .. })
}

fn random_element(group: &GroupSpec, rng: &mut ChaCha8Rng, len: usize) -> anyhow::Result<ExactMatrix> {
    let gens = group.generators();
    let letters: Vec<(String, i64)> =
        (0..len).map(|_| (gens[rng.random_range(0..gens.len())].name.clone(), rng.random_range(-3..=3))).collect();
    Ok(evaluate_word(group, &GroupWord::new(letters))?)
}

pub fn quotient(cfg: &ExperimentConfig) -> anyhow::Result<Outcome> {
    let group = cfg.load_group()?;
    let mut records = Vec::new();
    let mut summary = Vec::new();
    let mut status = Status::Pass;
    for m in cfg.modulus_range.moduli() {
        match enumerate_quotient(&group, m, cfg.cap) {
            Ok(q) => {
                let s = q.summary();
                summary
                    .push(format!("m = {m}: order {}, image of C {}, transversal {}", s.order, s.center_image_order, s.transversal_size));
                records.push(serde_json::to_value(&s)?);
            }
            Err(e) => {
                let kind = if is_budget_error(&e) {
                    status = status.max(Status::Inconclusive);
                    "inconclusive"
                } else if matches!(e, Error::NonInvertiblePrime { .. } | Error::IncompatibleModulus { .. }) {
                    "skipped"
                } else {
                    status = Status::Fail;
                    "error"
                };
                summary.push(format!("m = {m}: {kind}: {e}"));
                records.push(json!({"modulus": m, "status": kind, "error": e.to_string()}));
            }
        }
    }
    let result = json!({"group": group.name(), "quotients": records});
    Outcome::new(status, records, result, summary)
}

pub fn filtration(cfg: &ExperimentConfig) -> anyhow::Result<Outcome> {
    let group = cfg.load_group()?;
    let outside = elements_or(cfg, &group, || noncentral_generators(&group))?;
    let range = cfg.modulus_range.lo..=cfg.modulus_range.hi;
    match filtration_witness(&group, &outside, &[], range, cfg.cap) {
        Ok(w) => {
            let verified = verify_filtration(&w.quotient, &outside, &[])?;
            let result = json!({
                "group": group.name(),
                "modulus": w.modulus,
                "order": w.quotient.order(),
                "outside": outside.iter().map(|a| a.to_string()).collect::<Vec<_>>(),
                "verified": verified,
                "rejected": w.rejected,
            });
            let records = w.rejected.iter().map(serde_json::to_value).collect::<Result<Vec<_>, _>>()?;
            let summary = vec![format!(
                "witness modulus {} (order {}), {} moduli rejected, independent re-check {}",
                w.modulus,
                w.quotient.order(),
                w.rejected.len(),
                if verified { "passed" } else { "FAILED" }
            )];
            Outcome::new(if verified { Status::Pass } else { Status::Fail }, records, result, summary)
        }
        Err(e @ Error::SearchExhausted { .. }) => {
            let result = json!({"group": group.name(), "exhausted": e.to_string()});
            Outcome::new(Status::Inconclusive, vec![], result, vec![format!("no witness: {e}")])
        }
        Err(e) => Err(e.into()),
    }
}

pub fn probe(cfg: &ExperimentConfig) -> anyhow::Result<Outcome> {
    let group = cfg.load_group()?;
    let x = match cfg.elements.first() {
        Some(s) => element(&group, s)?,
        None if group.name().starts_with("abels-") => element(&group, "x0")?,
        None => noncentral_generators(&group).into_iter().next().context("group has no non-central generator")?,
    };
    let report = profinite_probe(&group, &x, &cfg.modulus_range.moduli(), cfg.cap)?;
    let records = report.verdicts.iter().map(serde_json::to_value).collect::<Result<Vec<_>, _>>()?;
    let status = if report.errors > 0 { Status::Inconclusive } else { Status::Pass };
    let summary = vec![
        format!("{} vs image of C: inside {}, outside {}, errors {}", report.element, report.inside, report.outside, report.errors),
        report.caveat.to_string(),
    ];
    Outcome::new(status, records, &report, summary)
}

/// Outside tests `g` and `g·c⁵` for each non-central generator `g`.
fn approx_tests(group: &GroupSpec) -> Vec<ExactMatrix> {
    let mut out = Vec::new();
    let c5 = group.center().generators.first().map(|c| c.matrix.pow(5));
    for g in noncentral_generators(group) {
        if let Some(Ok(c5)) = &c5 {
            if let Ok(gc) = g.mul(c5) {
                out.push(g.clone());
                out.push(gc);
                continue;
            }
        }
        out.push(g);
    }
    out
}

pub fn char_approx(cfg: &ExperimentConfig) -> anyhow::Result<Outcome> {
    let group = cfg.load_group()?;
    let lambda = character(cfg, &group)?;
    let outside = elements_or(cfg, &group, || approx_tests(&group))?;
    let central = central_generators(&group);
    let budget = ApproxBudget { min_modulus: cfg.modulus_range.lo, max_modulus: cfg.modulus_range.hi, levels: cfg.levels, cap: cfg.cap };
    let seq = character_approx_sequence(&group, &lambda, cfg.epsilon, &outside, &central, budget)?;
    let mut status = Status::Pass;
    let mut records = Vec::new();
    let mut summary = Vec::new();
    for l in &seq.levels {
        let verified = verify_certificate(&group, &lambda, &l.rep, &l.certificate, &outside, &central)?;
        let traces_zero = l.certificate.outside_traces.iter().all(|&t| t);
        if !verified || !traces_zero {
            status = Status::Fail;
        }
        summary.push(format!(
            "level {}: m = {}, dim {}, central error {:.3e} (≤ {:.3e}), outside traces zero: {}, re-verified: {}",
            l.certificate.level,
            l.certificate.modulus,
            l.certificate.dim,
            l.certificate.max_central_error,
            l.certificate.epsilon_level,
            traces_zero,
            verified
        ));
        records.push(json!({"certificate": l.certificate, "k0": l.k0, "character": l.character, "verified": verified}));
    }
    if let Some(e) = &seq.exhausted {
        status = status.max(Status::Inconclusive);
        summary.push(format!("search exhausted: {e}"));
    }
    let result = json!({
        "group": group.name(),
        "character": lambda,
        "levels": records,
        "rejected": seq.rejected,
        "exhausted": seq.exhausted.as_ref().map(|e| e.to_string()),
    });
    Outcome::new(status, records.clone(), result, summary)
}

pub fn psd(cfg: &ExperimentConfig) -> anyhow::Result<Outcome> {
    let group = cfg.load_group()?;
    let lambda = character(cfg, &group)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed());
    let mut records = Vec::new();
    let mut worst = f64::INFINITY;
    let mut failures = 0;
    for i in 0..cfg.samples {
        let size = rng.random_range(1..=12);
        let mut elems = Vec::with_capacity(size);
        for _ in 0..size {
            let len = rng.random_range(0..=4);
            elems.push(random_element(&group, &mut rng, len)?);
        }
        let r = psd_check(&group, &lambda, &elems, 1e-9)?;
        worst = worst.min(r.min_eigenvalue);
        failures += usize::from(!r.pass);
        records.push(json!({"sample": i, "report": r}));
    }
    let status = if failures == 0 { Status::Pass } else { Status::Fail };
    let summary = vec![format!("{} Gram matrices, {} below −1e−9, smallest eigenvalue {worst:.3e}", cfg.samples, failures)];
    let result = json!({"group": group.name(), "character": lambda, "samples": cfg.samples, "failures": failures, "min_eigenvalue": worst});
    Outcome::new(status, records, result, summary)
}

pub fn gns(cfg: &ExperimentConfig) -> anyhow::Result<Outcome> {
    let group = cfg.load_group()?;
    let lambda = character(cfg, &group)?;
    let mut status = Status::Pass;
    let mut records = Vec::new();
    let mut summary = Vec::new();
    for m in cfg.modulus_range.moduli() {
        match gns_at(&group, &lambda, m, cfg.cap) {
            Ok((record, ok, line)) => {
                if !ok {
                    status = Status::Fail;
                }
                summary.push(line);
                records.push(record);
            }
            Err(e) => {
                let e = e.downcast::<Error>()?;
                let kind = if is_budget_error(&e) { Status::Inconclusive } else { Status::Fail };
                status = status.max(kind);
                summary.push(format!("m = {m}: {e}"));
                records.push(json!({"modulus": m, "status": kind, "error": e.to_string()}));
            }
        }
    }
    let result = json!({"group": group.name(), "character": lambda, "moduli": records});
    Outcome::new(status, records, result, summary)
}

fn gns_at(group: &Arc<GroupSpec>, lambda: &Character, m: u64, cap: usize) -> anyhow::Result<(Value, bool, String)> {
    let q = Arc::new(enumerate_quotient(group, m, cap)?);
    let chi = QuotientCharacter::approximate(q.clone(), lambda)?;
    let rho = Arc::new(induce(&q, &chi)?);
    let g = gns_from_state(&rho, &StateVector::NormalizedTrace, &q)?;
    let d = rho.dim();
    let action = match g.rep.realization() {
        rfdkit::repkit::Realization::Gns(a) => a,
        _ => unreachable!("GNS result carries a GNS realization"),
    };
    let mut scalar_defect = 0.0f64;
    for c in &group.center().generators {
        let e = q.image_of(&c.matrix)?;
        let value = chi.complex_at(e).unwrap_or(Complex64::new(f64::NAN, 0.0));
        let lam = action.matrix(e)?;
        scalar_defect = scalar_defect.max(max_abs(&(lam - CMatrix::identity(g.dim, g.dim) * value)));
    }
    let ok = g.dim <= d * d && g.state_error <= 1e-9 && scalar_defect <= 1e-12;
    let line = format!(
        "m = {m}: source dim {d}, GNS dim {} (≤ {}), state error {:.3e}, Λ(C) scalar defect {:.3e}",
        g.dim,
        d * d,
        g.state_error,
        scalar_defect
    );
    let record = json!({"summary": g.summary(d), "center_scalar_defect": scalar_defect, "pass": ok});
    Ok((record, ok, line))
}

pub fn kernel(cfg: &ExperimentConfig) -> anyhow::Result<Outcome> {
    let group = cfg.load_group()?;
    let lambda = character(cfg, &group)?;
    let outside = approx_tests(&group);
    let central = central_generators(&group);
    let budget = ApproxBudget { min_modulus: cfg.modulus_range.lo, max_modulus: cfg.modulus_range.hi, levels: 1, cap: cfg.cap };
    let seq = character_approx_sequence(&group, &lambda, cfg.epsilon, &outside, &central, budget)?;
    let Some(level0) = seq.levels.first() else {
        let msg = seq.exhausted.map(|e| e.to_string()).unwrap_or_default();
        return Outcome::new(Status::Inconclusive, vec![], json!({"exhausted": msg}), vec![format!("no level-0 representation: {msg}")]);
    };
    let rho = &level0.rep;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed());
    let mut records = Vec::new();
    let (mut pass, mut fail, mut skipped) = (0, 0, 0);
    for i in 0..cfg.samples {
        let g = random_element(&group, &mut rng, 4)?;
        let cgen = &group.center().generators[rng.random_range(0..group.center().generators.len())];
        let c = cgen.matrix.pow(rng.random_range(-5..=5))?;
        let coords = group.center_coordinates(&c).context("central element without coordinates")?;
        let lc = lambda.value(&coords)?;
        let f = [(g.mul(&c)?, Complex64::new(1.0, 0.0)), (g.clone(), -lc)];
        let r = kernel_consistency_check(&group, &lambda, &f, rho)?;
        match r.status {
            KernelStatus::Pass => pass += 1,
            KernelStatus::Fail => fail += 1,
            KernelStatus::Skipped => skipped += 1,
        }
        records.push(json!({"sample": i, "g": g.to_string(), "c": c.to_string(), "report": r}));
    }
    let status = if fail > 0 {
        Status::Fail
    } else if skipped > 0 {
        Status::Inconclusive
    } else {
        Status::Pass
    };
    let summary = vec![format!(
        "{} pairs against the level-0 representation (m = {}, dim {}): pass {pass}, fail {fail}, skipped {skipped}",
        cfg.samples, level0.certificate.modulus, level0.certificate.dim
    )];
    let result = json!({
        "group": group.name(),
        "character": lambda,
        "certificate": level0.certificate,
        "pass": pass,
        "fail": fail,
        "skipped": skipped,
    });
    Outcome::new(status, records, result, summary)
}

fn separation_budget(cfg: &ExperimentConfig) -> SeparationBudget {
    SeparationBudget {
        moduli: cfg.modulus_range.moduli(),
        max_levels: cfg.levels,
        max_seeds: cfg.seeds,
        epsilon: cfg.epsilon,
        cap: cfg.cap,
        dim_cap: cfg.dim_cap,
    }
}

fn separation_outcome(report: SeparationReport) -> anyhow::Result<Outcome> {
    let status = match report.status {
        SeparationStatus::Separated | SeparationStatus::Identity => Status::Pass,
        SeparationStatus::Inconclusive => Status::Inconclusive,
    };
    let records = report.attempts.iter().map(serde_json::to_value).collect::<Result<Vec<_>, _>>()?;
    let mut summary = vec![format!("word {} reduces to {}", report.word, report.reduced)];
    match report.status {
        SeparationStatus::Identity => summary.push("identity in the group; no search run".into()),
        SeparationStatus::Separated => {
            let a = report.attempts.last().expect("a separating attempt");
            summary.push(format!(
                "separated at moduli {:?}, level {}{}: ‖σ(w) − I‖ = {:.6}",
                a.moduli,
                a.level,
                a.seed_index.map(|s| format!(", seed index {s}")).unwrap_or_default(),
                a.norm().unwrap_or(f64::NAN)
            ));
        }
        SeparationStatus::Inconclusive => summary.push(format!(
            "inconclusive after {} attempts ({} evaluated, largest norm {})",
            report.attempts.len(),
            report.evaluated,
            report.max_norm.map(|n| format!("{n:.3e}")).unwrap_or_else(|| "n/a".into())
        )),
    }
    Outcome::new(status, records, &report, summary)
}

pub fn separate_amalgam_cmd(cfg: &ExperimentConfig) -> anyhow::Result<Outcome> {
    let group = cfg.load_group()?;
    let lambda = character(cfg, &group)?;
    let amalgam = Amalgam::double(group);
    let word = AmalgamWord::parse(&amalgam, cfg.word.as_deref().unwrap_or_default()).map_err(config_err)?;
    separation_outcome(separate_amalgam(&amalgam, &word, &lambda, &separation_budget(cfg))?)
}

pub fn separate_hnn_cmd(cfg: &ExperimentConfig) -> anyhow::Result<Outcome> {
    let group = cfg.load_group()?;
    let lambda = character(cfg, &group)?;
    let word = HnnWord::parse(&group, cfg.word.as_deref().unwrap_or_default()).map_err(config_err)?;
    separation_outcome(separate_hnn(&group, &word, &lambda, cfg.seed(), &separation_budget(cfg))?)
}

pub fn abels(cfg: &ExperimentConfig) -> anyhow::Result<Outcome> {
    let p = cfg.p;
    let moduli: Vec<u64> = cfg.modulus_range.moduli().into_iter().filter(|m| m % p != 0).collect();
    if moduli.is_empty() {
        return Err(config_err(format!("no modulus in {} is coprime to {p}", cfg.modulus_range)));
    }
    let report = abels_experiment(p, &moduli, &separation_budget(cfg)).map_err(|e| match e {
        Error::NotPrime(_) => config_err(e),
        e => e.into(),
    })?;
    let status = if !report.witness.reduced || !report.witness.nontrivial || report.separation_successes > 0 {
        Status::Fail
    } else {
        Status::Inconclusive
    };
    let mut records: Vec<Value> = Vec::new();
    for v in &report.probe.verdicts {
        records.push(json!({"stage": "probe", "verdict": v}));
    }
    records.push(json!({"stage": "witness", "witness": report.witness}));
    for a in &report.separation.attempts {
        records.push(json!({"stage": "separation", "attempt": a}));
    }
    let summary = vec![report.summary.clone(), format!("separation status: {:?}; {}", report.separation.status, report.probe.caveat)];
    Outcome::new(status, records, &report, summary)
}
