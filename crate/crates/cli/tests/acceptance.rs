//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use std::path::Path;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use rfdkit::amalgam::{separate_amalgam, separate_hnn, Amalgam, AmalgamWord, HnnWord, SeparationBudget, SeparationStatus};
use rfdkit::characters::{psd_check, Angle, Character, QuotientCharacter};
use rfdkit::exact::ExactMatrix;
use rfdkit::groups::{abels, evaluate_word, heisenberg, GroupSpec, GroupWord};
use rfdkit::quotients::{enumerate_quotient, FiniteQuotient, DEFAULT_CAP};
use rfdkit::repkit::{
    character_approx_sequence, gns_from_state, induce, kernel_consistency_check, max_abs, ApproxBudget, CMatrix, KernelStatus, Realization,
    RepMatrix, StateVector,
};

type Check = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Check + 'a>);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {{
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    }};
}

fn heis() -> Arc<GroupSpec> {
    Arc::new(heisenberg())
}

fn lambda(group: &GroupSpec, angle: &str) -> Character {
    Character::parse(group, &[angle.to_string()]).unwrap()
}

fn gen(group: &GroupSpec, name: &str) -> ExactMatrix {
    group.generator(name).unwrap().clone()
}

fn word(group: &GroupSpec, s: &str) -> ExactMatrix {
    evaluate_word(group, &GroupWord::parse(s).unwrap()).unwrap()
}

fn within(start: Instant, limit: Duration) -> Check {
    let t = start.elapsed();
    if t < limit {
        Ok(format!("{:.2} s", t.as_secs_f64()))
    } else {
        Err(format!("took {:.2} s, limit {} s", t.as_secs_f64(), limit.as_secs()))
    }
}

fn rational_exactness() -> Check {
    let start = Instant::now();
    let g = heis();
    let (x, z) = (gen(&g, "x"), gen(&g, "z"));
    let xz5 = x.mul(&z.pow(5).unwrap()).unwrap();
    let budget = ApproxBudget { levels: 1, ..ApproxBudget::default() };
    let seq = character_approx_sequence(&g, &lambda(&g, "1/3"), 0.1, &[x.clone(), xz5.clone()], &[z], budget).map_err(|e| e.to_string())?;
    let level = seq.levels.first().ok_or("no certificate")?;
    let c = &level.certificate;
    ensure!(c.modulus == 3 && c.dim == 9, "got m = {}, dim {}", c.modulus, c.dim);
    ensure!(c.max_central_error == 0.0, "central error {}", c.max_central_error);
    for a in [&x, &xz5] {
        match level.rep.eval(a).map_err(|e| e.to_string())? {
            RepMatrix::Monomial(m) => ensure!(m.diagonal_is_zero(), "ρ({a}) has a nonzero diagonal entry"),
            RepMatrix::Dense(_) => return Err("induced matrix is not monomial".into()),
        }
    }
    let t = within(start, Duration::from_secs(1))?;
    Ok(format!("m = 3, dim 9, error 0, zero diagonals; {t}"))
}

fn irrational_approximation() -> Check {
    let start = Instant::now();
    let g = heis();
    let (x, z) = (gen(&g, "x"), gen(&g, "z"));
    let xz5 = x.mul(&z.pow(5).unwrap()).unwrap();
    let lam = Character::new(g.center().structure.clone(), vec![Angle::Real(std::f64::consts::SQRT_2 - 1.0)], vec![]).unwrap();
    let budget = ApproxBudget { min_modulus: 1, max_modulus: 629, levels: 1, cap: 1_000_000 };
    let seq = character_approx_sequence(&g, &lam, 0.01, &[x, xz5], &[z], budget).map_err(|e| e.to_string())?;
    let c = &seq.levels.first().ok_or_else(|| format!("no certificate: {:?}", seq.exhausted))?.certificate;
    ensure!(c.max_central_error <= 0.01, "central error {}", c.max_central_error);
    ensure!(c.modulus <= 629, "modulus {}", c.modulus);
    let t = within(start, Duration::from_secs(60))?;
    Ok(format!("m = {}, dim {}, error {:.3e}; {t}", c.modulus, c.dim, c.max_central_error))
}

fn psd_sweep() -> Check {
    let g = heis();
    let names = ["x", "y", "z"];
    let mut worst = f64::INFINITY;
    let mut count = 0;
    for (i, angle) in ["0", "1/4", "0.3"].iter().enumerate() {
        let lam = lambda(&g, angle);
        let mut rng = ChaCha8Rng::seed_from_u64(100 + i as u64);
        for _ in 0..100 {
            let size = rng.random_range(1..=12);
            let elems: Vec<ExactMatrix> = (0..size)
                .map(|_| {
                    let letters: Vec<(String, i64)> = (0..rng.random_range(0..=4))
                        .map(|_| (names[rng.random_range(0..3)].to_string(), rng.random_range(-3..=3)))
                        .collect();
                    evaluate_word(&g, &GroupWord::new(letters)).unwrap()
                })
                .collect();
            let r = psd_check(&g, &lam, &elems, 1e-9).map_err(|e| e.to_string())?;
            ensure!(r.min_eigenvalue >= -1e-9, "λ = {angle}: minimum eigenvalue {}", r.min_eigenvalue);
            worst = worst.min(r.min_eigenvalue);
            count += 1;
        }
    }
    Ok(format!("{count} Gram matrices, smallest eigenvalue {worst:.3e}"))
}

/// Product of two residue matrices, recomputed with plain integer loops.
fn oracle_product(a: &[u32], b: &[u32], n: usize, m: u64) -> Vec<u32> {
    let mut out = vec![0u32; n * n];
    for i in 0..n {
        for j in 0..n {
            let s: u64 = (0..n).map(|k| a[i * n + k] as u64 * b[k * n + j] as u64 % m).sum();
            out[i * n + j] = (s % m) as u32;
        }
    }
    out
}

fn check_pairs(q: &FiniteQuotient, n: usize, pairs: impl Iterator<Item = (u32, u32)>) -> Result<usize, String> {
    let mut checked = 0;
    for (a, b) in pairs {
        let r = oracle_product(q.residues(a), q.residues(b), n, q.modulus());
        let expected = q.lookup_residues(&r).ok_or_else(|| format!("product of {a}, {b} mod {} not enumerated", q.modulus()))?;
        ensure!(q.mul(a, b) == expected, "table entry ({a}, {b}) mod {} is wrong", q.modulus());
        checked += 1;
    }
    Ok(checked)
}

fn multiplicative_order(p: u64, m: u64) -> u64 {
    let (mut k, mut v) = (1, p % m);
    while v != 1 {
        v = v * p % m;
        k += 1;
    }
    k
}

fn quotient_oracle() -> Check {
    let g = heis();
    let mut full = 0;
    for m in 2..=5u64 {
        let q = enumerate_quotient(&g, m, DEFAULT_CAP).map_err(|e| e.to_string())?;
        ensure!(q.order() as u64 == m.pow(3), "Heisenberg mod {m} has order {}", q.order());
        let table = q.multiplication_table(512).ok_or("order above 512")?;
        let order = q.order() as u32;
        full += check_pairs(&q, 3, (0..order).flat_map(|a| (0..order).map(move |b| (a, b))))?;
        ensure!(table.len() == q.order() * q.order(), "table size");
    }
    let a = Arc::new(abels(2).unwrap());
    let mut sampled = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for m in [3u64, 5] {
        let q = enumerate_quotient(&a, m, DEFAULT_CAP).map_err(|e| e.to_string())?;
        let expected = multiplicative_order(2, m).pow(2) * m.pow(6);
        ensure!(q.order() as u64 == expected, "Abels(2) mod {m} has order {}, expected {expected}", q.order());
        let order = q.order() as u32;
        let pairs: Vec<(u32, u32)> = (0..2000).map(|_| (rng.random_range(0..order), rng.random_range(0..order))).collect();
        sampled += check_pairs(&q, 4, pairs.into_iter())?;
    }
    Ok(format!("{full} Heisenberg table entries, {sampled} sampled Abels(2) products (orders 2916, 250000)"))
}

const CORPUS: [&str; 10] = [
    "L:x R:x",
    "L:x R:x^-1",
    "L:x R:y",
    "L:y R:x^-1",
    "L:x^2 R:y^-1",
    "L:y R:y^-1",
    "L:x R:y L:y",
    "L:x R:y L:x^-1 R:y^-1",
    "R:x L:y R:x^-1 L:y^-1",
    "L:x^3 R:y^2 L:x^-3",
];

fn corpus_reports() -> Result<Vec<String>, String> {
    let amalgam = Amalgam::double(heis());
    let lam = lambda(amalgam.left(), "0");
    let budget = SeparationBudget::up_to(16);
    let mut out = Vec::new();
    for s in CORPUS {
        let w = AmalgamWord::parse(&amalgam, s).map_err(|e| e.to_string())?;
        let r = separate_amalgam(&amalgam, &w, &lam, &budget).map_err(|e| e.to_string())?;
        out.push(serde_json::to_string(&r.reproducible()).unwrap());
    }
    Ok(out)
}

fn amalgam_corpus() -> Check {
    let start = Instant::now();
    let amalgam = Amalgam::double(heis());
    let lam = lambda(amalgam.left(), "0");
    let budget = SeparationBudget::up_to(16);
    let mut worst = f64::INFINITY;
    for s in CORPUS {
        let w = AmalgamWord::parse(&amalgam, s).map_err(|e| e.to_string())?;
        ensure!(w.len() <= 4 && w.is_reduced(&amalgam), "{s} is not a reduced word of length ≤ 4");
        let r = separate_amalgam(&amalgam, &w, &lam, &budget).map_err(|e| e.to_string())?;
        ensure!(r.status == SeparationStatus::Separated, "{s}: {:?}", r.status);
        let a = r.attempts.last().unwrap();
        let norm = a.norm().unwrap();
        ensure!(norm >= 0.1 && a.moduli.iter().all(|&m| m <= 16), "{s}: norm {norm} at {:?}", a.moduli);
        worst = worst.min(norm);
    }
    let t = within(start, Duration::from_secs(60))?;
    Ok(format!("10/10 separated, smallest norm {worst:.3}; {t}"))
}

fn hnn_reports() -> Result<(String, String), String> {
    let g = heis();
    let lam = lambda(&g, "0");
    let budget = SeparationBudget::up_to(16);
    let run = |s: &str| -> Result<String, String> {
        let w = HnnWord::parse(&g, s).map_err(|e| e.to_string())?;
        let r = separate_hnn(&g, &w, &lam, 2024, &budget).map_err(|e| e.to_string())?;
        Ok(serde_json::to_string(&r.reproducible()).unwrap())
    };
    Ok((run("t^-1 x t x^-1")?, run("t^-1 z t z^-1")?))
}

fn hnn_separation() -> Check {
    let g = heis();
    let lam = lambda(&g, "0");
    let budget = SeparationBudget::up_to(16);
    let w = HnnWord::parse(&g, "t^-1 x t x^-1").unwrap();
    let r = separate_hnn(&g, &w, &lam, 2024, &budget).map_err(|e| e.to_string())?;
    ensure!(r.status == SeparationStatus::Separated, "t⁻¹xtx⁻¹: {:?}", r.status);
    let a = r.attempts.last().unwrap();
    ensure!(a.moduli[0] <= 16 && a.seed_index.unwrap() < 8, "outside budget: {:?}", a);
    let w = HnnWord::parse(&g, "t^-1 z t z^-1").unwrap();
    let r2 = separate_hnn(&g, &w, &lam, 2024, &budget).map_err(|e| e.to_string())?;
    ensure!(r2.status == SeparationStatus::Identity && r2.attempts.is_empty() && r2.reduced == "e", "t⁻¹ztz⁻¹: {:?}", r2.status);
    Ok(format!(
        "t⁻¹xtx⁻¹ separated at m = {}, seed index {} (norm {:.3}); t⁻¹ztz⁻¹ identity, no search",
        a.moduli[0],
        a.seed_index.unwrap(),
        a.norm().unwrap()
    ))
}

fn finite_gns() -> Check {
    let g = heis();
    let q = Arc::new(enumerate_quotient(&g, 3, DEFAULT_CAP).unwrap());
    let chi = QuotientCharacter::approximate(q.clone(), &lambda(&g, "1/3")).map_err(|e| e.to_string())?;
    let rho = Arc::new(induce(&q, &chi).map_err(|e| e.to_string())?);
    let r = gns_from_state(&rho, &StateVector::NormalizedTrace, &q).map_err(|e| e.to_string())?;
    ensure!(r.dim <= 81, "GNS dimension {}", r.dim);
    ensure!(r.state_error <= 1e-9, "state error {}", r.state_error);
    let Realization::Gns(action) = r.rep.realization() else { return Err("not a GNS realization".into()) };
    let ez = q.image_of(&gen(&g, "z")).unwrap();
    let value = chi.complex_at(ez).unwrap();
    let defect = max_abs(&(action.matrix(ez).unwrap() - CMatrix::identity(r.dim, r.dim) * value));
    ensure!(defect <= 1e-12, "Λ(z) differs from χ(f(z))·1 by {defect}");
    Ok(format!("dim {}, state error {:.1e}, Λ(z) scalar defect {defect:.1e}", r.dim, r.state_error))
}

fn kernel_consistency() -> Check {
    let g = heis();
    let lam = lambda(&g, "1/3");
    let (x, z) = (gen(&g, "x"), gen(&g, "z"));
    let xz5 = x.mul(&z.pow(5).unwrap()).unwrap();
    let budget = ApproxBudget { levels: 1, ..ApproxBudget::default() };
    let seq = character_approx_sequence(&g, &lam, 0.1, &[x, xz5], std::slice::from_ref(&z), budget).map_err(|e| e.to_string())?;
    ensure!(!seq.levels.is_empty(), "no level-0 certificate");
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let names = ["x", "y", "z"];
    let mut worst = 0.0f64;
    for level in &seq.levels {
        for _ in 0..50 {
            let s: Vec<String> = (0..4).map(|_| format!("{}^{}", names[rng.random_range(0..3)], rng.random_range(-3..=3))).collect();
            let gm = word(&g, &s.join(" "));
            let c = z.pow(rng.random_range(-5..=5)).unwrap();
            let lc = lam.value(&g.center_coordinates(&c).unwrap()).unwrap();
            let f = [(gm.mul(&c).unwrap(), Complex64::new(1.0, 0.0)), (gm, -lc)];
            let r = kernel_consistency_check(&g, &lam, &f, &level.rep).map_err(|e| e.to_string())?;
            ensure!(r.null_value <= 1e-12, "λ̃(F*F) = {}", r.null_value);
            ensure!(r.status == KernelStatus::Pass, "{r:?}");
            worst = worst.max(r.norm.unwrap());
        }
    }
    Ok(format!("50 pairs, max ‖ρ(F)‖ = {worst:.1e}"))
}

fn run_abels(dir: &Path) -> Result<(i32, Value, String), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_rfdkit"))
        .args(["abels", "--p", "2", "--modulus-range", "3..99", "--out"])
        .arg(dir)
        .output()
        .map_err(|e| e.to_string())?;
    let report: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let lines = std::fs::read_to_string(dir.join("results.jsonl")).map_err(|e| e.to_string())?;
    Ok((status.status.code().unwrap_or(-1), report, lines))
}

fn abels_protocol(dir: &Path) -> Check {
    let start = Instant::now();
    let (code, report, _) = run_abels(dir)?;
    let r = &report["result"];
    ensure!(code == 2, "exit code {code}");
    ensure!(r["probe"]["inside"] == 49 && r["moduli"].as_array().map(Vec::len) == Some(49), "probe: {}", r["probe"]["inside"]);
    let w = &r["witness"];
    ensure!(w["reduced"] == true && w["nontrivial"] == true && w["length"] == 4, "witness {w}");
    ensure!(r["separation_successes"] == 0, "separation successes {}", r["separation_successes"]);
    let t = within(start, Duration::from_secs(120))?;
    Ok(format!(
        "inside 49/49, witness {} certified, 0 successes ({} evaluated), exit 2; {t}",
        w["amalgam_word"].as_str().unwrap_or("?"),
        r["separation"]["evaluated"]
    ))
}

fn determinism(dir: &Path) -> Check {
    let a = corpus_reports()?;
    let b = corpus_reports()?;
    ensure!(a == b, "amalgam corpus reports differ between runs");
    let (h1, h2) = (hnn_reports()?, hnn_reports()?);
    ensure!(h1 == h2, "HNN reports differ between runs");
    let (_, mut r1, l1) = run_abels(&dir.join("first"))?;
    let (_, mut r2, l2) = run_abels(&dir.join("second"))?;
    ensure!(l1 == l2, "results.jsonl differs between runs");
    r1.as_object_mut().unwrap().remove("metadata");
    r2.as_object_mut().unwrap().remove("metadata");
    ensure!(serde_json::to_string(&r1).unwrap() == serde_json::to_string(&r2).unwrap(), "report.json differs outside metadata");
    Ok("amalgam corpus, HNN words and Abels reports byte-identical across runs".into())
}

fn main() {
    let tmp = tempfile::tempdir().expect("temporary directory");
    let criteria: Vec<Criterion> = vec![
        ("rational character exactness", Box::new(rational_exactness)),
        ("irrational character approximation", Box::new(irrational_approximation)),
        ("positive-definiteness sweep", Box::new(psd_sweep)),
        ("quotient oracle equivalence", Box::new(quotient_oracle)),
        ("amalgam separation corpus", Box::new(amalgam_corpus)),
        ("HNN separation", Box::new(hnn_separation)),
        ("finite GNS", Box::new(finite_gns)),
        ("kernel consistency", Box::new(kernel_consistency)),
        ("Abels protocol", Box::new(|| abels_protocol(&tmp.path().join("abels")))),
        ("determinism", Box::new(|| determinism(&tmp.path().join("determinism")))),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {:>2} {name}: PASS ({detail})", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL ({why})", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
