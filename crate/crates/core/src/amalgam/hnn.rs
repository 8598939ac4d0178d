use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::amalgam::word::{parse_letter, Letter};
use crate::error::{Error, Result};
use crate::groups::{parse_power, GroupSpec};

#[derive(Clone, Debug, PartialEq)]
pub enum HnnLetter {
    Group(Letter),
    /// `t^k`, `k ≠ 0`.
    Stable(i64),
}

/// A word in `⟨G, t | t⁻¹ct = c (c ∈ C)⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct HnnWord {
    pub letters: Vec<HnnLetter>,
}

/// The shapes a Britton-reduced word can take, with `g_i ∉ C`, `k_i ≠ 0`
/// and `h ∈ C`. Forms 1 and 3 also cover a single block (`g t^k`, `g`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BrittonForm {
    /// `g_1 t^{k_1} … g_n t^{k_n}`
    F1,
    /// `t^{k_1} g_2 t^{k_2} … g_n t^{k_n}`
    F2,
    /// `g_1 t^{k_1} … g_n`
    F3,
    /// `t^{k_1} g_2 … g_n`
    F4,
    /// `h t^k`
    F5,
    /// `h`
    F6,
}

impl BrittonForm {
    pub fn number(self) -> u8 {
        match self {
            BrittonForm::F1 => 1,
            BrittonForm::F2 => 2,
            BrittonForm::F3 => 3,
            BrittonForm::F4 => 4,
            BrittonForm::F5 => 5,
            BrittonForm::F6 => 6,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BrittonReduced {
    pub word: HnnWord,
    pub form: BrittonForm,
    /// False only for form 6 with `h = e`.
    pub nontrivial: bool,
}

impl HnnWord {
    pub fn new(letters: Vec<HnnLetter>) -> Self {
        HnnWord { letters }
    }

    /// Whitespace-separated letters `t^k` and `name^k`.
    pub fn parse(group: &GroupSpec, s: &str) -> Result<Self> {
        let mut letters = Vec::new();
        for tok in s.split_whitespace() {
            let (name, k) = parse_power(tok)?;
            if name == "t" {
                letters.push(HnnLetter::Stable(k));
            } else {
                letters.push(HnnLetter::Group(parse_letter(group, tok)?));
            }
        }
        Ok(HnnWord { letters })
    }

    /// Largest `|k|` over the stable-letter powers.
    pub fn max_stable_power(&self) -> u64 {
        self.letters
            .iter()
            .map(|l| match l {
                HnnLetter::Stable(k) => k.unsigned_abs(),
                HnnLetter::Group(_) => 0,
            })
            .max()
            .unwrap_or(0)
    }

    /// No pinch `t^a c t^b` with `c ∈ C`, no adjacent letters of one kind,
    /// no identity letters.
    pub fn is_britton_reduced(&self, group: &GroupSpec) -> bool {
        let adjacent_ok = self
            .letters
            .windows(2)
            .all(|w| !matches!((&w[0], &w[1]), (HnnLetter::Group(_), HnnLetter::Group(_)) | (HnnLetter::Stable(_), HnnLetter::Stable(_))));
        let no_trivial = self.letters.iter().all(|l| match l {
            HnnLetter::Group(g) => !g.element.is_identity(),
            HnnLetter::Stable(k) => *k != 0,
        });
        let no_pinch = self.letters.windows(3).all(|w| match (&w[0], &w[1], &w[2]) {
            (HnnLetter::Stable(_), HnnLetter::Group(c), HnnLetter::Stable(_)) => !group.in_center(&c.element),
            _ => true,
        });
        adjacent_ok && no_trivial && no_pinch
    }
}

impl fmt::Display for HnnWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "e");
        }
        let parts: Vec<String> = self
            .letters
            .iter()
            .map(|l| match l {
                HnnLetter::Group(g) => g.label.clone(),
                HnnLetter::Stable(1) => "t".to_string(),
                HnnLetter::Stable(k) => format!("t^{k}"),
            })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Britton reduction. Since `C` is central and `t` centralizes it, every
/// letter of `C` commutes with the whole word: such letters are collected into
/// one central factor `h`, which is then absorbed into the first remaining
/// group letter (or kept in front when there is none).
pub fn britton_reduce(group: &Arc<GroupSpec>, w: &HnnWord) -> Result<BrittonReduced> {
    let mut h = Letter::new("e", group.identity());
    let mut letters: Vec<HnnLetter> = Vec::new();
    for l in &w.letters {
        match l {
            HnnLetter::Stable(0) => {}
            HnnLetter::Group(g) if g.element.is_identity() => {}
            l => letters.push(l.clone()),
        }
    }
    loop {
        let mut changed = false;
        let mut out: Vec<HnnLetter> = Vec::with_capacity(letters.len());
        for l in letters {
            match (out.last_mut(), l) {
                (Some(HnnLetter::Stable(a)), HnnLetter::Stable(b)) => {
                    *a += b;
                    changed = true;
                }
                (Some(HnnLetter::Group(a)), HnnLetter::Group(b)) => {
                    *a = a.merge(&b)?;
                    changed = true;
                }
                (_, l) => out.push(l),
            }
        }
        let mut kept = Vec::with_capacity(out.len());
        for l in out {
            match l {
                HnnLetter::Stable(0) => changed = true,
                HnnLetter::Group(g) if g.element.is_identity() => changed = true,
                HnnLetter::Group(g) if group.in_center(&g.element) => {
                    h = if h.element.is_identity() { g } else { h.merge(&g)? };
                    changed = true;
                }
                l => kept.push(l),
            }
        }
        letters = kept;
        if !changed {
            break;
        }
    }
    let has_group = letters.iter().any(|l| matches!(l, HnnLetter::Group(_)));
    if !h.element.is_identity() {
        if has_group {
            let first = letters.iter_mut().find_map(|l| match l {
                HnnLetter::Group(g) => Some(g),
                HnnLetter::Stable(_) => None,
            });
            let g = first.expect("group letter present");
            *g = h.merge(g)?;
        } else {
            letters.insert(0, HnnLetter::Group(h.clone()));
        }
    }
    let form = if !has_group {
        if letters.iter().any(|l| matches!(l, HnnLetter::Stable(_))) {
            BrittonForm::F5
        } else {
            BrittonForm::F6
        }
    } else {
        let starts_with_group = matches!(letters.first(), Some(HnnLetter::Group(_)));
        let ends_with_stable = matches!(letters.last(), Some(HnnLetter::Stable(_)));
        match (starts_with_group, ends_with_stable) {
            (true, true) => BrittonForm::F1,
            (false, true) => BrittonForm::F2,
            (true, false) => BrittonForm::F3,
            (false, false) => BrittonForm::F4,
        }
    };
    let nontrivial = !(form == BrittonForm::F6 && letters.is_empty());
    let reduced = BrittonReduced { word: HnnWord { letters }, form, nontrivial };
    if !reduced.word.is_britton_reduced(group) && !matches!(form, BrittonForm::F5 | BrittonForm::F6) {
        return Err(Error::Numerical(format!("reduction left a pinch in {}", reduced.word)));
    }
    Ok(reduced)
}
