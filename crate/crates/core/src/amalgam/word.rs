use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::ExactMatrix;
use crate::groups::{parse_power, GroupSpec};

/// The two factors of `A ∗_C B`, with `φ` the identity on matrices.
#[derive(Clone, Debug)]
pub struct Amalgam {
    left: Arc<GroupSpec>,
    right: Arc<GroupSpec>,
}

impl Amalgam {
    /// Checks that the central subgroups coincide as matrix sets on their
    /// generators, so that the identity map identifies them.
    pub fn new(left: Arc<GroupSpec>, right: Arc<GroupSpec>) -> Result<Self> {
        if left.dim() != right.dim() || left.ring() != right.ring() {
            return Err(Error::InvalidGroup("amalgam factors live in different matrix groups".into()));
        }
        if left.center().structure != right.center().structure {
            return Err(Error::InvalidGroup("amalgam factors declare different central structures".into()));
        }
        for (from, to) in [(&left, &right), (&right, &left)] {
            for c in &from.center().generators {
                if !to.in_center(&c.matrix) {
                    return Err(Error::InvalidGroup(format!("central generator `{}` is not central in the other factor", c.name)));
                }
            }
        }
        Ok(Amalgam { left, right })
    }

    /// `G ∗_{C=C} G`.
    pub fn double(group: Arc<GroupSpec>) -> Self {
        Amalgam { left: group.clone(), right: group }
    }

    pub fn left(&self) -> &Arc<GroupSpec> {
        &self.left
    }

    pub fn right(&self) -> &Arc<GroupSpec> {
        &self.right
    }

    pub fn factor(&self, side: Side) -> &Arc<GroupSpec> {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    pub fn name(&self) -> String {
        format!("{} *_C {}", self.left.name(), self.right.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    fn tag(self) -> &'static str {
        match self {
            Side::Left => "L",
            Side::Right => "R",
        }
    }
}

/// A labelled group element; labels are for display only.
#[derive(Clone, Debug)]
pub struct Letter {
    pub label: String,
    pub element: ExactMatrix,
}

impl Letter {
    pub fn new(label: impl Into<String>, element: ExactMatrix) -> Self {
        Letter { label: label.into(), element }
    }

    pub(crate) fn merge(&self, other: &Letter) -> Result<Letter> {
        Ok(Letter { label: format!("{}·{}", self.label, other.label), element: self.element.mul(&other.element)? })
    }
}

impl PartialEq for Letter {
    fn eq(&self, other: &Self) -> bool {
        self.element == other.element
    }
}

/// Resolves `name^k` to a labelled element of `group`.
pub(crate) fn parse_letter(group: &GroupSpec, tok: &str) -> Result<Letter> {
    let (name, k) = parse_power(tok)?;
    Ok(Letter::new(if k == 1 { name.to_string() } else { format!("{name}^{k}") }, group.generator_power(name, k)?))
}

#[derive(Clone, Debug, PartialEq)]
pub struct AmalgamWord {
    pub letters: Vec<(Side, Letter)>,
}

impl AmalgamWord {
    pub fn new(letters: Vec<(Side, Letter)>) -> Self {
        AmalgamWord { letters }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Whitespace-separated letters `L:name^k` and `R:name^k`.
    pub fn parse(amalgam: &Amalgam, s: &str) -> Result<Self> {
        let mut letters = Vec::new();
        for tok in s.split_whitespace() {
            let (side, rest) = match tok.split_once(':') {
                Some(("L", r)) => (Side::Left, r),
                Some(("R", r)) => (Side::Right, r),
                _ => return Err(Error::Parse(format!("amalgam letter `{tok}` must start with L: or R:"))),
            };
            letters.push((side, parse_letter(amalgam.factor(side), rest)?));
        }
        Ok(AmalgamWord { letters })
    }

    /// No two neighbours share a side, and no letter of a longer word lies in `C`.
    pub fn is_reduced(&self, amalgam: &Amalgam) -> bool {
        let sides_alternate = self.letters.windows(2).all(|w| w[0].0 != w[1].0);
        let no_identity = self.letters.iter().all(|(_, l)| !l.element.is_identity());
        let no_central = self.letters.len() <= 1 || self.letters.iter().all(|(s, l)| !amalgam.factor(*s).in_center(&l.element));
        sides_alternate && no_identity && no_central
    }
}

impl fmt::Display for AmalgamWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "e");
        }
        let parts: Vec<String> = self.letters.iter().map(|(s, l)| format!("{}:{}", s.tag(), l.label)).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Normal form: identities dropped, same-side neighbours merged, and central
/// letters absorbed into their right neighbour (the left one at the end).
pub fn reduce_amalgam(amalgam: &Amalgam, w: &AmalgamWord) -> Result<AmalgamWord> {
    let mut letters: Vec<(Side, Letter)> = w.letters.iter().filter(|(_, l)| !l.element.is_identity()).cloned().collect();
    loop {
        let mut changed = false;
        let mut merged: Vec<(Side, Letter)> = Vec::with_capacity(letters.len());
        for (side, letter) in letters {
            match merged.last_mut() {
                Some((s, prev)) if *s == side => {
                    *prev = prev.merge(&letter)?;
                    changed = true;
                }
                _ => merged.push((side, letter)),
            }
        }
        merged.retain(|(_, l)| {
            let keep = !l.element.is_identity();
            changed |= !keep;
            keep
        });
        letters = merged;
        if letters.len() > 1 {
            if let Some(i) = letters.iter().position(|(s, l)| amalgam.factor(*s).in_center(&l.element)) {
                let (_, c) = letters.remove(i);
                if i < letters.len() {
                    let (_, next) = &mut letters[i];
                    *next = c.merge(next)?;
                } else {
                    let (_, prev) = &mut letters[i - 1];
                    *prev = prev.merge(&c)?;
                }
                changed = true;
            }
        }
        if !changed {
            return Ok(AmalgamWord { letters });
        }
    }
}
