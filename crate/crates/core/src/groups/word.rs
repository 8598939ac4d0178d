use std::fmt;

use crate::error::{Error, Result};
use crate::exact::ExactMatrix;
use crate::groups::GroupSpec;

/// A word `name_1^{k_1} … name_r^{k_r}` in the named generators of a group.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GroupWord {
    letters: Vec<(String, i64)>,
}

impl GroupWord {
    pub fn new(letters: impl IntoIterator<Item = (String, i64)>) -> Self {
        GroupWord { letters: letters.into_iter().filter(|(_, k)| *k != 0).collect() }
    }

    pub fn letters(&self) -> &[(String, i64)] {
        &self.letters
    }

    pub fn concat(&self, other: &GroupWord) -> GroupWord {
        GroupWord { letters: self.letters.iter().chain(&other.letters).cloned().collect() }
    }

    /// Parses whitespace- or `*`-separated letters `name` / `name^k`.
    /// `e` and the empty string denote the empty word.
    pub fn parse(s: &str) -> Result<Self> {
        let mut letters = Vec::new();
        for tok in s.split(|c: char| c.is_whitespace() || c == '*').filter(|t| !t.is_empty()) {
            if tok == "e" {
                continue;
            }
            let (name, exp) = parse_power(tok)?;
            letters.push((name.to_string(), exp));
        }
        Ok(GroupWord::new(letters))
    }
}

/// Splits `name^k` into its parts; a bare `name` has exponent 1.
pub(crate) fn parse_power(tok: &str) -> Result<(&str, i64)> {
    let (name, exp) = match tok.split_once('^') {
        Some((n, e)) => (n, e.parse::<i64>().map_err(|_| Error::Parse(format!("bad exponent in `{tok}`")))?),
        None => (tok, 1),
    };
    if name.is_empty() {
        return Err(Error::Parse(format!("missing name in `{tok}`")));
    }
    Ok((name, exp))
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "e");
        }
        let parts: Vec<String> = self.letters.iter().map(|(n, k)| if *k == 1 { n.clone() } else { format!("{n}^{k}") }).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Exact product of the generator powers of `w`.
pub fn evaluate_word(group: &GroupSpec, w: &GroupWord) -> Result<ExactMatrix> {
    let mut acc = group.identity();
    for (name, k) in &w.letters {
        acc = acc.mul(&group.generator_power(name, *k)?)?;
    }
    Ok(acc)
}
