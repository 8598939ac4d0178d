use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `e^{2πi·num/den}` with `0 ≤ num < den` and `gcd(num, den) = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RootOfUnity {
    num: u64,
    den: u64,
}

impl RootOfUnity {
    pub const ONE: RootOfUnity = RootOfUnity { num: 0, den: 1 };

    pub fn new(num: i128, den: u64) -> Self {
        assert!(den > 0, "root of unity with zero denominator");
        let r = num.rem_euclid(den as i128) as u64;
        let g = r.gcd(&den);
        RootOfUnity { num: r / g, den: den / g }
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    pub fn pow(self, k: i128) -> Self {
        let e = (self.num as i128 * k.rem_euclid(self.den as i128)).rem_euclid(self.den as i128);
        RootOfUnity::new(e, self.den)
    }

    pub fn inverse(self) -> Self {
        RootOfUnity::new(-(self.num as i128), self.den)
    }

    /// Angle in turns, in `[0, 1)`.
    pub fn turns(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Complex value; quarter turns are exact.
    pub fn to_complex(self) -> Complex64 {
        match (self.num, self.den) {
            (0, 1) => Complex64::new(1.0, 0.0),
            (1, 2) => Complex64::new(-1.0, 0.0),
            (1, 4) => Complex64::new(0.0, 1.0),
            (3, 4) => Complex64::new(0.0, -1.0),
            _ => cis_turns(self.turns()),
        }
    }
}

impl fmt::Display for RootOfUnity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl Serialize for RootOfUnity {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

pub fn cis_turns(t: f64) -> Complex64 {
    let a = TAU * t;
    Complex64::new(a.cos(), a.sin())
}

/// Angle of a character on one free basis direction, in turns.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Angle {
    /// Exactly `num/den` turns.
    Rational(RationalAngle),
    /// A real angle `θ` (value `e^{2πiθ}`).
    Real(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalAngle {
    pub num: i64,
    pub den: u64,
}

impl Angle {
    pub fn rational(num: i64, den: u64) -> Self {
        Angle::Rational(RationalAngle { num, den })
    }

    /// `"a/b"` is rational, anything else parses as a decimal.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("bad angle `{s}`"));
        if let Some((a, b)) = s.split_once('/') {
            let num: i64 = a.trim().parse().map_err(|_| bad())?;
            let den: u64 = b.trim().parse().map_err(|_| bad())?;
            if den == 0 {
                return Err(bad());
            }
            return Ok(Angle::rational(num, den));
        }
        if let Ok(v) = s.parse::<i64>() {
            return Ok(Angle::rational(v, 1));
        }
        let v: f64 = s.parse().map_err(|_| bad())?;
        if !v.is_finite() {
            return Err(bad());
        }
        Ok(Angle::Real(v))
    }

    /// Fractional part in turns.
    pub fn turns(&self) -> f64 {
        match self {
            Angle::Rational(r) => RootOfUnity::new(r.num as i128, r.den).turns(),
            Angle::Real(t) => t.rem_euclid(1.0),
        }
    }

    pub fn as_root(&self) -> Option<RootOfUnity> {
        match self {
            Angle::Rational(r) => Some(RootOfUnity::new(r.num as i128, r.den)),
            Angle::Real(_) => None,
        }
    }

    /// Nearest `k`-th root of unity `e^{2πi l/k}`, ties toward smaller `l`.
    pub fn nearest_root(&self, k: u64) -> u64 {
        assert!(k > 0);
        match self {
            Angle::Rational(r) => {
                // θk = (a k)/b with a in [0, b)
                let b = r.den as u128;
                let a = (r.num as i128).rem_euclid(r.den as i128) as u128;
                let scaled = a * k as u128;
                let fl = (scaled / b) as u64;
                let rem = scaled % b;
                let up = (fl + 1) % k;
                match (2 * rem).cmp(&b) {
                    std::cmp::Ordering::Less => fl % k,
                    std::cmp::Ordering::Greater => up,
                    std::cmp::Ordering::Equal => (fl % k).min(up),
                }
            }
            Angle::Real(t) => {
                let x = t.rem_euclid(1.0) * k as f64;
                let fl = x.floor();
                let frac = x - fl;
                let fl = fl as u64 % k;
                let up = (fl + 1) % k;
                if frac < 0.5 {
                    fl
                } else if frac > 0.5 {
                    up
                } else {
                    fl.min(up)
                }
            }
        }
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Angle::Rational(r) => write!(f, "{}/{}", r.num, r.den),
            Angle::Real(t) => write!(f, "{t}"),
        }
    }
}

impl std::ops::Mul for RootOfUnity {
    type Output = Self;

    fn mul(self, other: Self) -> Self {
        let l = self.den.lcm(&other.den);
        let a = self.num as u128 * (l / self.den) as u128 + other.num as u128 * (l / other.den) as u128;
        RootOfUnity::new((a % l as u128) as i128, l)
    }
}
