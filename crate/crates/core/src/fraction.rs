//! Exact rational fractions for split ratios and training subsamples.
//!
//! Fractions are parsed from decimal (`0.15`), percentage (`15%`) or ratio
//! (`3/20`) notation and never pass through floating point, so
//! `floor(n * 0.7)` and `ceil(n * 0.15)` are exact.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("invalid fraction `{input}`: {reason}")]
pub struct FractionError {
    pub input: String,
    pub reason: &'static str,
}

/// A non-negative rational number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fraction(Ratio<u64>);

impl Fraction {
    pub const ZERO: Fraction = Fraction(Ratio::new_raw(0, 1));
    pub const ONE: Fraction = Fraction(Ratio::new_raw(1, 1));

    pub fn new(numer: u64, denom: u64) -> Result<Self, FractionError> {
        if denom == 0 {
            return Err(FractionError {
                input: format!("{numer}/{denom}"),
                reason: "zero denominator",
            });
        }
        Ok(Fraction(Ratio::new(numer, denom)))
    }

    pub fn numer(&self) -> u64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> u64 {
        *self.0.denom()
    }

    /// `floor(self * n)`.
    pub fn floor_of(&self, n: usize) -> usize {
        ((self.numer() as u128 * n as u128) / self.denom() as u128) as usize
    }

    /// `ceil(self * n)`.
    pub fn ceil_of(&self, n: usize) -> usize {
        (self.numer() as u128 * n as u128).div_ceil(self.denom() as u128) as usize
    }

    pub fn is_zero(&self) -> bool {
        self.numer() == 0
    }

    /// True for values in the half-open interval (0, 1].
    pub fn is_proper_nonzero(&self) -> bool {
        !self.is_zero() && *self <= Fraction::ONE
    }

    pub fn to_f64(&self) -> f64 {
        self.numer() as f64 / self.denom() as f64
    }

    pub fn checked_add(&self, other: &Fraction) -> Option<Fraction> {
        let lhs = self.0;
        let rhs = other.0;
        let denom = lhs.denom().checked_mul(*rhs.denom())?;
        let numer = lhs
            .numer()
            .checked_mul(*rhs.denom())?
            .checked_add(rhs.numer().checked_mul(*lhs.denom())?)?;
        Some(Fraction(Ratio::new(numer, denom)))
    }
}

fn parse_decimal(input: &str, s: &str) -> Result<Ratio<u64>, FractionError> {
    let err = |reason| FractionError {
        input: input.to_string(),
        reason,
    };
    let (int_part, frac_part) = match s.split_once('.') {
        Some((i, f)) => (i, f),
        None => (s, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err("empty number"));
    }
    if !int_part.bytes().all(|b| b.is_ascii_digit()) || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
        return Err(err("expected digits"));
    }
    if frac_part.len() > 18 {
        return Err(err("too many decimal places"));
    }
    let denom = 10u64.pow(frac_part.len() as u32);
    let int_val: u64 = if int_part.is_empty() {
        0
    } else {
        int_part.parse().map_err(|_| err("integer part out of range"))?
    };
    let frac_val: u64 = if frac_part.is_empty() {
        0
    } else {
        frac_part.parse().map_err(|_| err("fraction part out of range"))?
    };
    let numer = int_val
        .checked_mul(denom)
        .and_then(|v| v.checked_add(frac_val))
        .ok_or_else(|| err("value out of range"))?;
    Ok(Ratio::new(numer, denom))
}

impl FromStr for Fraction {
    type Err = FractionError;

    fn from_str(input: &str) -> Result<Self, Self::Err> {
        let s = input.trim();
        if let Some(pct) = s.strip_suffix('%') {
            let r = parse_decimal(input, pct.trim())?;
            return Ok(Fraction(r / 100));
        }
        if let Some((n, d)) = s.split_once('/') {
            let n = parse_decimal(input, n.trim())?;
            let d = parse_decimal(input, d.trim())?;
            if *d.numer() == 0 {
                return Err(FractionError {
                    input: input.to_string(),
                    reason: "zero denominator",
                });
            }
            return Ok(Fraction(n / d));
        }
        parse_decimal(input, s).map(Fraction)
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom() == 1 {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl Serialize for Fraction {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Fraction {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
