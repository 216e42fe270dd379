//! Exact rationals for sweep output. Decimals appear only when rendering.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::Error;

/// A reduced fraction `num / den` with `den > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Ratio {
    pub num: i64,
    pub den: u64,
}

impl Ratio {
    /// Panics if `den` is zero.
    pub fn new(num: i64, den: u64) -> Ratio {
        assert!(den > 0, "zero denominator");
        let g = (num.unsigned_abs()).gcd(&den).max(1);
        Ratio {
            num: num / g as i64,
            den: den / g,
        }
    }

    /// `self · m`, exact when the product is an integer.
    pub fn times(&self, m: u64) -> Option<i64> {
        let p = self.num as i128 * m as i128;
        (p % self.den as i128 == 0).then(|| (p / self.den as i128) as i64)
    }

    /// Six-decimal rendering, rounded half away from zero.
    pub fn to_decimal(&self) -> String {
        let scaled = self.num as i128 * 1_000_000;
        let den = self.den as i128;
        let q = (scaled.abs() * 2 + den) / (2 * den);
        let sign = if scaled < 0 && q != 0 { "-" } else { "" };
        format!("{sign}{}.{:06}", q / 1_000_000, q % 1_000_000)
    }
}

/// Parses `P/Q` or a bare integer `P`.
impl FromStr for Ratio {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = || Error::InvalidArgument(format!("expected a fraction P/Q, got {s:?}"));
        let (num, den) = match s.split_once('/') {
            Some((p, q)) => (p.trim(), q.trim()),
            None => (s.trim(), "1"),
        };
        let num: i64 = num.parse().map_err(|_| bad())?;
        let den: u64 = den.parse().map_err(|_| bad())?;
        if den == 0 {
            return Err(bad());
        }
        Ok(Ratio::new(num, den))
    }
}

impl PartialOrd for Ratio {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ratio {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.num as i128 * other.den as i128).cmp(&(other.num as i128 * self.den as i128))
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}
