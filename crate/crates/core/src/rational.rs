//! Nonnegative exact rationals.
//!
//! Species weights and reported objectives are rationals so that ties
//! between candidate reserves are decided exactly.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A reduced nonnegative fraction `num / den` with `den > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rational {
    num: u128,
    den: u128,
}

impl Rational {
    pub const ZERO: Rational = Rational { num: 0, den: 1 };
    pub const ONE: Rational = Rational { num: 1, den: 1 };

    pub fn new(num: u128, den: u128) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidWeight(format!("{num}/0 has a zero denominator")));
        }
        let g = num.gcd(&den);
        Ok(Rational {
            num: num / g,
            den: den / g,
        })
    }

    pub fn integer(value: u128) -> Self {
        Rational { num: value, den: 1 }
    }

    pub fn num(&self) -> u128 {
        self.num
    }

    pub fn den(&self) -> u128 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Closest rational with denominator `10^digits` to a finite nonnegative float.
    pub fn from_decimal(value: f64, digits: u32) -> Result<Self> {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::InvalidWeight(format!(
                "{value} is not a finite nonnegative number"
            )));
        }
        let den = 10u128.pow(digits);
        Rational::new((value * den as f64).round() as u128, den)
    }

    pub fn checked_mul(&self, other: &Rational) -> Option<Rational> {
        let g1 = self.num.gcd(&other.den).max(1);
        let g2 = other.num.gcd(&self.den).max(1);
        let num = (self.num / g1).checked_mul(other.num / g2)?;
        let den = (self.den / g2).checked_mul(other.den / g1)?;
        Rational::new(num, den).ok()
    }
}

impl Default for Rational {
    fn default() -> Self {
        Rational::ZERO
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        // a/b vs c/d  <=>  a*d vs c*b, widened through the quotient/remainder
        // expansion so nothing overflows.
        let (mut a, mut b, mut c, mut d) = (self.num, self.den, other.num, other.den);
        let mut flipped = false;
        loop {
            let (qa, ra) = a.div_rem(&b);
            let (qc, rc) = c.div_rem(&d);
            if qa != qc {
                let ord = qa.cmp(&qc);
                return if flipped { ord.reverse() } else { ord };
            }
            match (ra == 0, rc == 0) {
                (true, true) => return Ordering::Equal,
                (true, false) => {
                    return if flipped {
                        Ordering::Greater
                    } else {
                        Ordering::Less
                    }
                }
                (false, true) => {
                    return if flipped {
                        Ordering::Less
                    } else {
                        Ordering::Greater
                    }
                }
                (false, false) => {
                    // compare b/ra vs d/rc with the order reversed
                    (a, b, c, d) = (b, ra, d, rc);
                    flipped = !flipped;
                }
            }
        }
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl FromStr for Rational {
    type Err = Error;

    /// Accepts `7`, `9/10` or a decimal such as `0.9`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidWeight(format!("cannot parse `{s}` as a weight"));
        if let Some((n, d)) = s.split_once('/') {
            let n = n.trim().parse::<u128>().map_err(|_| bad())?;
            let d = d.trim().parse::<u128>().map_err(|_| bad())?;
            return Rational::new(n, d);
        }
        if let Ok(n) = s.parse::<u128>() {
            return Ok(Rational::integer(n));
        }
        match s.split_once('.') {
            Some((int, frac))
                if !frac.is_empty()
                    && frac.len() <= 18
                    && int.chars().all(|c| c.is_ascii_digit())
                    && frac.chars().all(|c| c.is_ascii_digit()) =>
            {
                let den = 10u128.pow(frac.len() as u32);
                let int = if int.is_empty() { 0 } else { int.parse::<u128>().map_err(|_| bad())? };
                let frac = frac.parse::<u128>().map_err(|_| bad())?;
                let num = int
                    .checked_mul(den)
                    .and_then(|v| v.checked_add(frac))
                    .ok_or_else(bad)?;
                Rational::new(num, den)
            }
            _ => Err(bad()),
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        [self.num, self.den].serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let [num, den] = <[u128; 2]>::deserialize(deserializer)?;
        Rational::new(num, den).map_err(serde::de::Error::custom)
    }
}

/// Least common multiple of all denominators.
pub(crate) fn common_denominator(values: &[Rational]) -> Result<u128> {
    values.iter().try_fold(1u128, |acc, r| {
        let g = acc.gcd(&r.den);
        (acc / g)
            .checked_mul(r.den)
            .ok_or(Error::Overflow("clearing weight denominators"))
    })
}
