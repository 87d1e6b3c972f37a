use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"p/q"` or an integer literal exactly.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let t = text.trim();
    let bad = || Error::ParseRational(text.to_string());
    if let Some((p, q)) = t.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
        let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        Ok(Rational::new(p, q))
    } else {
        BigInt::from_str(t).map(Rational::from_integer).map_err(|_| bad())
    }
}

pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

pub(crate) fn max_of(a: &Rational, b: &Rational) -> Rational {
    if a >= b {
        a.clone()
    } else {
        b.clone()
    }
}

pub(crate) fn min_of(a: &Rational, b: &Rational) -> Rational {
    if a <= b {
        a.clone()
    } else {
        b.clone()
    }
}

/// One end of an interval on the rational line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Endpoint {
    pub value: Rational,
    pub closed: bool,
}

/// Interval built as an intersection of one-sided constraints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub lo: Endpoint,
    pub hi: Endpoint,
}

impl Interval {
    pub fn open(lo: Rational, hi: Rational) -> Self {
        Self {
            lo: Endpoint {
                value: lo,
                closed: false,
            },
            hi: Endpoint {
                value: hi,
                closed: false,
            },
        }
    }

    pub fn open_closed(lo: Rational, hi: Rational) -> Self {
        let mut i = Self::open(lo, hi);
        i.hi.closed = true;
        i
    }

    /// Tightens the lower end with `x > value` (or `>=` when `closed`).
    pub fn raise_lower(&mut self, value: Rational, closed: bool) {
        if value > self.lo.value {
            self.lo = Endpoint { value, closed };
        } else if value == self.lo.value && !closed {
            self.lo.closed = false;
        }
    }

    /// Tightens the upper end with `x < value` (or `<=` when `closed`).
    pub fn lower_upper(&mut self, value: Rational, closed: bool) {
        if value < self.hi.value {
            self.hi = Endpoint { value, closed };
        } else if value == self.hi.value && !closed {
            self.hi.closed = false;
        }
    }

    pub fn is_empty(&self) -> bool {
        self.lo.value > self.hi.value
            || (self.lo.value == self.hi.value && !(self.lo.closed && self.hi.closed))
    }

    pub fn contains(&self, x: &Rational) -> bool {
        let above = if self.lo.closed {
            x >= &self.lo.value
        } else {
            x > &self.lo.value
        };
        let below = if self.hi.closed {
            x <= &self.hi.value
        } else {
            x < &self.hi.value
        };
        above && below
    }

    /// Midpoint, or the single admissible point of a degenerate closed
    /// interval.
    pub fn midpoint(&self) -> Option<Rational> {
        if self.is_empty() {
            None
        } else if self.lo.value == self.hi.value {
            Some(self.lo.value.clone())
        } else {
            Some((&self.lo.value + &self.hi.value) / int(2))
        }
    }

    /// A rational strictly inside `(lo, hi)` with denominator dividing
    /// `2^denominator_bits`, uniform over that lattice. Falls back to the
    /// midpoint when the interval is narrower than the lattice spacing.
    pub fn sample_interior<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        denominator_bits: u32,
    ) -> Option<Rational> {
        if self.lo.value >= self.hi.value {
            return None;
        }
        let den = BigInt::one() << denominator_bits as usize;
        let lo_k = (&self.lo.value * Rational::from_integer(den.clone())).floor().to_integer()
            + BigInt::one();
        let hi_k = (&self.hi.value * Rational::from_integer(den.clone())).ceil().to_integer()
            - BigInt::one();
        if lo_k > hi_k {
            return self.midpoint();
        }
        let span = (&hi_k - &lo_k).to_u128();
        let offset = match span {
            Some(span) if span < u128::MAX => rng.random_range(0..=span),
            _ => return self.midpoint(),
        };
        let k = lo_k + BigInt::from(offset);
        Some(Rational::new(k, den))
    }

    pub fn describe(&self) -> String {
        format!(
            "{}{}, {}{}",
            if self.lo.closed { "[" } else { "(" },
            format_rational(&self.lo.value),
            format_rational(&self.hi.value),
            if self.hi.closed { "]" } else { ")" }
        )
    }
}

/// Serde adapter storing rationals as `"p/q"` strings.
pub mod serde_rational {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(q))
    }

    /// Accepts `"p/q"` strings and JSON integers; floats are not exact and
    /// are rejected.
    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Int(i64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Int(n) => Ok(int(n)),
            Repr::Text(text) => parse_rational(&text).map_err(serde::de::Error::custom),
        }
    }
}
