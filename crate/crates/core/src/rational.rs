//! Exact rational numbers for scores and weights.
//!
//! Everything that ends up in a score sheet or report is carried as a reduced
//! `i64` fraction. Text form is a plain decimal when the fraction terminates
//! (`"4.5"`, `"-25.5"`, `"5"`) and `"p/q"` otherwise.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedMul, Signed, ToPrimitive, Zero};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Rational(Ratio<i64>);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid decimal `{input}`: {reason}")]
pub struct ParseRationalError {
    pub input: String,
    pub reason: &'static str,
}

impl Rational {
    pub const ZERO: Rational = Rational(Ratio::new_raw(0, 1));
    pub const ONE: Rational = Rational(Ratio::new_raw(1, 1));

    /// Panics if `den` is zero.
    pub fn new(num: i64, den: i64) -> Self {
        Rational(Ratio::new(num, den))
    }

    pub fn from_integer(n: i64) -> Self {
        Rational(Ratio::from_integer(n))
    }

    pub fn numer(&self) -> i64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i64 {
        *self.0.denom()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn floor(&self) -> i64 {
        self.0.floor().to_integer()
    }

    /// Nearest integer, ties toward positive infinity.
    pub fn round_half_up(&self) -> i64 {
        (self.0 + Ratio::new(1, 2)).floor().to_integer()
    }

    /// Two-decimal rendering with ties rounded away from zero (`4.665` → `"4.67"`).
    pub fn to_fixed2(&self) -> String {
        let scaled = self.0.abs() * Ratio::from_integer(100);
        let hundredths = (scaled + Ratio::new(1, 2)).floor().to_integer();
        let sign = if self.0.is_negative() && hundredths != 0 { "-" } else { "" };
        format!("{sign}{}.{:02}", hundredths / 100, hundredths % 100)
    }

    pub fn checked_add(&self, other: &Rational) -> Option<Rational> {
        self.0.checked_add(&other.0).map(Rational)
    }

    pub fn checked_mul(&self, other: &Rational) -> Option<Rational> {
        self.0.checked_mul(&other.0).map(Rational)
    }

    /// Number of decimal digits needed if the fraction terminates.
    fn terminating_digits(&self) -> Option<u32> {
        let mut den = self.denom();
        let (mut twos, mut fives) = (0u32, 0u32);
        while den % 2 == 0 {
            den /= 2;
            twos += 1;
        }
        while den % 5 == 0 {
            den /= 5;
            fives += 1;
        }
        (den == 1).then_some(twos.max(fives))
    }

    fn parse_decimal(s: &str) -> Result<Rational, ParseRationalError> {
        let err = |reason| ParseRationalError {
            input: s.to_string(),
            reason,
        };
        let (negative, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s.strip_prefix('+').unwrap_or(s)),
        };
        let (int_part, frac_part) = match body.split_once('.') {
            Some((i, f)) => (i, f),
            None => (body, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(err("no digits"));
        }
        if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
            return Err(err("unexpected character"));
        }
        let mut numer: i64 = 0;
        for b in int_part.bytes().chain(frac_part.bytes()) {
            numer = numer
                .checked_mul(10)
                .and_then(|n| n.checked_add(i64::from(b - b'0')))
                .ok_or_else(|| err("too many digits"))?;
        }
        let denom = 10i64
            .checked_pow(frac_part.len() as u32)
            .ok_or_else(|| err("too many digits"))?;
        let value = Rational(Ratio::new(numer, denom));
        Ok(if negative { -value } else { value })
    }
}

impl FromStr for Rational {
    type Err = ParseRationalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        match s.split_once('/') {
            Some((n, d)) => {
                let n = Rational::parse_decimal(n.trim())?;
                let d = Rational::parse_decimal(d.trim())?;
                if !n.is_integer() || !d.is_integer() {
                    return Err(ParseRationalError {
                        input: s.to_string(),
                        reason: "fraction terms must be integers",
                    });
                }
                if d.is_zero() {
                    return Err(ParseRationalError {
                        input: s.to_string(),
                        reason: "zero denominator",
                    });
                }
                Ok(Rational::new(n.numer(), d.numer()))
            }
            None => Rational::parse_decimal(s),
        }
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.terminating_digits() {
            Some(0) => write!(f, "{}", self.numer()),
            Some(digits) => {
                let scale = 10i128.pow(digits);
                let scaled = i128::from(self.numer()) * scale / i128::from(self.denom());
                let sign = if scaled < 0 { "-" } else { "" };
                let scaled = scaled.abs();
                let frac = format!("{:0width$}", scaled % scale, width = digits as usize);
                write!(f, "{sign}{}.{}", scaled / scale, frac.trim_end_matches('0'))
            }
            None => write!(f, "{}/{}", self.numer(), self.denom()),
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Rational({self})")
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl From<u32> for Rational {
    fn from(n: u32) -> Self {
        Rational::from_integer(i64::from(n))
    }
}

impl Add for Rational {
    type Output = Rational;
    fn add(self, rhs: Rational) -> Rational {
        Rational(self.0 + rhs.0)
    }
}

impl Sub for Rational {
    type Output = Rational;
    fn sub(self, rhs: Rational) -> Rational {
        Rational(self.0 - rhs.0)
    }
}

impl Mul for Rational {
    type Output = Rational;
    fn mul(self, rhs: Rational) -> Rational {
        Rational(self.0 * rhs.0)
    }
}

impl Div for Rational {
    type Output = Rational;
    fn div(self, rhs: Rational) -> Rational {
        Rational(self.0 / rhs.0)
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::ZERO, Add::add)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Rational {
        iter.copied().sum()
    }
}

impl PartialEq<i64> for Rational {
    fn eq(&self, other: &i64) -> bool {
        self.0 == Ratio::from_integer(*other)
    }
}

impl PartialOrd<i64> for Rational {
    fn partial_cmp(&self, other: &i64) -> Option<Ordering> {
        self.0.partial_cmp(&Ratio::from_integer(*other))
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct RationalVisitor;

        impl Visitor<'_> for RationalVisitor {
            type Value = Rational;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a decimal string, a fraction string, or a number")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Rational, E> {
                v.parse().map_err(E::custom)
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Rational, E> {
                Ok(Rational::from_integer(v))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Rational, E> {
                i64::try_from(v)
                    .map(Rational::from_integer)
                    .map_err(|_| E::custom("integer out of range"))
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Rational, E> {
                if !v.is_finite() {
                    return Err(E::custom("non-finite number"));
                }
                // Shortest round-trip text, so 0.3 reads as 3/10.
                let text = format!("{v}");
                text.parse().map_err(E::custom)
            }
        }

        deserializer.deserialize_any(RationalVisitor)
    }
}
