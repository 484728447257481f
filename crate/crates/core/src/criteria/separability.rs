//! Interference between visual channels.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Severity of the interference one channel receives from another.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    None,
    Minor,
    Medium,
    Major,
}

impl Severity {
    pub const ALL: [Severity; 4] = [Severity::None, Severity::Minor, Severity::Medium, Severity::Major];

    /// Interference score: 0, 0.01, 0.1 or 1.
    pub fn value(self) -> Rational {
        match self {
            Severity::None => Rational::ZERO,
            Severity::Minor => Rational::new(1, 100),
            Severity::Medium => Rational::new(1, 10),
            Severity::Major => Rational::ONE,
        }
    }

    pub fn from_value(v: Rational) -> Option<Severity> {
        Severity::ALL.into_iter().find(|s| s.value() == v)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Severity::None => "none",
            Severity::Minor => "minor",
            Severity::Medium => "medium",
            Severity::Major => "major",
        }
    }
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Accepts either the token (`"medium"`) or the numeric score (`0.1`, `"0.1"`).
impl<'de> Deserialize<'de> for Severity {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        let parsed = match Raw::deserialize(d)? {
            Raw::Text(t) => match t.as_str() {
                "none" => Some(Severity::None),
                "minor" => Some(Severity::Minor),
                "medium" => Some(Severity::Medium),
                "major" => Some(Severity::Major),
                other => other.parse::<Rational>().ok().and_then(Severity::from_value),
            },
            Raw::Number(n) => format!("{n}")
                .parse::<Rational>()
                .ok()
                .and_then(Severity::from_value),
        };
        parsed.ok_or_else(|| {
            serde::de::Error::custom("severity must be none|minor|medium|major or 0|0.01|0.1|1")
        })
    }
}

/// Worst interference a channel receives; a lone channel receives none.
pub fn separability_channel_score(received: &[Severity]) -> Severity {
    received.iter().copied().max().unwrap_or(Severity::None)
}

/// `(max_int, avg_int)` computed exactly from per-channel scores.
pub fn separability_exact(channel_scores: &[Severity]) -> Result<(Rational, Rational)> {
    if channel_scores.is_empty() {
        return Err(Error::input("separability needs at least one channel"));
    }
    let max = channel_scores.iter().map(|s| s.value()).max().unwrap_or_default();
    let sum: Rational = channel_scores.iter().map(|s| s.value()).sum();
    Ok((max, sum / Rational::from_integer(channel_scores.len() as i64)))
}

/// Which counting branch the estimate took.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatePath {
    /// Some channel receives major interference.
    Major,
    /// No major, some medium.
    Medium,
    /// Only minor or none.
    Minor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeparabilityEstimate {
    pub avg_int: Rational,
    pub path: EstimatePath,
    pub total: Rational,
}

/// Extra units credited for `count` lower-severity channels: +1 for 5..=14,
/// +2 for 15..=24, and one more per further block of ten.
fn block_bonus(count: u64) -> u64 {
    if count < 5 {
        0
    } else {
        (count - 5) / 10 + 1
    }
}

/// Counting estimate of `avg_int` that can be done mentally.
pub fn separability_estimate(channel_scores: &[Severity]) -> Result<SeparabilityEstimate> {
    let n = channel_scores.len();
    if n == 0 {
        return Err(Error::input("separability needs at least one channel"));
    }
    let count = |s| channel_scores.iter().filter(|&&x| x == s).count() as u64;
    let k_a = count(Severity::Major);
    let (total, path) = if k_a > 0 {
        let k_b = count(Severity::Medium);
        (Rational::from_integer((k_a + block_bonus(k_b)) as i64), EstimatePath::Major)
    } else {
        let k_b = count(Severity::Medium);
        if k_b > 0 {
            let k_c = count(Severity::Minor);
            (
                Rational::new((k_b + block_bonus(k_c)) as i64, 10),
                EstimatePath::Medium,
            )
        } else {
            let k_c = count(Severity::Minor);
            (Rational::new(k_c as i64, 100), EstimatePath::Minor)
        }
    };
    Ok(SeparabilityEstimate {
        avg_int: total / Rational::from_integer(n as i64),
        path,
        total,
    })
}

pub fn separability_score(max_int: Rational, avg_int: Rational) -> Result<u8> {
    if max_int.is_negative() || max_int > 1 || avg_int.is_negative() || avg_int > max_int {
        return Err(Error::input(format!(
            "inconsistent interference summary (max {max_int}, avg {avg_int})"
        )));
    }
    Ok(if max_int < Rational::new(1, 10) {
        5
    } else if max_int < 1 {
        4
    } else if avg_int < Rational::new(1, 8) {
        3
    } else if avg_int < Rational::new(1, 4) {
        2
    } else {
        1
    })
}
