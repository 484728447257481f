//! Level functions for the count-, flag- and category-based criteria.
//!
//! All thresholds are compared with integer cross-multiplication or exact
//! rationals, so interval edges behave exactly as written (`[75, 100)` etc.).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Number of value pairs among `k` key values.
pub fn pair_count(k: u64) -> u64 {
    k * k.saturating_sub(1) / 2
}

/// "One or a few": fewer than 10% of `total`, but a single item always qualifies.
pub fn is_a_few(count: u64, total: u64) -> bool {
    count > 0 && (count * 10 < total || count == 1)
}

/// At least 10% (and not already "a few") but under half of `total`.
pub fn is_more_than_a_few(count: u64, total: u64) -> bool {
    !is_a_few(count, total) && count * 10 >= total && count * 2 < total
}

/// Discernability of one variable from how its key-value pairs were judged.
pub fn discernability_score(easy: u64, differentiable: u64, not_differentiable: u64) -> Result<u8> {
    let n = easy + differentiable + not_differentiable;
    if n == 0 {
        return Err(Error::input("discernability needs at least one value pair"));
    }
    Ok(if easy == n {
        5
    } else if not_differentiable * 4 >= n {
        1
    } else if not_differentiable > 0 {
        2
    } else if easy * 4 >= n * 3 {
        4
    } else if easy * 2 >= n {
        3
    } else {
        // Everything differentiable but under half at ease: no level describes it.
        2
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DomainConvention {
    #[serde(rename = "noDC")]
    None,
    #[serde(rename = "cnDC")]
    Consistent,
    #[serde(rename = "inDC")]
    Inconsistent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VisualMetaphor {
    #[serde(rename = "noAM")]
    None,
    #[serde(rename = "apAM")]
    Appropriate,
    #[serde(rename = "okAM")]
    Adequate,
    #[serde(rename = "inAM")]
    Inappropriate,
}

impl DomainConvention {
    pub const ALL: [DomainConvention; 3] = [
        DomainConvention::None,
        DomainConvention::Consistent,
        DomainConvention::Inconsistent,
    ];
}

impl VisualMetaphor {
    pub const ALL: [VisualMetaphor; 4] = [
        VisualMetaphor::None,
        VisualMetaphor::Appropriate,
        VisualMetaphor::Adequate,
        VisualMetaphor::Inappropriate,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntuitivenessInputs {
    pub dc: DomainConvention,
    pub am: VisualMetaphor,
}

pub fn intuitiveness_score(inputs: IntuitivenessInputs) -> u8 {
    use DomainConvention as Dc;
    use VisualMetaphor as Am;
    match (inputs.dc, inputs.am) {
        (Dc::Consistent, Am::Appropriate) | (Dc::None, Am::Appropriate) => 5,
        (Dc::Consistent, Am::None) | (Dc::Consistent, Am::Adequate) | (Dc::None, Am::Adequate) => 4,
        (Dc::None, Am::None) => 3,
        (Dc::Consistent, Am::Inappropriate)
        | (Dc::Inconsistent, Am::Adequate)
        | (Dc::Inconsistent, Am::Appropriate) => 2,
        (Dc::None, Am::Inappropriate)
        | (Dc::Inconsistent, Am::None)
        | (Dc::Inconsistent, Am::Inappropriate) => 1,
    }
}

/// Scale factors of the geometry test, smallest first.
pub const GEOMETRY_SCALES: [&str; 4] = ["1/5", "2/5", "3/5", "4/5"];

/// `invariant_at[i]` is the observation at scale `(i + 1) / 5`.
pub fn geometry_score(invariant_at: [bool; 4]) -> Result<u8> {
    // Invariant at a small scale implies invariant at every larger one.
    for i in 0..4 {
        if invariant_at[i] && !invariant_at[i + 1..].iter().all(|&b| b) {
            return Err(Error::InconsistentInvariance(format!(
                "invariant at {} but variant at a larger scale",
                GEOMETRY_SCALES[i]
            )));
        }
    }
    Ok(match invariant_at.iter().position(|&b| b) {
        Some(first) => 5 - first as u8,
        None => 1,
    })
}

/// κ magnitudes of the colorimetry test, smallest first (10%..40% of 255).
pub fn colorimetry_magnitudes() -> [Rational; 4] {
    [
        Rational::new(51, 2),
        Rational::from_integer(51),
        Rational::new(153, 2),
        Rational::from_integer(102),
    ]
}

/// `invariant_at[i]` is the observation at magnitude `colorimetry_magnitudes()[i]`,
/// already combined over all four sign pairings.
pub fn colorimetry_score(invariant_at: [bool; 4]) -> Result<u8> {
    // Invariant at a large magnitude implies invariant at every smaller one.
    for j in 0..4 {
        if invariant_at[j] && !invariant_at[..j].iter().all(|&b| b) {
            return Err(Error::InconsistentInvariance(format!(
                "invariant at ±{} but variant at a smaller magnitude",
                colorimetry_magnitudes()[j]
            )));
        }
    }
    Ok(match invariant_at.iter().rposition(|&b| b) {
        Some(last) => last as u8 + 2,
        None => 1,
    })
}

/// Collapses the 4 × 4 grid of sheet observations (rows: sign pairings, columns:
/// magnitudes) into per-magnitude flags: invariant only if every pairing is.
pub fn colorimetry_flags_from_grid(grid: [[bool; 4]; 4]) -> [bool; 4] {
    std::array::from_fn(|col| grid.iter().all(|row| row[col]))
}

/// Pairs to examine, given the sizes of the comparable groups (group 1 excluded).
pub fn comparability_pair_count(group_sizes: &[u64]) -> u64 {
    group_sizes.iter().map(|&n| pair_count(n)).sum()
}

/// `None` when there is nothing to compare (`total_pairs == 0`).
pub fn comparability_score(
    major: u64,
    medium: u64,
    minor: u64,
    total_pairs: u64,
) -> Result<Option<u8>> {
    if total_pairs == 0 {
        if major + medium + minor > 0 {
            return Err(Error::input("obstacle counts given but there are no pairs to compare"));
        }
        return Ok(None);
    }
    if major + medium + minor > total_pairs {
        return Err(Error::input(format!(
            "obstacle counts ({}) exceed the {total_pairs} pairs examined",
            major + medium + minor
        )));
    }
    Ok(Some(if major > 0 {
        1
    } else if medium > 1 {
        2
    } else if medium == 1 {
        3
    } else if minor == 0 {
        5
    } else if is_a_few(minor, total_pairs) {
        4
    } else {
        // More than a few minor obstacles without a medium one.
        3
    }))
}

/// Level from the importance/attention correlation coefficient.
pub fn importance_score(c: f64) -> Result<u8> {
    if c.is_nan() {
        return Err(Error::input("correlation is NaN"));
    }
    Ok(if c > 0.95 {
        5
    } else if c > 0.85 {
        4
    } else if c > 0.5 {
        3
    } else if c > 0.0 {
        2
    } else {
        1
    })
}

pub fn balance_score(weak_count: u64) -> u8 {
    match weak_count {
        0 => 5,
        1 => 4,
        2 => 3,
        3 => 2,
        _ => 1,
    }
}

/// Searchability from how many variables take a high, medium or low cognitive
/// load to find.
pub fn searchability_score(high: u64, medium: u64, low: u64) -> Result<u8> {
    let n = high + medium + low;
    if n == 0 {
        return Err(Error::input("searchability needs at least one variable"));
    }
    Ok(if high > 0 {
        if is_a_few(high, n) {
            2
        } else {
            1
        }
    } else if medium == 0 {
        5
    } else if is_a_few(medium, n) {
        4
    } else if is_more_than_a_few(medium, n) {
        3
    } else {
        // Half or more in the medium band leaves low ≤ n/2; level 3 does not hold.
        2
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LearningMode {
    SelfLearning,
    SelfLearningQa,
    Tutorial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RepeatedEffort {
    Effortless,
    Minor,
    Noticeable,
    Serious,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LearnabilityInputs {
    pub learning_time_hours: Rational,
    pub learning_mode: LearningMode,
    pub repeated_effort: RepeatedEffort,
}

/// Minimum of the time, mode and repeated-learning sub-levels.
pub fn learnability_score(inputs: LearnabilityInputs) -> Result<u8> {
    let t = inputs.learning_time_hours;
    if t.is_negative() {
        return Err(Error::input("learning time cannot be negative"));
    }
    let half = Rational::new(1, 2);
    let time = if t < half {
        5
    } else if t < 1 {
        4
    } else if t < Rational::new(3, 2) {
        3
    } else if t < 2 {
        2
    } else {
        1
    };
    let mode = match inputs.learning_mode {
        LearningMode::SelfLearning => 5,
        LearningMode::SelfLearningQa => 4,
        LearningMode::Tutorial => 3,
    };
    let effort = match inputs.repeated_effort {
        RepeatedEffort::Effortless => 5,
        RepeatedEffort::Minor => 3,
        RepeatedEffort::Noticeable => 2,
        RepeatedEffort::Serious => 1,
    };
    Ok(time.min(mode).min(effort))
}

/// Minimum of the 1-hour and 24-hour recall sub-levels (percentages 0..=100).
pub fn memorability_score(pct_1h: Rational, pct_24h: Rational) -> Result<u8> {
    for (name, p) in [("pct_1h", pct_1h), ("pct_24h", pct_24h)] {
        if p.is_negative() || p > 100 {
            return Err(Error::input(format!("{name} = {p} is outside 0..100")));
        }
    }
    if pct_24h > pct_1h {
        return Err(Error::input(format!(
            "recall after 24 hours ({pct_24h}%) exceeds recall after 1 hour ({pct_1h}%)"
        )));
    }
    let one_hour = if pct_1h == 100 {
        5
    } else if pct_1h >= 90 {
        4
    } else if pct_1h >= 75 {
        3
    } else if pct_1h >= 50 {
        2
    } else {
        1
    };
    let day = if pct_24h == 100 {
        5
    } else if pct_24h >= 75 {
        4
    } else if pct_24h >= 50 {
        3
    } else if pct_24h >= 25 {
        2
    } else {
        1
    };
    Ok(one_hour.min(day))
}
