//! Correlation between importance ranks and attention ranks.
//!
//! The deviation sums are kept as exact rationals so the two computation paths
//! agree bit for bit and the level thresholds can be tested without rounding.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Unnormalised Pearson terms: `C = a / sqrt(b_iota * b_alpha)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Correlation {
    pub a: Rational,
    pub b_iota: Rational,
    pub b_alpha: Rational,
}

impl Correlation {
    fn checked(a: Rational, b_iota: Rational, b_alpha: Rational) -> Result<Correlation> {
        if b_iota.is_zero() {
            return Err(Error::ZeroVariance("importance"));
        }
        if b_alpha.is_zero() {
            return Err(Error::ZeroVariance("attention"));
        }
        Ok(Correlation { a, b_iota, b_alpha })
    }

    pub fn value(&self) -> f64 {
        let c = self.a.to_f64() / (self.b_iota.to_f64() * self.b_alpha.to_f64()).sqrt();
        c.clamp(-1.0, 1.0)
    }

    /// `C > t` for `t ≥ 0`, decided exactly via `A² > t² B_ι B_α`.
    fn exceeds(&self, t: Rational) -> bool {
        if !(self.a > Rational::ZERO) {
            return false;
        }
        self.a * self.a > t * t * self.b_iota * self.b_alpha
    }

    /// Level of the coefficient, with the interval edges decided exactly.
    pub fn level(&self) -> u8 {
        if self.exceeds(Rational::new(95, 100)) {
            5
        } else if self.exceeds(Rational::new(85, 100)) {
            4
        } else if self.exceeds(Rational::new(1, 2)) {
            3
        } else if self.exceeds(Rational::ZERO) {
            2
        } else {
            1
        }
    }
}

/// Pearson terms for two rank vectors (ties allowed).
pub fn importance_correlation(iota: &[Rational], alpha: &[Rational]) -> Result<Correlation> {
    if iota.len() != alpha.len() {
        return Err(Error::input(format!(
            "rank vectors differ in length ({} vs {})",
            iota.len(),
            alpha.len()
        )));
    }
    if iota.len() < 2 {
        return Err(Error::input("correlation needs at least two variables"));
    }
    let n = Rational::from_integer(iota.len() as i64);
    let mean_i = iota.iter().copied().sum::<Rational>() / n;
    let mean_a = alpha.iter().copied().sum::<Rational>() / n;
    let mut a = Rational::ZERO;
    let mut b_i = Rational::ZERO;
    let mut b_a = Rational::ZERO;
    for (&i, &al) in iota.iter().zip(alpha) {
        let (di, da) = (i - mean_i, al - mean_a);
        a = a + di * da;
        b_i = b_i + di * di;
        b_a = b_a + da * da;
    }
    Correlation::checked(a, b_i, b_a)
}

pub fn importance_pearson(iota: &[Rational], alpha: &[Rational]) -> Result<f64> {
    importance_correlation(iota, alpha).map(|c| c.value())
}

/// Variables binned by level; `counts[alpha][iota]`, level `j` stored at index `j - 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImportanceBoxCounts {
    pub counts: Vec<Vec<u32>>,
}

impl ImportanceBoxCounts {
    pub fn two_by_two(n11: u32, n12: u32, n21: u32, n22: u32) -> Self {
        ImportanceBoxCounts {
            counts: vec![vec![n11, n12], vec![n21, n22]],
        }
    }

    pub fn k(&self) -> usize {
        self.counts.len()
    }

    fn validate(&self) -> Result<()> {
        let k = self.k();
        if k < 2 {
            return Err(Error::input("box grid needs k ≥ 2"));
        }
        if self.counts.iter().any(|row| row.len() != k) {
            return Err(Error::input(format!("box grid must be {k}×{k}")));
        }
        Ok(())
    }

    /// One `(iota, alpha)` pair per counted variable.
    pub fn expand(&self) -> (Vec<Rational>, Vec<Rational>) {
        let mut iota = Vec::new();
        let mut alpha = Vec::new();
        for (a, row) in self.counts.iter().enumerate() {
            for (i, &c) in row.iter().enumerate() {
                for _ in 0..c {
                    iota.push(Rational::from_integer(i as i64 + 1));
                    alpha.push(Rational::from_integer(a as i64 + 1));
                }
            }
        }
        (iota, alpha)
    }
}

/// Box-count correlation: the four-count formulas for 2×2, rank expansion beyond.
pub fn importance_correlation_boxes(boxes: &ImportanceBoxCounts) -> Result<Correlation> {
    boxes.validate()?;
    if boxes.k() > 2 {
        let (iota, alpha) = boxes.expand();
        return importance_correlation(&iota, &alpha);
    }
    let q = |v: u32| Rational::from_integer(v as i64);
    let (n11, n12) = (q(boxes.counts[0][0]), q(boxes.counts[0][1]));
    let (n21, n22) = (q(boxes.counts[1][0]), q(boxes.counts[1][1]));
    let n = n11 + n12 + n21 + n22;
    if n < 2 {
        return Err(Error::input("correlation needs at least two variables"));
    }
    let one = Rational::ONE;
    let two = Rational::from_integer(2);
    let mi = (n11 + n21 + two * n12 + two * n22) / n;
    let ma = (n11 + n12 + two * n21 + two * n22) / n;
    let a = n11 * (one - mi) * (one - ma)
        + n12 * (two - mi) * (one - ma)
        + n21 * (one - mi) * (two - ma)
        + n22 * (two - mi) * (two - ma);
    let b_i = (n11 + n21) * (one - mi) * (one - mi) + (n12 + n22) * (two - mi) * (two - mi);
    let b_a = (n11 + n12) * (one - ma) * (one - ma) + (n21 + n22) * (two - ma) * (two - ma);
    Correlation::checked(a, b_i, b_a)
}

pub fn importance_pearson_boxes(boxes: &ImportanceBoxCounts) -> Result<f64> {
    importance_correlation_boxes(boxes).map(|c| c.value())
}
