//! Guaranteed admissible frequency ranges for constant constraints.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::{Nu2, ResonatorConfig};

/// Arrangement of `[ν1, ν2]` against `[√b1, √b2]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Arrangement {
    /// `0 < √b1 < √b2 < ν1` or `ν2 <= √b1`.
    Outside,
    /// `0 < √b1 < √b2 = ν1`.
    UpperAtNu1,
    /// `ν1 <= √b1 < √b2 < ν2`.
    Inside,
    /// `ν1 < √b1 < √b2 = ν2`.
    UpperAtNu2,
    /// `ν1 = √b1 < √b2 = ν2`.
    BothAtEnds,
    /// `0 = √b1 < √b2 <= ν1`.
    MasslessBelowNu1,
    /// `ν1 <= √b1 < ν2 < √b2`.
    StraddleNu2,
    /// `0 < √b1 < ν1 < √b2 <= ν2`.
    StraddleNu1,
    /// `0 < √b1 < ν1 <= ν2 < √b2`.
    StraddleBoth,
    /// `0 = √b1 < ν1 < √b2 <= ν2`.
    MasslessStraddleNu1,
    /// `0 = √b1 < ν1 <= ν2 < √b2`.
    MasslessStraddleBoth,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Threshold {
    pub arrangement: Arrangement,
    /// Every `|α| >= threshold` (or `>` when `strict`) is admissible.
    pub threshold: f64,
    pub strict: bool,
    /// Coarser bound `2π / (L (√b2 - √b1))` valid for every arrangement.
    pub general: f64,
}

impl Threshold {
    pub fn guarantees(&self, alpha: f64) -> bool {
        if self.strict {
            alpha.abs() > self.threshold
        } else {
            alpha.abs() >= self.threshold
        }
    }
}

fn same(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

/// Classify the arrangement; `nu2 = None` stands for `ν2 = ∞`.
pub fn classify(s1: f64, s2: f64, nu1: f64, nu2: Option<f64>) -> Arrangement {
    use Arrangement::*;
    let lt = |a: f64, b: f64| a < b && !same(a, b);
    let le = |a: f64, b: f64| a < b || same(a, b);
    // comparisons against ν2, where None is +∞
    let lt_nu2 = |a: f64| nu2.is_none_or(|v| lt(a, v));
    let eq_nu2 = |a: f64| nu2.is_some_and(|v| same(a, v));
    let ge_nu2 = |a: f64| nu2.is_some_and(|v| le(v, a));
    let massless = s1 == 0.0;

    if massless && nu1 > 0.0 {
        return if le(s2, nu1) {
            MasslessBelowNu1
        } else if !ge_nu2(s2) || eq_nu2(s2) {
            MasslessStraddleNu1
        } else {
            MasslessStraddleBoth
        };
    }
    if !massless && (lt(s2, nu1) || ge_nu2(s1)) {
        return Outside;
    }
    if !massless && lt(s1, s2) && same(s2, nu1) {
        return UpperAtNu1;
    }
    if lt(s1, nu1) {
        // here 0 < s1 < ν1 < s2
        return if lt_nu2(s2) || eq_nu2(s2) { StraddleNu1 } else { StraddleBoth };
    }
    // ν1 <= s1 < ν2
    if lt_nu2(s2) {
        Inside
    } else if eq_nu2(s2) {
        if same(s1, nu1) {
            BothAtEnds
        } else {
            UpperAtNu2
        }
    } else {
        StraddleNu2
    }
}

/// Sharpest threshold of the case table together with the general bound.
pub fn admissible_thresholds(b1: f64, b2: f64, cfg: &ResonatorConfig) -> Result<Threshold> {
    if !(0.0 <= b1 && b1 < b2 && b2.is_finite()) {
        return Err(Error::Config(format!("need constant constraints 0 <= b1 < b2 < inf, got {b1}, {b2}")));
    }
    let (s1, s2) = (b1.sqrt(), b2.sqrt());
    let nu2 = match cfg.nu2() {
        Nu2::Finite(v) => Some(v),
        Nu2::Infinite => None,
    };
    let arrangement = classify(s1, s2, cfg.nu1(), nu2);
    let unit = PI / (cfg.length() * s2);
    let q = s1 / (s2 - s1);
    use Arrangement::*;
    let (factor, strict) = match arrangement {
        Outside => (q.ceil(), false),
        UpperAtNu1 => (q.ceil(), true),
        Inside => (0.5 + (q - 0.5).ceil(), false),
        UpperAtNu2 => (0.5 + (q - 0.5).ceil(), true),
        BothAtEnds => (0.5 + (q + 0.5).floor(), true),
        MasslessBelowNu1 => (1.0, true),
        StraddleNu2 => (((0.5 * s2 + s1) / (s2 - s1)).ceil(), false),
        StraddleNu1 => (0.5 + (1.5 * q).ceil(), true),
        StraddleBoth => (((s2 + s1) / (s2 - s1)).ceil(), false),
        MasslessStraddleNu1 => (1.5, true),
        MasslessStraddleBoth => (2.0, false),
    };
    Ok(Threshold { arrangement, threshold: unit * factor, strict, general: 2.0 * PI / (cfg.length() * (s2 - s1)) })
}
