//! Optimal decay on the imaginary axis for constant constraints.

use crate::error::{Error, Result};
use crate::linear::homogeneous::k1;
use crate::model::{BoundaryParams, Nu2, ResonatorConfig};

/// `K2(b) = sgn(1 - K1) |(1 - K1)/(1 + K1)|^{1/sqrt(b)}`, with `K2(0) = exp(-2/ν1 - 2/ν2)`
/// (zero when `ν1 = 0`).
pub fn k2(b: f64, boundary: &BoundaryParams) -> f64 {
    if b == 0.0 {
        if boundary.nu1() == 0.0 {
            return 0.0;
        }
        return (-2.0 / boundary.nu1() - 2.0 * boundary.nu2().recip()).exp();
    }
    let k = k1(b, boundary);
    let ratio = ((1.0 - k) / (1.0 + k)).abs().powf(1.0 / b.sqrt());
    if k < 1.0 {
        ratio
    } else if k > 1.0 {
        -ratio
    } else {
        0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZeroFrequencyOptimum {
    pub beta: f64,
    pub k2_lower: f64,
    pub k2_upper: f64,
    /// Constraint values whose homogeneous structure attains `beta`.
    pub optimal: Vec<f64>,
}

/// `β_min(0) = -ln(max{K2(b1), K2(b2)}) / (2L)` and the structures attaining it.
pub fn beta_min_zero(b1: f64, b2: f64, cfg: &ResonatorConfig) -> Result<ZeroFrequencyOptimum> {
    if !(0.0 <= b1 && b1 < b2 && b2.is_finite()) {
        return Err(Error::Config(format!("need 0 <= b1 < b2 < inf, got b1 = {b1}, b2 = {b2}")));
    }
    let (s1, s2) = (b1.sqrt(), b2.sqrt());
    let above_nu2 = matches!(cfg.nu2(), Nu2::Finite(v) if s2 > v);
    if !(s1 < cfg.nu1() || above_nu2) {
        return Err(Error::HypothesisViolated(format!(
            "zero frequency needs sqrt(b1) < nu1 or sqrt(b2) > nu2 (sqrt(b1) = {s1}, sqrt(b2) = {s2})"
        )));
    }
    let (ka, kb) = (k2(b1, &cfg.boundary), k2(b2, &cfg.boundary));
    let best = ka.max(kb);
    if !(best > 0.0) {
        return Err(Error::HypothesisViolated(format!("max K2 = {best} is not positive")));
    }
    let near = |k: f64| (k - best).abs() <= 1e-12 * best;
    let optimal = [(b1, ka), (b2, kb)].iter().filter(|(_, k)| near(*k)).map(|(b, _)| *b).collect();
    Ok(ZeroFrequencyOptimum { beta: -best.ln() / (2.0 * cfg.length()), k2_lower: ka, k2_upper: kb, optimal })
}
