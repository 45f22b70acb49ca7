//! Closed-form spectra of homogeneous structures `B ≡ b`.

use std::f64::consts::PI;
use std::ops::RangeInclusive;

use num_complex::Complex64;

use super::theta::char_f;
use super::Resonance;
use crate::error::{Error, Result};
use crate::model::{BoundaryParams, ResonatorConfig, StepFunction};

/// Relative distance of `K1` from 1 below which the spectrum is treated as empty.
const K1_UNIT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumBranch {
    /// `sqrt(b) ∈ {ν1, ν2}`: no resonances.
    Empty,
    /// `sqrt(b) ∉ [ν1, ν2]`: real parts on `π n / (sqrt(b) L)`.
    IntegerGrid,
    /// `sqrt(b) ∈ (ν1, ν2)`: real parts on `π (n + 1/2) / (sqrt(b) L)`.
    HalfIntegerGrid,
    /// `b = 0`: one purely imaginary resonance.
    Massless,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomogeneousSpectrumParams {
    /// `K1`; undefined (NaN) on the massless branch.
    pub k1: f64,
    pub branch: SpectrumBranch,
}

/// `K1(b) = (1 + ν1/ν2) / (ν1/sqrt(b) + sqrt(b)/ν2)` for `b > 0`.
pub fn k1(b: f64, boundary: &BoundaryParams) -> f64 {
    let sb = b.sqrt();
    (1.0 + boundary.ratio()) / (boundary.nu1() / sb + sb * boundary.nu2().recip())
}

pub fn homogeneous_params(b: f64, cfg: &ResonatorConfig) -> Result<HomogeneousSpectrumParams> {
    if !(b >= 0.0 && b.is_finite()) {
        return Err(Error::InvalidStepFunction(format!("homogeneous value {b} must be >= 0")));
    }
    if b == 0.0 {
        if cfg.nu1() == 0.0 {
            return Err(Error::MasslessNeumann);
        }
        return Ok(HomogeneousSpectrumParams { k1: f64::NAN, branch: SpectrumBranch::Massless });
    }
    let k = k1(b, &cfg.boundary);
    let branch = if (k - 1.0).abs() <= K1_UNIT_TOL {
        SpectrumBranch::Empty
    } else if k < 1.0 {
        SpectrumBranch::IntegerGrid
    } else {
        SpectrumBranch::HalfIntegerGrid
    };
    Ok(HomogeneousSpectrumParams { k1: k, branch })
}

/// `ω_n(b)`, or `None` on the empty branch. The massless branch ignores `n`.
pub fn homogeneous_resonance(b: f64, cfg: &ResonatorConfig, n: i64) -> Result<Option<Complex64>> {
    let params = homogeneous_params(b, cfg)?;
    let len = cfg.length();
    Ok(match params.branch {
        SpectrumBranch::Empty => None,
        SpectrumBranch::Massless => {
            let rate = (1.0 / cfg.nu1() + cfg.nu2().recip()) / len;
            Some(Complex64::new(0.0, -rate))
        }
        SpectrumBranch::IntegerGrid | SpectrumBranch::HalfIntegerGrid => {
            let sb = b.sqrt();
            let k = params.k1;
            let im = -((1.0 + k) / (1.0 - k)).abs().ln() / (2.0 * sb * len);
            let shift = if params.branch == SpectrumBranch::HalfIntegerGrid { 0.5 } else { 0.0 };
            let re = PI * (n as f64 + shift) / (sb * len);
            Some(Complex64::new(re, im))
        }
    })
}

/// Resonances `ω_n(b)` for `n` in the range (a single one on the massless branch).
pub fn homogeneous_spectrum(b: f64, cfg: &ResonatorConfig, n_range: RangeInclusive<i64>) -> Result<Vec<Resonance>> {
    let params = homogeneous_params(b, cfg)?;
    let structure = StepFunction::constant(cfg.interval, b)?;
    let make = |omega: Complex64| Resonance {
        omega,
        multiplicity: 1,
        residual: char_f(&structure, omega, cfg).norm(),
    };
    Ok(match params.branch {
        SpectrumBranch::Empty => Vec::new(),
        SpectrumBranch::Massless => vec![make(homogeneous_resonance(b, cfg, 0)?.expect("massless root"))],
        _ => n_range
            .map(|n| homogeneous_resonance(b, cfg, n).map(|w| make(w.expect("nonempty branch"))))
            .collect::<Result<_>>()?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Interval, Nu2};

    fn cfg(nu1: f64, nu2: Nu2, len: f64) -> ResonatorConfig {
        ResonatorConfig::new(Interval::new(-len, 0.0).unwrap(), BoundaryParams::new(nu1, nu2).unwrap())
    }

    #[test]
    fn section_nine_lowest_resonance() {
        let c = cfg(1.0, Nu2::Infinite, 1.0);
        let w = homogeneous_resonance(110.0, &c, 0).unwrap().unwrap();
        assert!((w.re - 0.14977).abs() < 5e-6, "{w}");
        assert!((w.im + 0.009119).abs() < 5e-7, "{w}");
        let r = homogeneous_spectrum(110.0, &c, 0..=3).unwrap();
        assert_eq!(r.len(), 4);
        for res in r {
            assert!(res.residual < 1e-12, "{res:?}");
        }
    }

    #[test]
    fn empty_when_matching_outer_medium() {
        let c = cfg(2.0, Nu2::Finite(5.0), 1.0);
        assert!(homogeneous_spectrum(4.0, &c, -3..=3).unwrap().is_empty());
        assert!(homogeneous_spectrum(25.0, &c, -3..=3).unwrap().is_empty());
    }

    #[test]
    fn nonuniqueness_example_value() {
        let s3 = 3f64.sqrt();
        let c = cfg(s3, Nu2::Finite(s3), 1.0);
        let w = homogeneous_resonance(1.0, &c, 0).unwrap().unwrap();
        let expected = -0.5 * (7.0 + 4.0 * s3).ln();
        assert!(w.re.abs() < 1e-15);
        assert!((w.im - expected).abs() < 1e-13);
        assert!((w.im + 1.3170).abs() < 1e-4);
    }

    #[test]
    fn massless_branch() {
        let c = cfg(1.0, Nu2::Finite(1.0), 1.0);
        let r = homogeneous_spectrum(0.0, &c, 0..=0).unwrap();
        assert_eq!(r.len(), 1);
        assert!((r[0].omega - Complex64::new(0.0, -2.0)).norm() < 1e-15);
        assert!(r[0].residual < 1e-12);
        let neumann = cfg(0.0, Nu2::Finite(1.0), 1.0);
        assert_eq!(homogeneous_spectrum(0.0, &neumann, 0..=0), Err(Error::MasslessNeumann));
    }

    #[test]
    fn branch_from_sign_of_one_minus_k1() {
        let c = cfg(1.0, Nu2::Finite(4.0), 1.0);
        assert_eq!(homogeneous_params(0.25, &c).unwrap().branch, SpectrumBranch::IntegerGrid);
        assert_eq!(homogeneous_params(4.0, &c).unwrap().branch, SpectrumBranch::HalfIntegerGrid);
        assert_eq!(homogeneous_params(25.0, &c).unwrap().branch, SpectrumBranch::IntegerGrid);
        assert_eq!(homogeneous_params(1.0, &c).unwrap().branch, SpectrumBranch::Empty);
    }
}
