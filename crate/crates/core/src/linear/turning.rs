//! Turning interval of a resonant mode: where `Im(conj(θ) θ')` vanishes.

use num_complex::Complex64;

use super::theta::{char_f, phase_flux, theta_at_x, theta_trace};
use crate::error::{Error, Result};
use crate::model::{ResonatorConfig, StepFunction};

/// Relative level below which `Im(conj(θ) θ')` counts as zero.
const FLUX_ZERO_REL: f64 = 1e-8;
/// Relative level below which `|θ|` counts as a zero of `θ`.
const THETA_ZERO_REL: f64 = 1e-6;
const SAMPLES_PER_LAYER: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TurningInterval {
    pub x_star: f64,
    pub x_star_upper: f64,
    /// A zero of `θ`, if one was found.
    pub zero_of_theta: Option<f64>,
}

fn flux_at(b: &StepFunction, z: Complex64, cfg: &ResonatorConfig, x: f64) -> f64 {
    phase_flux(&theta_at_x(b, z, cfg, x))
}

/// Zero of the flux inside `[lo, hi]`, given `flux(lo) < 0 < flux(hi)`.
fn bisect_flux(b: &StepFunction, z: Complex64, cfg: &ResonatorConfig, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if flux_at(b, z, cfg, mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Turning interval of the resonance `z` of `b`; requires `Re z > 0` and `|F(z)| <= tol`.
pub fn turning_interval(b: &StepFunction, z: Complex64, cfg: &ResonatorConfig, tol: f64) -> Result<TurningInterval> {
    let residual = char_f(b, z, cfg).norm();
    if !(residual <= tol) {
        return Err(Error::NotAResonance { z, residual });
    }
    if !(z.re > 0.0) {
        return Err(Error::HypothesisViolated(format!("turning interval needs Re z > 0, got {z}")));
    }
    let trace = theta_trace(b, z, cfg);
    let g: Vec<f64> = trace.iter().map(phase_flux).collect();
    let xs: Vec<f64> = trace.iter().map(|s| s.x).collect();
    let scale = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let thr = FLUX_ZERO_REL * scale;
    let n = g.len() - 1;

    let first = g.iter().position(|v| *v >= -thr).unwrap_or(n);
    let x_star = if first == 0 || g[first] <= thr {
        xs[first]
    } else {
        bisect_flux(b, z, cfg, xs[first - 1], xs[first])
    };
    let last = g.iter().rposition(|v| *v <= thr).unwrap_or(0);
    let x_star_upper = if last == n || g[last] >= -thr {
        xs[last]
    } else {
        bisect_flux(b, z, cfg, xs[last], xs[last + 1])
    };
    let x_star_upper = x_star_upper.max(x_star);

    Ok(TurningInterval { x_star, x_star_upper, zero_of_theta: find_theta_zero(b, z, cfg) })
}

fn find_theta_zero(b: &StepFunction, z: Complex64, cfg: &ResonatorConfig) -> Option<f64> {
    let mut samples = Vec::new();
    for (l, r, _) in b.pieces() {
        for k in 0..SAMPLES_PER_LAYER {
            samples.push(l + (r - l) * k as f64 / SAMPLES_PER_LAYER as f64);
        }
    }
    samples.push(b.end());
    let mags: Vec<f64> = samples.iter().map(|x| theta_at_x(b, z, cfg, *x).y.norm()).collect();
    let max = mags.iter().fold(0.0f64, |m, v| m.max(*v));
    let (k, _) = mags.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1))?;
    let lo = samples[k.saturating_sub(1)];
    let hi = samples[(k + 1).min(samples.len() - 1)];
    // golden-section refinement of |θ| on the bracketing samples
    let f = |x: f64| theta_at_x(b, z, cfg, x).y.norm();
    let (mut a, mut c) = (lo, hi);
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..100 {
        let x1 = c - phi * (c - a);
        let x2 = a + phi * (c - a);
        if f(x1) < f(x2) {
            c = x2;
        } else {
            a = x1;
        }
    }
    let x0 = if f(samples[k]) <= f(0.5 * (a + c)) { samples[k] } else { 0.5 * (a + c) };
    (f(x0) <= THETA_ZERO_REL * max).then_some(x0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linear::homogeneous::homogeneous_resonance;
    use crate::linear::roots::find_resonances;
    use crate::model::{BoundaryParams, Interval, Nu2, Rect};

    #[test]
    fn homogeneous_mode_turns_at_a_point() {
        let c = ResonatorConfig::new(Interval::new(-1.0, 0.0).unwrap(), BoundaryParams::new(1.0, Nu2::Infinite).unwrap());
        let b = StepFunction::constant(c.interval, 110.0).unwrap();
        let w = homogeneous_resonance(110.0, &c, 1).unwrap().unwrap();
        let t = turning_interval(&b, w, &c, 1e-9).unwrap();
        assert!((t.x_star - t.x_star_upper).abs() < 1e-12);
        assert!((t.zero_of_theta.unwrap() - 0.0).abs() < 1e-6);
        let start = phase_flux(&theta_trace(&b, w, &c)[0]);
        assert!((start + w.re).abs() < 1e-15);
    }

    #[test]
    fn massless_middle_layer_is_flat() {
        let nu = 2.0;
        let c = ResonatorConfig::new(Interval::new(-1.0, 0.0).unwrap(), BoundaryParams::new(nu, Nu2::Finite(nu)).unwrap());
        let b = StepFunction::new(vec![-1.0, -0.6, -0.4, 0.0], vec![110.0, 0.0, 110.0]).unwrap();
        let out = find_resonances(&b, &c, &Rect::new(0.05, 1.0, -1.0, -1e-6), (0.02, 0.02), 1e-11).unwrap();
        let w = out.resonances.first().expect("a resonance").omega;
        let t = turning_interval(&b, w, &c, 1e-9).unwrap();
        assert!(t.x_star <= -0.6 + 1e-9 && t.x_star_upper >= -0.4 - 1e-9, "{t:?}");
    }

    #[test]
    fn rejects_non_resonance() {
        let c = ResonatorConfig::new(Interval::new(-1.0, 0.0).unwrap(), BoundaryParams::new(1.0, Nu2::Infinite).unwrap());
        let b = StepFunction::constant(c.interval, 110.0).unwrap();
        assert!(matches!(
            turning_interval(&b, Complex64::new(0.3, -0.01), &c, 1e-9),
            Err(Error::NotAResonance { .. })
        ));
    }
}
