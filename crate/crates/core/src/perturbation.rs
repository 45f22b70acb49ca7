//! Sensitivity of resonances to perturbations `B + ζV` of the structure.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linear::propagate::LayerBasis;
use crate::linear::roots::{find_resonances, multiplicity_at};
use crate::linear::theta::{char_f, df_dz, theta_initial, theta_at};
use crate::model::{refine_breakpoints, Rect, ResonatorConfig, StepFunction};
use crate::quadrature::adaptive_simpson;

/// A perturbation direction; values may be negative.
#[derive(Debug, Clone, PartialEq)]
pub struct Direction(pub StepFunction);

impl Direction {
    pub fn new(v: StepFunction) -> Self {
        Self(v)
    }

    pub fn zero(b: &StepFunction) -> Self {
        Self(b.map_values(|_| 0.0))
    }
}

/// How `∫θ²V` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Integration {
    /// Per-layer closed form of the trigonometric basis.
    #[default]
    ClosedForm,
    /// Adaptive Simpson on the exact `θ`.
    Adaptive,
}

/// `∫θ²(s, z; B) V(s) ds`.
pub fn theta_squared_moment(
    b: &StepFunction,
    v: &Direction,
    z: Complex64,
    cfg: &ResonatorConfig,
    how: Integration,
) -> Result<Complex64> {
    let (bb, vv) = refine_breakpoints(b, &v.0)?;
    let mut state = theta_initial(z, cfg);
    let mut acc = Complex64::new(0.0, 0.0);
    for ((l, r, bv), vv) in bb.pieces().zip(vv.values()) {
        let basis = LayerBasis::new(bv, r - l, z);
        if *vv != 0.0 {
            let (y0, dy0) = (state.y, state.dy);
            acc += *vv
                * match how {
                    Integration::ClosedForm => basis.product_integral((y0, dy0), (y0, dy0)),
                    Integration::Adaptive => {
                        let f = |t: f64| {
                            let y = LayerBasis::new(bv, t - l, z).apply(y0, dy0).0;
                            y * y
                        };
                        let scale = y0.norm_sqr() + dy0.norm_sqr() * (r - l) * (r - l);
                        adaptive_simpson(&f, l, r, 1e-15 * (1.0 + scale) * (r - l), 40)
                    }
                };
        }
        let (y, dy) = basis.apply(state.y, state.dy);
        state = crate::model::WaveState::new(r, y, dy);
    }
    Ok(acc)
}

/// Directional derivative `[∂_B F(ω, B)](V) = ω²/θ'(a2) ∫θ²V` at a resonance.
pub fn df_db(b: &StepFunction, omega: Complex64, v: &Direction, cfg: &ResonatorConfig, tol: f64) -> Result<Complex64> {
    df_db_with(b, omega, v, cfg, tol, Integration::ClosedForm)
}

pub fn df_db_with(
    b: &StepFunction,
    omega: Complex64,
    v: &Direction,
    cfg: &ResonatorConfig,
    tol: f64,
    how: Integration,
) -> Result<Complex64> {
    let residual = char_f(b, omega, cfg).norm();
    if !(residual <= tol) {
        return Err(Error::NotAResonance { z: omega, residual });
    }
    let dth = theta_at(b, omega, cfg).dy;
    if dth == Complex64::new(0.0, 0.0) {
        return Err(Error::DegenerateDenominator);
    }
    Ok(omega * omega / dth * theta_squared_moment(b, v, omega, cfg, how)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationPrediction {
    pub omega: Complex64,
    pub k: Complex64,
    pub multiplicity: usize,
}

impl PerturbationPrediction {
    /// First-order positions `ω + (Kζ)^{1/m}` over all `m` root branches.
    pub fn branches(&self, zeta: f64) -> Vec<Complex64> {
        let m = self.multiplicity.max(1);
        let base = self.k * zeta;
        if base == Complex64::new(0.0, 0.0) {
            return vec![self.omega; m];
        }
        let (r, phi) = base.to_polar();
        let rm = r.powf(1.0 / m as f64);
        (0..m)
            .map(|j| self.omega + Complex64::from_polar(rm, (phi + 2.0 * std::f64::consts::PI * j as f64) / m as f64))
            .collect()
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// Central `m`-th difference of `F` at `ω` with step `h`, and the largest sample modulus.
fn central_difference(b: &StepFunction, omega: Complex64, cfg: &ResonatorConfig, m: usize, h: f64) -> (Complex64, f64) {
    let mut acc = Complex64::new(0.0, 0.0);
    let mut big = 0.0f64;
    for j in 0..=m {
        let f = char_f(b, omega + (0.5 * m as f64 - j as f64) * h, cfg);
        big = big.max(f.norm());
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        acc += sign * binomial(m, j) * f;
    }
    (acc / h.powi(m as i32), big / h.powi(m as i32))
}

/// `∂_z^m F(ω)`; analytic for `m = 1`, otherwise central differences with one Richardson step.
pub fn dz_m_f(b: &StepFunction, omega: Complex64, cfg: &ResonatorConfig, m: usize) -> (Complex64, f64) {
    if m <= 1 {
        let h = 1e-3 * (1.0 + omega.norm());
        let scale = char_f(b, omega + h, cfg).norm() / h;
        return (df_dz(b, omega, cfg), scale);
    }
    let h = 1e-3 * (1.0 + omega.norm());
    let (d1, s1) = central_difference(b, omega, cfg, m, h);
    let (d2, _) = central_difference(b, omega, cfg, m, 0.5 * h);
    ((4.0 * d2 - d1) / 3.0, s1)
}

/// Splitting coefficient `K = -m! [∂_B F](V) / ∂_z^m F` at a resonance of multiplicity `m`.
pub fn splitting_k(
    b: &StepFunction,
    omega: Complex64,
    v: &Direction,
    cfg: &ResonatorConfig,
    tol: f64,
) -> Result<PerturbationPrediction> {
    let m = multiplicity_at(b, cfg, omega, 1e-3 * (1.0 + omega.norm()));
    splitting_k_with_multiplicity(b, omega, v, cfg, tol, m)
}

pub fn splitting_k_with_multiplicity(
    b: &StepFunction,
    omega: Complex64,
    v: &Direction,
    cfg: &ResonatorConfig,
    tol: f64,
    m: usize,
) -> Result<PerturbationPrediction> {
    let dfb = df_db(b, omega, v, cfg, tol)?;
    let (dm, scale) = dz_m_f(b, omega, cfg, m);
    if !(dm.norm() > 1e-14 * scale.max(1.0)) {
        return Err(Error::ZeroDenominator);
    }
    let fact: f64 = (1..=m).map(|j| j as f64).product();
    Ok(PerturbationPrediction { omega, k: -fact * dfb / dm, multiplicity: m })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub zeta: f64,
    pub predicted: Vec<Complex64>,
    pub recomputed: Vec<Complex64>,
    /// Hausdorff distance between the two sets (infinite if nothing was recomputed).
    pub error: f64,
}

pub fn hausdorff(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return if a.is_empty() && b.is_empty() { 0.0 } else { f64::INFINITY };
    }
    let one_way = |p: &[Complex64], q: &[Complex64]| {
        p.iter()
            .map(|x| q.iter().map(|y| (x - y).norm()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    one_way(a, b).max(one_way(b, a))
}

/// Compare first-order predictions with resonances of `B + ζV` recomputed in a disc around `ω`.
pub fn perturbation_sweep(
    b: &StepFunction,
    omega: Complex64,
    v: &Direction,
    zetas: &[f64],
    cfg: &ResonatorConfig,
    tol: f64,
) -> Result<Vec<SweepRow>> {
    let pred = splitting_k(b, omega, v, cfg, tol)?;
    let m = pred.multiplicity as f64;
    let mut rows = Vec::with_capacity(zetas.len());
    for &zeta in zetas {
        let predicted = pred.branches(zeta);
        let recomputed = if zeta == 0.0 {
            vec![omega; pred.multiplicity]
        } else {
            let bz = b.add_scaled(&v.0, zeta)?;
            let radius = 4.0 * (pred.k * zeta).norm().powf(1.0 / m) + 10.0 * tol;
            let rect = Rect::around(omega, radius);
            let out = find_resonances(&bz, cfg, &rect, (radius / 8.0, radius / 8.0), tol.min(1e-12))?;
            out.resonances
                .iter()
                .filter(|r| (r.omega - omega).norm() <= radius)
                .flat_map(|r| std::iter::repeat(r.omega).take(r.multiplicity))
                .collect()
        };
        let error = hausdorff(&predicted, &recomputed);
        rows.push(SweepRow { zeta, predicted, recomputed, error });
    }
    rows.sort_by(|a, b| a.zeta.total_cmp(&b.zeta));
    Ok(rows)
}
