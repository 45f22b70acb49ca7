//! The normalized solution `θ`, the characteristic function `F` and its
//! `z`-derivative.

use num_complex::Complex64;

use super::propagate::LayerBasis;
use crate::error::{Error, Result};
use crate::model::{Nu2, ResonatorConfig, StepFunction, WaveState};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `θ(a1) = 1`, `θ'(a1) = -i z ν1`.
pub fn theta_initial(z: Complex64, cfg: &ResonatorConfig) -> WaveState {
    WaveState::new(cfg.interval.a1(), Complex64::new(1.0, 0.0), -I * z * cfg.nu1())
}

/// `θ` and `θ'` at `a2`.
pub fn theta_at(b: &StepFunction, z: Complex64, cfg: &ResonatorConfig) -> WaveState {
    let mut state = theta_initial(z, cfg);
    for (l, r, v) in b.pieces() {
        let (y, dy) = LayerBasis::new(v, r - l, z).apply(state.y, state.dy);
        state = WaveState::new(r, y, dy);
    }
    state
}

/// `θ` at every breakpoint of `b`, starting with `a1`.
pub fn theta_trace(b: &StepFunction, z: Complex64, cfg: &ResonatorConfig) -> Vec<WaveState> {
    let mut state = theta_initial(z, cfg);
    let mut out = Vec::with_capacity(b.n_pieces() + 1);
    out.push(state);
    for (l, r, v) in b.pieces() {
        let (y, dy) = LayerBasis::new(v, r - l, z).apply(state.y, state.dy);
        state = WaveState::new(r, y, dy);
        out.push(state);
    }
    out
}

/// `θ` at an arbitrary position inside the interval.
pub fn theta_at_x(b: &StepFunction, z: Complex64, cfg: &ResonatorConfig, x: f64) -> WaveState {
    let mut state = theta_initial(z, cfg);
    for (l, r, v) in b.pieces() {
        if x <= l {
            break;
        }
        let end = r.min(x);
        let (y, dy) = LayerBasis::new(v, end - l, z).apply(state.y, state.dy);
        state = WaveState::new(end, y, dy);
    }
    state
}

/// Boundary functional `y(a2) + i y'(a2) / (z ν2)` applied to a state at `a2`.
pub fn boundary_functional(state: &WaveState, z: Complex64, cfg: &ResonatorConfig) -> Complex64 {
    if z == Complex64::new(0.0, 0.0) {
        return Complex64::new(1.0 + cfg.boundary.ratio(), 0.0);
    }
    match cfg.nu2() {
        Nu2::Infinite => state.y,
        Nu2::Finite(nu2) => state.y + I * state.dy / (z * nu2),
    }
}

/// Characteristic function `F(z; B)`; its zeros are the resonances of `B`.
pub fn char_f(b: &StepFunction, z: Complex64, cfg: &ResonatorConfig) -> Complex64 {
    boundary_functional(&theta_at(b, z, cfg), z, cfg)
}

/// `θ` and `ψ` at `a2` together with `∫Bθ²` and `∫Bθψ`.
struct PairPropagation {
    theta: WaveState,
    psi: WaveState,
    b_theta2: Complex64,
    b_theta_psi: Complex64,
}

fn propagate_pair(b: &StepFunction, z: Complex64, cfg: &ResonatorConfig) -> PairPropagation {
    let mut th = theta_initial(z, cfg);
    let mut ps = WaveState::new(cfg.interval.a1(), Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
    let mut b_theta2 = Complex64::new(0.0, 0.0);
    let mut b_theta_psi = Complex64::new(0.0, 0.0);
    for (l, r, v) in b.pieces() {
        let basis = LayerBasis::new(v, r - l, z);
        if v != 0.0 {
            b_theta2 += v * basis.product_integral((th.y, th.dy), (th.y, th.dy));
            b_theta_psi += v * basis.product_integral((th.y, th.dy), (ps.y, ps.dy));
        }
        let (y, dy) = basis.apply(th.y, th.dy);
        th = WaveState::new(r, y, dy);
        let (y, dy) = basis.apply(ps.y, ps.dy);
        ps = WaveState::new(r, y, dy);
    }
    PairPropagation { theta: th, psi: ps, b_theta2, b_theta_psi }
}

/// `∂F/∂z` at any `z`, by variation of parameters for `∂θ/∂z`.
pub fn df_dz(b: &StepFunction, z: Complex64, cfg: &ResonatorConfig) -> Complex64 {
    let nu1 = cfg.nu1();
    if z == Complex64::new(0.0, 0.0) {
        return -I * nu1 * cfg.length() - I * b.integral() * cfg.nu2().recip();
    }
    let p = propagate_pair(b, z, cfg);
    // ∂θ/∂z solves y'' + z²By = -2zBθ with y(a1) = 0, y'(a1) = -iν1.
    let i_theta = -2.0 * z * p.b_theta2;
    let i_psi = -2.0 * z * p.b_theta_psi;
    let dz_y = -I * nu1 * p.psi.y + p.psi.y * i_theta - p.theta.y * i_psi;
    let dz_dy = -I * nu1 * p.psi.dy + p.psi.dy * i_theta - p.theta.dy * i_psi;
    match cfg.nu2() {
        Nu2::Infinite => dz_y,
        Nu2::Finite(nu2) => dz_y + I * dz_dy / (z * nu2) - I * p.theta.dy / (z * z * nu2),
    }
}

/// `∂F/∂z` at a resonance via
/// `2ω/θ'(a2) ∫θ²B + iν1/θ'(a2) + θ(a2)/ω`.
pub fn df_dz_at_resonance(b: &StepFunction, omega: Complex64, cfg: &ResonatorConfig) -> Result<Complex64> {
    let p = propagate_pair(b, omega, cfg);
    let dth = p.theta.dy;
    if dth == Complex64::new(0.0, 0.0) || omega == Complex64::new(0.0, 0.0) {
        return Err(Error::DegenerateDenominator);
    }
    Ok(2.0 * omega / dth * p.b_theta2 + I * cfg.nu1() / dth + p.theta.y / omega)
}

/// Wronskian `φψ' - φ'ψ` of the canonical basis after every layer prefix.
pub fn wronskian_trace(b: &StepFunction, z: Complex64) -> Vec<Complex64> {
    let (mut phi, mut dphi) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
    let (mut psi, mut dpsi) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
    let mut out = vec![phi * dpsi - dphi * psi];
    for (l, r, v) in b.pieces() {
        let basis = LayerBasis::new(v, r - l, z);
        (phi, dphi) = basis.apply(phi, dphi);
        (psi, dpsi) = basis.apply(psi, dpsi);
        out.push(phi * dpsi - dphi * psi);
    }
    out
}

/// `Im(conj(θ) θ')` of a state.
pub fn phase_flux(state: &WaveState) -> f64 {
    (state.y.conj() * state.dy).im
}
