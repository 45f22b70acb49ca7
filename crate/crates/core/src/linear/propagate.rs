//! Exact propagation of `y'' = -z^2 b y` across a constant layer.

use num_complex::Complex64;

use crate::model::WaveState;

/// Below this `|s w|` the ratio `sin(s w) / s` is evaluated by its series.
const SINC_SERIES_THRESHOLD: f64 = 1e-4;
/// Below this `|s w|` the integral of `sin^2(s t) / s^2` uses its series.
const SS_SERIES_THRESHOLD: f64 = 0.5;

/// Trigonometric basis of a constant layer of width `w`: the fundamental matrix
/// `[[cos, sinc], [-s_sin, cos]]` with `s = z sqrt(b)`.
#[derive(Debug, Clone, Copy)]
pub struct LayerBasis {
    pub s: Complex64,
    pub width: f64,
    pub cos: Complex64,
    /// `sin(s w) / s`, equal to `w` at `s = 0`.
    pub sinc: Complex64,
    /// `s sin(s w)`, equal to `0` at `s = 0`.
    pub s_sin: Complex64,
}

impl LayerBasis {
    pub fn new(b: f64, width: f64, z: Complex64) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        if b == 0.0 || z == zero {
            return Self { s: zero, width, cos: Complex64::new(1.0, 0.0), sinc: width.into(), s_sin: zero };
        }
        let s = z * b.sqrt();
        let x = s * width;
        let (sin, cos) = (x.sin(), x.cos());
        let sinc = if x.norm() < SINC_SERIES_THRESHOLD {
            let x2 = x * x;
            width * (1.0 - x2 / 6.0 + x2 * x2 / 120.0)
        } else {
            sin / s
        };
        Self { s, width, cos, sinc, s_sin: s * sin }
    }

    pub fn apply(&self, y: Complex64, dy: Complex64) -> (Complex64, Complex64) {
        (y * self.cos + dy * self.sinc, -y * self.s_sin + dy * self.cos)
    }

    /// `(∫cos², ∫cos·sinc, ∫sinc²)` over the layer, where `sinc(t) = sin(s t)/s`.
    pub fn product_integrals(&self) -> (Complex64, Complex64, Complex64) {
        let w = self.width;
        let icc = 0.5 * (w + self.sinc * self.cos);
        let ics = 0.5 * self.sinc * self.sinc;
        let x = self.s * w;
        let iss = if x.norm() < SS_SERIES_THRESHOLD {
            // (w^3/2) Σ_{k≥1} (-1)^{k+1} 4^k x^{2k-2} / (2k+1)!
            let x2 = x * x;
            let mut term = Complex64::new(4.0 / 6.0, 0.0);
            let mut sum = term;
            for k in 2..14u32 {
                let kk = f64::from(k);
                term = -term * x2 * 4.0 / ((2.0 * kk) * (2.0 * kk + 1.0));
                sum += term;
            }
            0.5 * w * w * w * sum
        } else {
            (w - self.sinc * self.cos) / (2.0 * self.s * self.s)
        };
        (icc, ics, iss)
    }

    /// `∫_0^w u(t) v(t) dt` for the layer solutions with initial data `u0` and `v0`.
    pub fn product_integral(&self, u0: (Complex64, Complex64), v0: (Complex64, Complex64)) -> Complex64 {
        let (icc, ics, iss) = self.product_integrals();
        u0.0 * v0.0 * icc + (u0.0 * v0.1 + u0.1 * v0.0) * ics + u0.1 * v0.1 * iss
    }
}

/// Carry `(y, y')` across a layer with constant coefficient `b`.
pub fn propagate_layer(state: WaveState, b: f64, width: f64, z: Complex64) -> WaveState {
    let (y, dy) = LayerBasis::new(b, width, z).apply(state.y, state.dy);
    WaveState::new(state.x + width, y, dy)
}
