//! Damped Newton refinement of zeros of `F_nl` in real variables.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::bangbang::{f_nl, SolverOptions};
use crate::error::{Error, Result};
use crate::model::{AdmissibleFamily, ResonatorConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RefineMode {
    /// Unknowns `(ξ, β)` with `z = α - iβ` and `α` fixed.
    FixAlpha,
    /// Unknowns `(ξ, Re z, Im z)`; minimum-norm steps.
    Free,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefineOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub h_xi: f64,
    /// Step in `z` relative to `1 + |z|`.
    pub h_z: f64,
}

impl Default for RefineOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 60, h_xi: 1e-7, h_z: 1e-9 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NlRoot {
    /// Phase in `[0, π)`.
    pub xi: f64,
    pub z: Complex64,
    pub residual: f64,
    pub iterations: usize,
}

/// Smallest `-Im z` the iteration may visit; keeps `Im z² <= 0` for `Re z > 0`.
const BETA_FLOOR: f64 = 1e-12;

fn unknowns_to_point(mode: RefineMode, u: &[f64; 3], alpha: f64) -> (f64, Complex64) {
    match mode {
        RefineMode::FixAlpha => (u[0], Complex64::new(alpha, -u[1].max(BETA_FLOOR))),
        RefineMode::Free => (u[0], Complex64::new(u[1], u[2].min(-BETA_FLOOR))),
    }
}

/// Refine a zero of `F_nl` from `(xi0, z0)`.
pub fn refine_nl_root(
    fam: &AdmissibleFamily,
    xi0: f64,
    z0: Complex64,
    mode: RefineMode,
    cfg: &ResonatorConfig,
    solver: &SolverOptions,
    opts: &RefineOptions,
) -> Result<NlRoot> {
    let alpha = z0.re;
    let n = match mode {
        RefineMode::FixAlpha => 2,
        RefineMode::Free => 3,
    };
    let mut u = match mode {
        RefineMode::FixAlpha => [xi0, -z0.im, 0.0],
        RefineMode::Free => [xi0, z0.re, z0.im],
    };
    let eval = |u: &[f64; 3]| -> Result<Complex64> {
        let (xi, z) = unknowns_to_point(mode, u, alpha);
        f_nl(fam, xi, z, cfg, solver)
    };
    let mut f = eval(&u)?;
    let mut lambda = 1e-8;
    let mut iterations = 0;
    while iterations < opts.max_iter && f.norm() > opts.tol {
        iterations += 1;
        let (_, z) = unknowns_to_point(mode, &u, alpha);
        let hz = opts.h_z * (1.0 + z.norm());
        // columns of the real Jacobian of (Re F, Im F)
        let mut jac = [[0.0f64; 2]; 3];
        for (k, col) in jac.iter_mut().enumerate().take(n) {
            let h = if k == 0 { opts.h_xi } else { hz };
            let mut up = u;
            let mut dn = u;
            up[k] += h;
            dn[k] -= h;
            let d = (eval(&up)? - eval(&dn)?) / (2.0 * h);
            *col = [d.re, d.im];
        }
        if jac.iter().take(n).all(|c| c[0] == 0.0 && c[1] == 0.0) {
            return Err(Error::JacobianSingular);
        }
        let r = [f.re, f.im];
        let mut accepted = false;
        for _ in 0..12 {
            // (J Jᵀ + λ I) w = r, step = -Jᵀ w: minimum-norm damped step
            let mut a = [[0.0f64; 2]; 2];
            for col in jac.iter().take(n) {
                for i in 0..2 {
                    for j in 0..2 {
                        a[i][j] += col[i] * col[j];
                    }
                }
            }
            let trace = a[0][0] + a[1][1];
            a[0][0] += lambda * trace;
            a[1][1] += lambda * trace;
            let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
            if det == 0.0 || !det.is_finite() {
                lambda *= 10.0;
                continue;
            }
            let w = [(a[1][1] * r[0] - a[0][1] * r[1]) / det, (a[0][0] * r[1] - a[1][0] * r[0]) / det];
            let mut trial = u;
            for (k, col) in jac.iter().enumerate().take(n) {
                trial[k] -= col[0] * w[0] + col[1] * w[1];
            }
            if let Ok(ft) = eval(&trial) {
                if ft.norm() < f.norm() {
                    u = trial;
                    f = ft;
                    lambda = (lambda / 10.0).max(1e-12);
                    accepted = true;
                    break;
                }
            }
            lambda *= 10.0;
        }
        if !accepted {
            break;
        }
    }
    let residual = f.norm();
    if residual <= opts.tol {
        let (xi, z) = unknowns_to_point(mode, &u, alpha);
        Ok(NlRoot { xi: xi.rem_euclid(PI), z, residual, iterations })
    } else {
        Err(Error::NoConvergence { iterations, residual })
    }
}
