//! Decay-rate optimization through the nonlinear spectrum.

pub mod admissible;
pub mod betamin;
pub mod refine;
pub mod scan;
pub mod zero_freq;

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::bangbang::{f_nl, SolverOptions};
use crate::error::Result;
use crate::model::{AdmissibleFamily, ResonatorConfig};

pub use admissible::{admissible_thresholds, classify, Arrangement, Threshold};
pub use betamin::{beta_min, pareto_sweep, BetaSearch, ParetoPoint};
pub use refine::{refine_nl_root, NlRoot, RefineMode, RefineOptions};
pub use scan::{cluster_points, scan_nl_spectrum, Cluster, Detection, ScanGrid, ScanPoint, ScanResult, Statistic};
pub use zero_freq::{beta_min_zero, k2, ZeroFrequencyOptimum};

/// `|F_nl(·, z)|` over the phase grid `{nπ/N : 1 <= n <= N}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XiProfile {
    pub min: f64,
    pub argmin: f64,
    pub max: f64,
    /// Winding number of `e^{-iξ} F_nl(ξ, z)` over one period, when the samples resolve it.
    pub winding: Option<i64>,
}

pub fn xi_profile(fam: &AdmissibleFamily, z: Complex64, cfg: &ResonatorConfig, n_xi: usize, opts: &SolverOptions) -> Result<XiProfile> {
    let n = n_xi.max(4);
    let h = PI / n as f64;
    let g = |xi: f64| -> Result<(Complex64, f64)> {
        let f = f_nl(fam, xi, z, cfg, opts)?;
        Ok((Complex64::from_polar(1.0, -xi) * f, f.norm()))
    };
    let samples: Vec<(Complex64, f64)> = (1..=n).map(|j| g(j as f64 * h)).collect::<Result<_>>()?;
    let (mut min, mut argmin, mut max) = (f64::INFINITY, h, 0.0f64);
    for (j, s) in samples.iter().enumerate() {
        if s.1 < min {
            min = s.1;
            argmin = (j + 1) as f64 * h;
        }
        max = max.max(s.1);
    }
    // G is π-periodic, so the last sample closes the loop onto ξ = 0
    let mut total = 0.0;
    let mut reliable = min > 0.0;
    let mut prev = (0.0, samples[n - 1].0);
    for (j, s) in samples.iter().enumerate() {
        let x = (j + 1) as f64 * h;
        let (turn, ok) = arg_increment(&g, prev.0, prev.1, x, s.0, 0, &mut min, &mut argmin)?;
        total += turn;
        reliable &= ok;
        prev = (x, s.0);
    }
    let turns = total / (2.0 * PI);
    let winding = (reliable && (turns - turns.round()).abs() < 0.1).then(|| turns.round() as i64);
    Ok(XiProfile { min, argmin: argmin % PI, max, winding })
}

/// Change of `arg G` from `a` to `b`, bisecting while a step exceeds a quarter turn.
#[allow(clippy::too_many_arguments)]
fn arg_increment(
    g: &impl Fn(f64) -> Result<(Complex64, f64)>,
    a: f64,
    ga: Complex64,
    b: f64,
    gb: Complex64,
    depth: usize,
    min: &mut f64,
    argmin: &mut f64,
) -> Result<(f64, bool)> {
    let d = (gb / ga).arg();
    if d.abs() <= 0.25 * PI {
        return Ok((d, true));
    }
    if depth >= 20 {
        return Ok((d, false));
    }
    let m = 0.5 * (a + b);
    let (gm, am) = g(m)?;
    if am < *min {
        *min = am;
        *argmin = m;
    }
    if am == 0.0 {
        return Ok((d, false));
    }
    let (d1, ok1) = arg_increment(g, a, ga, m, gm, depth + 1, min, argmin)?;
    let (d2, ok2) = arg_increment(g, m, gm, b, gb, depth + 1, min, argmin)?;
    Ok((d1 + d2, ok1 && ok2))
}
