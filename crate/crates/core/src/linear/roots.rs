//! Locating zeros of `F(·; B)`: grid scan, Newton polish and argument-principle counts.
//!
//! Resonances lying exactly on the boundary of the search rectangle may be
//! missed or dropped; widen the rectangle slightly when that matters.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::theta::{char_f, df_dz};
use super::Resonance;
use crate::error::{Error, Result};
use crate::model::{Rect, ResonatorConfig, StepFunction};

/// Closed contour traversed counterclockwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Contour {
    Circle { center: Complex64, radius: f64 },
    Rect(Rect),
}

impl Contour {
    /// Point at parameter `t ∈ [0, 1]`.
    pub fn point(&self, t: f64) -> Complex64 {
        match *self {
            Contour::Circle { center, radius } => center + Complex64::from_polar(radius, 2.0 * PI * t),
            Contour::Rect(r) => {
                let (w, h) = (r.width(), r.height());
                let mut s = t * 2.0 * (w + h);
                if s <= w {
                    return Complex64::new(r.re_min + s, r.im_min);
                }
                s -= w;
                if s <= h {
                    return Complex64::new(r.re_max, r.im_min + s);
                }
                s -= h;
                if s <= w {
                    return Complex64::new(r.re_max - s, r.im_max);
                }
                s -= w;
                Complex64::new(r.re_min, r.im_max - s.min(h))
            }
        }
    }
}

const MAX_WINDING_DEPTH: u32 = 24;

/// Winding number of `f` along the contour, refining segments where the
/// argument jumps by more than `π/4`.
pub fn winding_number(f: impl Fn(Complex64) -> Complex64, contour: &Contour, n_samples: usize) -> Result<i64> {
    let n = n_samples.max(8);
    let ts: Vec<f64> = (0..=n).map(|k| k as f64 / n as f64).collect();
    let vals: Vec<Complex64> = ts.iter().map(|t| f(contour.point(*t))).collect();
    let scale = vals.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let floor = 1e-13 * scale;
    let mut min_abs = f64::INFINITY;
    let mut total = 0.0;
    for k in 0..n {
        total += segment_angle(&f, contour, ts[k], ts[k + 1], vals[k], vals[k + 1], floor, 0, &mut min_abs)?;
    }
    let turns = total / (2.0 * PI);
    let rounded = turns.round();
    if (turns - rounded).abs() > 0.05 || !min_abs.is_finite() || min_abs <= floor {
        return Err(Error::ContourTooCloseToZero { min_abs });
    }
    Ok(rounded as i64)
}

#[allow(clippy::too_many_arguments)]
fn segment_angle(
    f: &impl Fn(Complex64) -> Complex64,
    contour: &Contour,
    t0: f64,
    t1: f64,
    f0: Complex64,
    f1: Complex64,
    floor: f64,
    depth: u32,
    min_abs: &mut f64,
) -> Result<f64> {
    *min_abs = min_abs.min(f0.norm()).min(f1.norm());
    if *min_abs <= floor {
        return Err(Error::ContourTooCloseToZero { min_abs: *min_abs });
    }
    let d = (f1 / f0).arg();
    if d.abs() <= PI / 4.0 {
        return Ok(d);
    }
    if depth >= MAX_WINDING_DEPTH {
        return Err(Error::ContourTooCloseToZero { min_abs: *min_abs });
    }
    let tm = 0.5 * (t0 + t1);
    let fm = f(contour.point(tm));
    Ok(segment_angle(f, contour, t0, tm, f0, fm, floor, depth + 1, min_abs)?
        + segment_angle(f, contour, tm, t1, fm, f1, floor, depth + 1, min_abs)?)
}

/// Total multiplicity of resonances of `b` enclosed by the contour.
pub fn count_zeros_winding(b: &StepFunction, cfg: &ResonatorConfig, contour: &Contour, n_samples: usize) -> Result<usize> {
    let w = winding_number(|z| char_f(b, z, cfg), contour, n_samples)?;
    Ok(w.max(0) as usize)
}

/// Newton iteration on `F(·; B)` with the analytic derivative, run to roundoff.
/// Returns the root and `|F|` there.
pub fn newton_polish(
    b: &StepFunction,
    cfg: &ResonatorConfig,
    z0: Complex64,
    tol: f64,
    max_iter: usize,
) -> Result<(Complex64, f64)> {
    let mut z = z0;
    let mut f = char_f(b, z, cfg);
    let mut small_steps = 0;
    for _ in 0..max_iter {
        let d = df_dz(b, z, cfg);
        if d.norm() == 0.0 || !d.is_finite() {
            break;
        }
        let step = f / d;
        let mut lambda = 1.0;
        let mut z_new = z - step;
        let mut f_new = char_f(b, z_new, cfg);
        let mut halvings = 0;
        while !(f_new.norm() <= f.norm()) && halvings < 12 && f.norm() > tol {
            lambda *= 0.5;
            z_new = z - step * lambda;
            f_new = char_f(b, z_new, cfg);
            halvings += 1;
        }
        let moved = (z_new - z).norm();
        z = z_new;
        f = f_new;
        if !z.is_finite() {
            break;
        }
        if moved <= 1e-15 * (1.0 + z.norm()) {
            small_steps += 1;
            if small_steps >= 2 {
                break;
            }
        }
    }
    let res = f.norm();
    if res <= tol && z.is_finite() {
        Ok((z, res))
    } else {
        Err(Error::NoConvergence { iterations: max_iter, residual: res })
    }
}

/// Result of a rectangle search. Candidates whose Newton run failed are kept
/// as diagnostics rather than aborting the search.
#[derive(Debug, Clone, Default)]
pub struct SearchOutcome {
    pub resonances: Vec<Resonance>,
    pub diverged: Vec<Complex64>,
    /// Argument-principle count on the rectangle boundary, when computable.
    pub enclosed: Option<usize>,
}

impl SearchOutcome {
    pub fn total_multiplicity(&self) -> usize {
        self.resonances.iter().map(|r| r.multiplicity).sum()
    }
}

fn scan_candidates(b: &StepFunction, cfg: &ResonatorConfig, rect: &Rect, hr: f64, hi: f64) -> Vec<Complex64> {
    let nr = ((rect.width() / hr).ceil() as usize).max(1) + 1;
    let ni = ((rect.height() / hi).ceil() as usize).max(1) + 1;
    let dr = rect.width() / (nr - 1) as f64;
    let di = rect.height() / (ni - 1) as f64;
    let at = |i: usize, j: usize| Complex64::new(rect.re_min + i as f64 * dr, rect.im_min + j as f64 * di);
    let vals: Vec<f64> = (0..nr * ni)
        .into_par_iter()
        .map(|k| char_f(b, at(k / ni, k % ni), cfg).norm())
        .collect();
    let v = |i: usize, j: usize| vals[i * ni + j];
    let mut out = Vec::new();
    for i in 0..nr {
        for j in 0..ni {
            let here = v(i, j);
            let mut is_min = here.is_finite();
            'nb: for di_ in -1i64..=1 {
                for dj in -1i64..=1 {
                    if di_ == 0 && dj == 0 {
                        continue;
                    }
                    let (ii, jj) = (i as i64 + di_, j as i64 + dj);
                    if ii < 0 || jj < 0 || ii >= nr as i64 || jj >= ni as i64 {
                        continue;
                    }
                    if v(ii as usize, jj as usize) < here {
                        is_min = false;
                        break 'nb;
                    }
                }
            }
            if is_min {
                out.push(at(i, j));
            }
        }
    }
    out
}

/// Multiplicity from a small circle; the radius shrinks if the circle grazes another zero.
pub fn multiplicity_at(b: &StepFunction, cfg: &ResonatorConfig, omega: Complex64, radius: f64) -> usize {
    let mut r = radius;
    for _ in 0..6 {
        match count_zeros_winding(b, cfg, &Contour::Circle { center: omega, radius: r }, 64) {
            Ok(m) if m > 0 => return m,
            _ => r *= 0.5,
        }
    }
    1
}

/// All resonances of `b` in `rect`: grid scan of `|F|` with steps `grid`,
/// Newton polish to `|F| <= tol`, deduplication, and multiplicities from
/// winding numbers. The scan is refined (up to three halvings) while the
/// argument-principle count on the rectangle exceeds what was found.
pub fn find_resonances(
    b: &StepFunction,
    cfg: &ResonatorConfig,
    rect: &Rect,
    grid: (f64, f64),
    tol: f64,
) -> Result<SearchOutcome> {
    if !(grid.0 > 0.0 && grid.1 > 0.0) || !(rect.width() > 0.0 && rect.height() > 0.0) {
        return Err(Error::Config("search rectangle and grid steps must be positive".into()));
    }
    let enclosed = count_zeros_winding(b, cfg, &Contour::Rect(*rect), 512).ok();
    let mut roots: Vec<Complex64> = Vec::new();
    let mut diverged = Vec::new();
    let (mut hr, mut hi) = grid;
    for _round in 0..4 {
        let cands = scan_candidates(b, cfg, rect, hr, hi);
        let polished: Vec<(Complex64, Result<(Complex64, f64)>)> = cands
            .par_iter()
            .map(|c| (*c, newton_polish(b, cfg, *c, tol, 80)))
            .collect();
        for (c, r) in polished {
            match r {
                Ok((w, _)) if rect.contains(w) => {
                    if !roots.iter().any(|q| (q - w).norm() < tol.max(1e-12) * (1.0 + w.norm()) * 1e3) {
                        roots.push(w);
                    }
                }
                Ok(_) => {}
                Err(_) => diverged.push(c),
            }
        }
        match enclosed {
            Some(n) if roots.len() < n => {
                hr *= 0.5;
                hi *= 0.5;
            }
            _ => break,
        }
    }
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let resonances = roots
        .iter()
        .enumerate()
        .map(|(k, w)| {
            let nearest = roots
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != k)
                .map(|(_, q)| (q - w).norm())
                .fold(f64::INFINITY, f64::min);
            let radius = (0.25 * nearest).min(1e-3 * (1.0 + w.norm())).min(0.25 * hr.min(hi));
            Resonance {
                omega: *w,
                multiplicity: multiplicity_at(b, cfg, *w, radius),
                residual: char_f(b, *w, cfg).norm(),
            }
        })
        .collect();
    Ok(SearchOutcome { resonances, diverged, enclosed })
}
