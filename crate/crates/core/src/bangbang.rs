//! The bang-bang equation `y'' = -z² (b1 + (b2 - b1) χ(Im y² > 0)) y`.
//!
//! Between sign changes of `Im y²` the coefficient is constant, so each region
//! is propagated with the exact layer basis. Sign changes are located on the
//! closed-form solution, and the coefficient after each one is chosen so that
//! the sign of `Im y²` just beyond the point agrees with it.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linear::propagate::LayerBasis;
use crate::linear::theta::boundary_functional;
use crate::model::{AdmissibleFamily, FamilyPiece, ResonatorConfig, StepFunction, WaveState};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Which constraint is active on a region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Choice {
    /// `b1`, where `Im y² <= 0`.
    Lower,
    /// `b2`, where `Im y² > 0`.
    Upper,
}

impl Choice {
    /// Whether the sign of `Im y²` selects this choice.
    pub fn admits(self, g: f64) -> bool {
        match self {
            Choice::Upper => g > 0.0,
            Choice::Lower => g <= 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    pub left: f64,
    pub right: f64,
    pub choice: Choice,
    /// Coefficient used on the region.
    pub value: f64,
    /// False on pieces where `b1 = b2`; those are labelled `Lower`.
    pub free: bool,
}

/// Piecewise description of a bang-bang solution.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RegionTrace {
    pub regions: Vec<Region>,
    /// States at `regions[0].left` and at the right end of every region.
    pub states: Vec<WaveState>,
}

impl RegionTrace {
    /// Interior points where `Im y²` changes sign and the coefficient switches.
    pub fn switch_points(&self) -> Vec<f64> {
        self.regions
            .windows(2)
            .filter(|w| w[0].free && w[1].free && w[0].choice != w[1].choice)
            .map(|w| w[0].right)
            .collect()
    }

    /// The coefficient `B(y)` as a step function (equal neighbours merged).
    pub fn structure(&self) -> Result<StepFunction> {
        let first = self.regions.first().ok_or_else(|| Error::InvalidStepFunction("empty trace".into()))?;
        let last = self.regions.last().expect("nonempty");
        let floor = 1e-9 * (last.right - first.left);
        // slivers left by crossings at a breakpoint, or by a residual zero of θ at a2,
        // are absorbed by their neighbours
        let mut bps = vec![first.left];
        let mut values = Vec::with_capacity(self.regions.len());
        for r in &self.regions {
            if r.right - r.left <= floor && !values.is_empty() {
                *bps.last_mut().expect("nonempty") = r.right;
                continue;
            }
            bps.push(r.right);
            values.push(r.value);
        }
        if values.len() > 1 && bps[1] - bps[0] <= floor {
            bps.remove(1);
            values.remove(0);
        }
        Ok(StepFunction::new(bps, values)?.normalized())
    }

    pub fn final_state(&self) -> Option<&WaveState> {
        self.states.last()
    }

    fn push(&mut self, region: Region, end: WaveState) {
        if let Some(last) = self.regions.last_mut() {
            if region.right <= region.left {
                *self.states.last_mut().expect("state per region") = end;
                return;
            }
            if last.choice == region.choice && last.free == region.free && last.value == region.value {
                last.right = region.right;
                *self.states.last_mut().expect("state per region") = end;
                return;
            }
        }
        self.regions.push(region);
        self.states.push(end);
    }
}

/// Numerical settings of the stepper.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Samples per constraint piece used to detect sign changes of `Im y²`.
    pub samples_per_piece: usize,
    /// Upper bound on `step · |z sqrt(b)|`.
    pub max_phase_step: f64,
    /// Sign-change location accuracy relative to the interval length.
    pub crossing_tol: f64,
    /// Probe length relative to the interval length, used when the local
    /// expansion cannot decide the next coefficient.
    pub probe_delta: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { samples_per_piece: 64, max_phase_step: 0.2, crossing_tol: 1e-13, probe_delta: 1e-8 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NlEigenpair {
    pub omega: Complex64,
    pub xi: f64,
    pub trace: RegionTrace,
    pub residual: f64,
}

/// Sign of the leading significant Taylor coefficient of `Im y²(a + t)` for
/// `y'' = -z² b y`, `y(a) = c0`, `y'(a) = c1`.
fn leading_sign(c0: Complex64, c1: Complex64, z2: Complex64, b: f64) -> i8 {
    const ORDER: usize = 12;
    let mut a = [ZERO; ORDER + 1];
    a[0] = c0;
    a[1] = c1;
    for k in 0..ORDER - 1 {
        a[k + 2] = -z2 * b * a[k] / ((k + 1) * (k + 2)) as f64;
    }
    for k in 0..=ORDER {
        let mut q = ZERO;
        let mut scale = 0.0;
        for i in 0..=k {
            q += a[i] * a[k - i];
            scale += a[i].norm() * a[k - i].norm();
        }
        if scale > 0.0 && q.im.abs() > 1e-12 * scale {
            return if q.im > 0.0 { 1 } else { -1 };
        }
    }
    0
}

fn consistent(choice: Choice, sign: i8) -> bool {
    match choice {
        Choice::Upper => sign > 0,
        Choice::Lower => sign <= 0,
    }
}

struct Stepper<'a> {
    z: Complex64,
    z2: Complex64,
    opts: &'a SolverOptions,
    length: f64,
}

impl Stepper<'_> {
    /// Coefficient on `piece` just to the right of `state`.
    fn decide(&self, piece: &FamilyPiece, state: &WaveState) -> Result<Choice> {
        let lo = consistent(Choice::Lower, leading_sign(state.y, state.dy, self.z2, piece.lower));
        let up = consistent(Choice::Upper, leading_sign(state.y, state.dy, self.z2, piece.upper));
        match (lo, up) {
            (true, false) => return Ok(Choice::Lower),
            (false, true) => return Ok(Choice::Upper),
            _ => {}
        }
        let room = piece.right - state.x;
        let mut delta = self.opts.probe_delta * self.length;
        for _ in 0..4 {
            let d = delta.min(0.5 * room);
            let probe = |b: f64| {
                let (y, _) = LayerBasis::new(b, d, self.z).apply(state.y, state.dy);
                (y * y).im
            };
            let lo = Choice::Lower.admits(probe(piece.lower));
            let up = Choice::Upper.admits(probe(piece.upper));
            match (lo, up) {
                (true, false) => return Ok(Choice::Lower),
                (false, true) => return Ok(Choice::Upper),
                _ => delta *= 0.1,
            }
        }
        Err(Error::AmbiguousBranch {
            x: state.x,
            detail: format!("y = {}, y' = {}, z = {}: both or neither coefficient is self-consistent", state.y, state.dy, self.z),
        })
    }

    /// Tight bracket `[lo, hi]` around a sign change of `f` (value, derivative).
    fn bracket_zero(&self, f: impl Fn(f64) -> (f64, f64), mut lo: f64, mut hi: f64) -> (f64, f64) {
        let tol = self.opts.crossing_tol * self.length;
        let lo_pos = f(lo).0 > 0.0;
        let mut x = 0.5 * (lo + hi);
        for _ in 0..200 {
            if hi - lo <= tol {
                break;
            }
            let (v, d) = f(x);
            if (v > 0.0) == lo_pos {
                lo = x;
            } else {
                hi = x;
            }
            let newton = x - v / d;
            let next = if d != 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
            if (next - x).abs() <= 0.25 * tol {
                // pin the bracket around the converged iterate
                let (a, b) = ((next - 0.5 * tol).max(lo), (next + 0.5 * tol).min(hi));
                if (f(a).0 > 0.0) == lo_pos {
                    lo = a;
                }
                if (f(b).0 > 0.0) != lo_pos {
                    hi = b;
                }
                x = 0.5 * (lo + hi);
                continue;
            }
            x = next;
        }
        (lo, hi)
    }

    /// First sign change of `Re y`, `Im y` or the admissibility of `Im y²` inside `[lo, hi]`
    /// for the solution started at `start`; returns a point just past it.
    fn locate(&self, start: &WaveState, b: f64, choice: Choice, lo: f64, hi: f64) -> f64 {
        let at = |x: f64| LayerBasis::new(b, x - start.x, self.z).apply(start.y, start.dy);
        let (y0, _) = at(lo);
        let (y1, _) = at(hi);
        let mut best = hi;
        let mut found = false;
        if y0.re * y1.re < 0.0 {
            best = best.min(self.bracket_zero(|x| { let (y, dy) = at(x); (y.re, dy.re) }, lo, hi).1);
            found = true;
        }
        if y0.im * y1.im < 0.0 {
            best = best.min(self.bracket_zero(|x| { let (y, dy) = at(x); (y.im, dy.im) }, lo, hi).1);
            found = true;
        }
        if !found {
            let g = |x: f64| {
                let (y, _) = at(x);
                let v = (y * y).im;
                (if choice.admits(v) { v.abs().max(f64::MIN_POSITIVE) } else { -v.abs().max(f64::MIN_POSITIVE) }, 0.0)
            };
            best = self.bracket_zero(g, lo, hi).1;
        }
        best
    }

    fn run(&self, fam: &AdmissibleFamily, init: WaveState, mut rec: Option<&mut RegionTrace>) -> Result<WaveState> {
        let mut state = init;
        if let Some(r) = rec.as_deref_mut() {
            r.states.push(state);
        }
        for piece in fam.pieces() {
            if piece.right <= state.x {
                continue;
            }
            if !piece.is_free() {
                let (y, dy) = LayerBasis::new(piece.lower, piece.right - state.x, self.z).apply(state.y, state.dy);
                let end = WaveState::new(piece.right, y, dy);
                if let Some(r) = rec.as_deref_mut() {
                    let region = Region { left: state.x, right: piece.right, choice: Choice::Lower, value: piece.lower, free: false };
                    r.push(region, end);
                }
                state = end;
                continue;
            }
            state = self.run_free_piece(&piece, state, rec.as_deref_mut())?;
        }
        Ok(state)
    }

    fn run_free_piece(&self, piece: &FamilyPiece, mut start: WaveState, mut rec: Option<&mut RegionTrace>) -> Result<WaveState> {
        let mut choice = self.decide(piece, &start)?;
        let base_step = piece.width() / self.opts.samples_per_piece.max(1) as f64;
        let mut stuck = 0;
        loop {
            let b = match choice {
                Choice::Lower => piece.lower,
                Choice::Upper => piece.upper,
            };
            let s = self.z.norm() * b.sqrt();
            let h = if s > 0.0 { base_step.min(self.opts.max_phase_step / s) } else { base_step };
            let basis_h = LayerBasis::new(b, h, self.z);
            let (mut t, mut y, mut dy) = (start.x, start.y, start.dy);
            let mut crossing = None;
            while t < piece.right {
                let (t1, (y1, dy1)) = if t + h < piece.right {
                    (t + h, basis_h.apply(y, dy))
                } else {
                    let w = piece.right - start.x;
                    (piece.right, LayerBasis::new(b, w, self.z).apply(start.y, start.dy))
                };
                if y.re * y1.re < 0.0 || y.im * y1.im < 0.0 || !choice.admits((y1 * y1).im) {
                    crossing = Some((t, t1));
                    break;
                }
                (t, y, dy) = (t1, y1, dy1);
            }
            let end_x = match crossing {
                None => piece.right,
                Some((lo, hi)) => self.locate(&start, b, choice, lo, hi),
            };
            let (ye, dye) = LayerBasis::new(b, end_x - start.x, self.z).apply(start.y, start.dy);
            let end = WaveState::new(end_x, ye, dye);
            if let Some(r) = rec.as_deref_mut() {
                r.push(Region { left: start.x, right: end_x, choice, value: b, free: true }, end);
            }
            if crossing.is_none() {
                return Ok(end);
            }
            let next = self.decide(piece, &end)?;
            if end_x - start.x <= 10.0 * self.opts.crossing_tol * self.length {
                stuck += 1;
                if stuck > 50 {
                    return Err(Error::AmbiguousBranch {
                        x: end_x,
                        detail: format!("no progress past a sign change of Im y² at z = {}", self.z),
                    });
                }
            } else {
                stuck = 0;
            }
            choice = next;
            start = end;
        }
    }
}

fn check_inputs(fam: &AdmissibleFamily, z: Complex64, cfg: &ResonatorConfig) -> Result<()> {
    if !fam.bangbang_ready() {
        return Err(Error::NotBangbangReady);
    }
    if fam.interval() != cfg.interval {
        return Err(Error::MismatchedInterval);
    }
    if (z * z).im > 0.0 {
        return Err(Error::UpperHalfPlaneZ(z));
    }
    Ok(())
}

/// Solve the bang-bang equation forward from `init` to `a2`.
pub fn solve_bangbang_ivp(
    fam: &AdmissibleFamily,
    z: Complex64,
    init: WaveState,
    cfg: &ResonatorConfig,
    opts: &SolverOptions,
) -> Result<RegionTrace> {
    check_inputs(fam, z, cfg)?;
    let stepper = Stepper { z, z2: z * z, opts, length: cfg.length() };
    let mut trace = RegionTrace::default();
    stepper.run(fam, init, Some(&mut trace))?;
    Ok(trace)
}

/// `Θ(a1) = e^{iξ}`, `Θ'(a1) = -i z ν1 e^{iξ}`.
pub fn theta_nl_initial(xi: f64, z: Complex64, cfg: &ResonatorConfig) -> WaveState {
    let phase = Complex64::from_polar(1.0, xi);
    WaveState::new(cfg.interval.a1(), phase, -I * z * cfg.nu1() * phase)
}

/// `Θ(a2; ξ, z)` and the full trace.
pub fn theta_nl(
    fam: &AdmissibleFamily,
    xi: f64,
    z: Complex64,
    cfg: &ResonatorConfig,
    opts: &SolverOptions,
) -> Result<(WaveState, RegionTrace)> {
    let trace = solve_bangbang_ivp(fam, z, theta_nl_initial(xi, z, cfg), cfg, opts)?;
    let end = *trace.final_state().expect("nonempty trace");
    Ok((end, trace))
}

/// `F_nl(ξ, z)`, the boundary functional of `Θ`.
pub fn f_nl(fam: &AdmissibleFamily, xi: f64, z: Complex64, cfg: &ResonatorConfig, opts: &SolverOptions) -> Result<Complex64> {
    if z == ZERO {
        return Ok(Complex64::new(1.0 + cfg.boundary.ratio(), 0.0));
    }
    check_inputs(fam, z, cfg)?;
    let stepper = Stepper { z, z2: z * z, opts, length: cfg.length() };
    let end = stepper.run(fam, theta_nl_initial(xi, z, cfg), None)?;
    Ok(boundary_functional(&end, z, cfg))
}

/// Optimal structure encoded by an eigenpair, checked to carry `ω` as a linear resonance.
pub fn recover_structure(pair: &NlEigenpair, fam: &AdmissibleFamily, cfg: &ResonatorConfig, tol: f64) -> Result<StepFunction> {
    let b = pair.trace.structure()?;
    if !fam.contains(&b) {
        return Err(Error::RoundTripFailure { residual: f64::INFINITY });
    }
    let residual = crate::linear::theta::char_f(&b, pair.omega, cfg).norm();
    if !(residual <= 10.0 * tol) {
        return Err(Error::RoundTripFailure { residual });
    }
    Ok(b)
}

/// Eigenpair at `(ξ, ω)` with its trace and residual.
pub fn nl_eigenpair(
    fam: &AdmissibleFamily,
    xi: f64,
    omega: Complex64,
    cfg: &ResonatorConfig,
    opts: &SolverOptions,
) -> Result<NlEigenpair> {
    let (end, trace) = theta_nl(fam, xi, omega, cfg, opts)?;
    let residual = boundary_functional(&end, omega, cfg).norm();
    Ok(NlEigenpair { omega, xi, trace, residual })
}
