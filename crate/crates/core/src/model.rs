//! Value types shared by every solver: the resonator interval, boundary
//! parameters, piecewise-constant structures and admissible families.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The resonator `[a1, a2]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    a1: f64,
    a2: f64,
}

impl Interval {
    pub fn new(a1: f64, a2: f64) -> Result<Self> {
        if !(a1.is_finite() && a2.is_finite() && a1 < a2) {
            return Err(Error::InvalidInterval { a1, a2 });
        }
        Ok(Self { a1, a2 })
    }

    pub fn a1(&self) -> f64 {
        self.a1
    }

    pub fn a2(&self) -> f64 {
        self.a2
    }

    pub fn length(&self) -> f64 {
        self.a2 - self.a1
    }
}

/// Damping parameter at the right end. `Infinite` is the Dirichlet end `y(a2) = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Nu2 {
    Finite(f64),
    Infinite,
}

impl Nu2 {
    /// `1 / nu2`, zero for the Dirichlet end.
    pub fn recip(&self) -> f64 {
        match *self {
            Nu2::Finite(v) => 1.0 / v,
            Nu2::Infinite => 0.0,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Nu2::Infinite)
    }

    /// Comparison `x < nu2` treating the infinite end as larger than any real.
    pub fn exceeds(&self, x: f64) -> bool {
        match *self {
            Nu2::Finite(v) => x < v,
            Nu2::Infinite => true,
        }
    }
}

/// Boundary parameters `nu1 ∈ [0, ∞)`, `nu2 ∈ (0, ∞]` with `nu1 <= nu2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryParams {
    nu1: f64,
    nu2: Nu2,
}

impl BoundaryParams {
    pub fn new(nu1: f64, nu2: Nu2) -> Result<Self> {
        if !(nu1.is_finite() && nu1 >= 0.0) {
            return Err(Error::InvalidBoundary(format!("nu1 = {nu1} must be finite and >= 0")));
        }
        if let Nu2::Finite(v) = nu2 {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidBoundary(format!("nu2 = {v} must be positive")));
            }
            if nu1 > v {
                return Err(Error::InvalidBoundary(format!(
                    "nu1 = {nu1} exceeds nu2 = {v}; mirror the interval instead"
                )));
            }
        }
        if nu1 + nu2.recip() == 0.0 {
            return Err(Error::InvalidBoundary(
                "nu1 = 0 with nu2 = inf gives a conservative resonator".into(),
            ));
        }
        Ok(Self { nu1, nu2 })
    }

    pub fn nu1(&self) -> f64 {
        self.nu1
    }

    pub fn nu2(&self) -> Nu2 {
        self.nu2
    }

    /// `nu1 / nu2`, zero for the Dirichlet end.
    pub fn ratio(&self) -> f64 {
        self.nu1 * self.nu2.recip()
    }
}

/// Interval plus boundary parameters: everything except the structure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonatorConfig {
    pub interval: Interval,
    pub boundary: BoundaryParams,
}

impl ResonatorConfig {
    pub fn new(interval: Interval, boundary: BoundaryParams) -> Self {
        Self { interval, boundary }
    }

    pub fn nu1(&self) -> f64 {
        self.boundary.nu1
    }

    pub fn nu2(&self) -> Nu2 {
        self.boundary.nu2
    }

    pub fn length(&self) -> f64 {
        self.interval.length()
    }
}

/// Piecewise-constant function: `values[k]` holds on `(breakpoints[k], breakpoints[k+1])`.
///
/// Structures and constraints are nonnegative; perturbation directions use
/// [`StepFunction::signed`] and may take negative values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepFunction {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl StepFunction {
    /// Nonnegative step function.
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if let Some(k) = values.iter().position(|v| *v < 0.0) {
            return Err(Error::InvalidStepFunction(format!(
                "value {} on piece {k} is negative",
                values[k]
            )));
        }
        Self::signed(breakpoints, values)
    }

    /// Step function with values of either sign.
    pub fn signed(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(Error::InvalidStepFunction("need at least two breakpoints".into()));
        }
        if values.len() + 1 != breakpoints.len() {
            return Err(Error::InvalidStepFunction(format!(
                "{} breakpoints need {} values, got {}",
                breakpoints.len(),
                breakpoints.len() - 1,
                values.len()
            )));
        }
        if breakpoints.iter().chain(values.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidStepFunction("non-finite entry".into()));
        }
        if let Some(k) = breakpoints.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::InvalidStepFunction(format!(
                "breakpoints not strictly increasing at index {k} (zero-width piece)"
            )));
        }
        Ok(Self { breakpoints, values })
    }

    pub fn constant(interval: Interval, value: f64) -> Result<Self> {
        Self::new(vec![interval.a1(), interval.a2()], vec![value])
    }

    /// Layers given by their widths, starting at `a1`.
    pub fn from_layers(a1: f64, layers: &[(f64, f64)]) -> Result<Self> {
        let mut breakpoints = Vec::with_capacity(layers.len() + 1);
        let mut x = a1;
        breakpoints.push(x);
        for (width, _) in layers {
            x += width;
            breakpoints.push(x);
        }
        Self::new(breakpoints, layers.iter().map(|l| l.1).collect())
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn n_pieces(&self) -> usize {
        self.values.len()
    }

    pub fn start(&self) -> f64 {
        self.breakpoints[0]
    }

    pub fn end(&self) -> f64 {
        *self.breakpoints.last().expect("at least two breakpoints")
    }

    pub fn interval(&self) -> Interval {
        Interval { a1: self.start(), a2: self.end() }
    }

    /// `(left, right, value)` for each piece.
    pub fn pieces(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.breakpoints
            .windows(2)
            .zip(self.values.iter())
            .map(|(w, v)| (w[0], w[1], *v))
    }

    /// Value at `x`; breakpoints belong to the piece on their right (the last one to the left).
    pub fn value_at(&self, x: f64) -> f64 {
        let k = self.breakpoints.partition_point(|b| *b <= x);
        let k = k.saturating_sub(1).min(self.values.len() - 1);
        self.values[k]
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|v| *v >= 0.0)
    }

    pub fn integral(&self) -> f64 {
        self.pieces().map(|(l, r, v)| (r - l) * v).sum()
    }

    /// Merge adjacent pieces with equal values.
    pub fn normalized(&self) -> Self {
        let mut breakpoints = vec![self.breakpoints[0]];
        let mut values: Vec<f64> = Vec::new();
        for (_, r, v) in self.pieces() {
            if values.last() == Some(&v) {
                *breakpoints.last_mut().unwrap() = r;
            } else {
                values.push(v);
                breakpoints.push(r);
            }
        }
        Self { breakpoints, values }
    }

    /// Same function on a finer (sorted, containing all current) breakpoint grid.
    pub fn on_grid(&self, grid: &[f64]) -> Self {
        let values = grid
            .windows(2)
            .map(|w| self.value_at(0.5 * (w[0] + w[1])))
            .collect();
        Self { breakpoints: grid.to_vec(), values }
    }

    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            breakpoints: self.breakpoints.clone(),
            values: self.values.iter().map(|v| f(*v)).collect(),
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        self.map_values(|v| c * v)
    }

    /// Pointwise `self + c * other` on the common grid.
    pub fn add_scaled(&self, other: &StepFunction, c: f64) -> Result<Self> {
        let (f, g) = refine_breakpoints(self, other)?;
        Ok(Self {
            breakpoints: f.breakpoints,
            values: f.values.iter().zip(&g.values).map(|(a, b)| a + c * b).collect(),
        })
    }

    /// Indicator of `(left, right)` scaled by `height`, on the interval.
    pub fn indicator(interval: Interval, left: f64, right: f64, height: f64) -> Result<Self> {
        let mut breakpoints = vec![interval.a1()];
        let mut values = Vec::new();
        if left > interval.a1() {
            breakpoints.push(left);
            values.push(0.0);
        }
        values.push(height);
        if right < interval.a2() {
            breakpoints.push(right);
            values.push(0.0);
        }
        breakpoints.push(interval.a2());
        Self::signed(breakpoints, values)
    }
}

/// Put two step functions on the sorted union of their breakpoints.
pub fn refine_breakpoints(f: &StepFunction, g: &StepFunction) -> Result<(StepFunction, StepFunction)> {
    if f.start() != g.start() || f.end() != g.end() {
        return Err(Error::MismatchedInterval);
    }
    let mut grid: Vec<f64> = f.breakpoints.iter().chain(&g.breakpoints).copied().collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    Ok((f.on_grid(&grid), g.on_grid(&grid)))
}

/// One piece of an admissible family's common grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyPiece {
    pub left: f64,
    pub right: f64,
    pub lower: f64,
    pub upper: f64,
}

impl FamilyPiece {
    pub fn width(&self) -> f64 {
        self.right - self.left
    }

    /// True when the piece belongs to the set `E` where the constraints differ.
    pub fn is_free(&self) -> bool {
        self.lower < self.upper
    }
}

/// The admissible family `{B : b1 <= B <= b2}` on a common breakpoint grid.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibleFamily {
    lower: StepFunction,
    upper: StepFunction,
    bangbang_ready: bool,
}

impl AdmissibleFamily {
    pub fn new(b1: StepFunction, b2: StepFunction) -> Result<Self> {
        validate_family(b1, b2)
    }

    /// Constant constraints on an interval.
    pub fn constant(interval: Interval, b1: f64, b2: f64) -> Result<Self> {
        Self::new(StepFunction::constant(interval, b1)?, StepFunction::constant(interval, b2)?)
    }

    /// The degenerate family `{b}` (empty `E`). Not a valid optimization family,
    /// but bang-bang solves over it reduce to the linear equation.
    pub fn singleton(b: StepFunction) -> Self {
        Self { lower: b.clone(), upper: b, bangbang_ready: true }
    }

    pub fn lower(&self) -> &StepFunction {
        &self.lower
    }

    pub fn upper(&self) -> &StepFunction {
        &self.upper
    }

    /// True iff `b1 > 0` wherever `b1 < b2`.
    pub fn bangbang_ready(&self) -> bool {
        self.bangbang_ready
    }

    pub fn interval(&self) -> Interval {
        self.lower.interval()
    }

    pub fn pieces(&self) -> impl Iterator<Item = FamilyPiece> + '_ {
        self.lower
            .pieces()
            .zip(self.upper.values().iter())
            .map(|((left, right, lower), upper)| FamilyPiece { left, right, lower, upper: *upper })
    }

    /// True if `b` lies between the constraints everywhere.
    pub fn contains(&self, b: &StepFunction) -> bool {
        let Ok((b, lo)) = refine_breakpoints(b, &self.lower) else {
            return false;
        };
        let (_, hi) = refine_breakpoints(&b, &self.upper).expect("same interval");
        b.values()
            .iter()
            .zip(lo.values())
            .zip(hi.values())
            .all(|((v, l), h)| l <= v && v <= h)
    }

    /// True if every piece of `b` equals `b1` or `b2` there.
    pub fn is_extreme_point(&self, b: &StepFunction) -> bool {
        let Ok((b, lo)) = refine_breakpoints(b, &self.lower) else {
            return false;
        };
        let (_, hi) = refine_breakpoints(&b, &self.upper).expect("same interval");
        b.values()
            .iter()
            .zip(lo.values())
            .zip(hi.values())
            .all(|((v, l), h)| v == l || v == h)
    }
}

/// Check `0 <= b1 <= b2` and `meas E > 0`, and compute the bang-bang readiness flag.
pub fn validate_family(b1: StepFunction, b2: StepFunction) -> Result<AdmissibleFamily> {
    let (lower, upper) = refine_breakpoints(&b1, &b2)?;
    if !lower.is_nonnegative() {
        return Err(Error::InvalidStepFunction("b1 must be nonnegative".into()));
    }
    let bad: Vec<usize> = lower
        .values()
        .iter()
        .zip(upper.values())
        .enumerate()
        .filter(|(_, (l, u))| l > u)
        .map(|(k, _)| k)
        .collect();
    if !bad.is_empty() {
        return Err(Error::ConstraintOrderViolation { pieces: bad });
    }
    let mut any_free = false;
    let mut ready = true;
    for (l, u) in lower.values().iter().zip(upper.values()) {
        if l < u {
            any_free = true;
            if *l <= 0.0 {
                ready = false;
            }
        }
    }
    if !any_free {
        return Err(Error::EmptyE);
    }
    Ok(AdmissibleFamily { lower, upper, bangbang_ready: ready })
}

/// Solution value and derivative at a position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveState {
    pub x: f64,
    pub y: Complex64,
    pub dy: Complex64,
}

impl WaveState {
    pub fn new(x: f64, y: Complex64, dy: Complex64) -> Self {
        Self { x, y, dy }
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self { x: self.x, y: self.y * c, dy: self.dy * c }
    }

    pub fn is_trivial(&self) -> bool {
        self.y == Complex64::new(0.0, 0.0) && self.dy == Complex64::new(0.0, 0.0)
    }
}

/// Axis-aligned rectangle in the complex plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Rect {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Self {
        Self { re_min, re_max, im_min, im_max }
    }

    /// Square of half-width `r` centred at `c`.
    pub fn around(c: Complex64, r: f64) -> Self {
        Self::new(c.re - r, c.re + r, c.im - r, c.im + r)
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re >= self.re_min && z.re <= self.re_max && z.im >= self.im_min && z.im <= self.im_max
    }

    pub fn width(&self) -> f64 {
        self.re_max - self.re_min
    }

    pub fn height(&self) -> f64 {
        self.im_max - self.im_min
    }

    /// Symmetric with respect to the imaginary axis.
    pub fn is_imaginary_symmetric(&self) -> bool {
        self.re_min == -self.re_max
    }
}
