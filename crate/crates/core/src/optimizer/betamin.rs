//! Minimal decay rate `β_min(α)` and Pareto frontiers.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::refine::{refine_nl_root, NlRoot, RefineMode, RefineOptions};
use super::{xi_profile, XiProfile};
use crate::bangbang::{nl_eigenpair, recover_structure, SolverOptions};
use crate::error::{Error, Result};
use crate::model::{AdmissibleFamily, ResonatorConfig, StepFunction};

/// Parameters of the upward sweep in `β`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaSearch {
    pub beta_lo: f64,
    pub beta_max: f64,
    pub coarse_steps: usize,
    pub n_xi: usize,
    /// Subdivisions of a coarse cell that may hold a root.
    pub fine_steps: usize,
    /// Largest factor by which the phase grid is densified when a cell resists refinement.
    pub max_xi_densify: usize,
}

impl Default for BetaSearch {
    fn default() -> Self {
        Self { beta_lo: 1e-5, beta_max: 0.03, coarse_steps: 300, n_xi: 360, fine_steps: 64, max_xi_densify: 1000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParetoPoint {
    pub alpha: f64,
    pub beta_min: f64,
    pub xi: f64,
    pub residual: f64,
    /// Recovered optimal structure on the resonator.
    pub structure: StepFunction,
}

impl ParetoPoint {
    pub fn omega(&self) -> Complex64 {
        Complex64::new(self.alpha, -self.beta_min)
    }

    pub fn switch_points(&self) -> Vec<f64> {
        let bp = self.structure.breakpoints();
        bp[1..bp.len() - 1].to_vec()
    }

    pub fn n_layers(&self) -> usize {
        self.structure.n_pieces()
    }
}

struct Searcher<'a> {
    fam: &'a AdmissibleFamily,
    cfg: &'a ResonatorConfig,
    search: &'a BetaSearch,
    solver: &'a SolverOptions,
    refine: &'a RefineOptions,
    alpha: f64,
}

impl Searcher<'_> {
    fn profiles(&self, betas: &[f64], n_xi: usize) -> Result<Vec<XiProfile>> {
        betas
            .par_iter()
            .map(|b| xi_profile(self.fam, Complex64::new(self.alpha, -b), self.cfg, n_xi, self.solver))
            .collect()
    }

    /// Indices `(i, j)` of grid cells that may contain a root: winding changes and local minima.
    fn candidate_cells(p: &[XiProfile]) -> Vec<(usize, usize)> {
        let mut cells = Vec::new();
        for k in 0..p.len().saturating_sub(1) {
            if let (Some(a), Some(b)) = (p[k].winding, p[k + 1].winding) {
                if a != b {
                    cells.push((k, k + 1));
                }
            }
            if k > 0 && p[k].min < p[k - 1].min && p[k].min <= p[k + 1].min {
                cells.push((k - 1, k + 1));
            }
        }
        if p.len() >= 2 && p[0].min < p[1].min {
            cells.push((0, 1));
        }
        cells.sort();
        cells.dedup();
        cells
    }

    /// The phase minimum is Lipschitz in `β`: a zero in the cell needs a sample
    /// within a few sample-to-sample variations of zero.
    fn may_vanish(p: &[XiProfile]) -> bool {
        let lowest = p.iter().map(|q| q.min).fold(f64::INFINITY, f64::min);
        let step = p.windows(2).map(|w| (w[1].min - w[0].min).abs()).fold(0.0, f64::max);
        lowest <= 4.0 * step
    }

    fn newton(&self, xi: f64, beta: f64) -> Option<NlRoot> {
        let z = Complex64::new(self.alpha, -beta);
        refine_nl_root(self.fam, xi, z, RefineMode::FixAlpha, self.cfg, self.solver, self.refine)
            .ok()
            .filter(|r| -r.z.im > 0.0 && -r.z.im <= self.search.beta_max * 1.5)
    }

    /// Smallest root found from seeds inside `[a, b]`.
    fn resolve_cell(&self, a: f64, b: f64, seed_xi: f64) -> Result<Option<NlRoot>> {
        let mut n_xi = self.search.n_xi;
        let m = self.search.fine_steps.max(2);
        let betas: Vec<f64> = (0..=m).map(|j| a + (b - a) * j as f64 / m as f64).collect();
        loop {
            let p = self.profiles(&betas, n_xi)?;
            let mut seeds: Vec<(f64, f64)> = Self::candidate_cells(&p)
                .into_iter()
                .map(|(i, j)| {
                    let k = if p[i].min <= p[j].min { i } else { j };
                    let k = if j == i + 2 && p[i + 1].min < p[k].min { i + 1 } else { k };
                    (betas[k], p[k].argmin)
                })
                .collect();
            let kbest = (0..p.len()).min_by(|x, y| p[*x].min.total_cmp(&p[*y].min)).unwrap_or(0);
            seeds.push((betas[kbest], p[kbest].argmin));
            seeds.push((0.5 * (a + b), seed_xi));
            seeds.sort_by(|x, y| x.0.total_cmp(&y.0));
            let mut best: Option<NlRoot> = None;
            for (beta, xi) in seeds {
                if let Some(r) = self.newton(xi, beta) {
                    if best.is_none_or(|q| -r.z.im < -q.z.im) {
                        best = Some(r);
                    }
                }
            }
            if best.is_some() || n_xi >= self.search.n_xi * self.search.max_xi_densify || !Self::may_vanish(&p) {
                return Ok(best);
            }
            n_xi *= 10;
        }
    }

    /// Smallest root with `β` in `[lo, hi]`.
    fn sweep(&self, lo: f64, hi: f64, steps: usize) -> Result<Option<NlRoot>> {
        let steps = steps.max(2);
        let betas: Vec<f64> = (0..=steps).map(|k| lo + (hi - lo) * k as f64 / steps as f64).collect();
        let p = self.profiles(&betas, self.search.n_xi)?;
        let mut best: Option<NlRoot> = None;
        for (i, j) in Self::candidate_cells(&p) {
            if let Some(q) = best {
                if betas[i] > -q.z.im {
                    break;
                }
            }
            let seed = if p[i].min <= p[j].min { p[i].argmin } else { p[j].argmin };
            if let Some(r) = self.resolve_cell(betas[i], betas[j], seed)? {
                if best.is_none_or(|q| -r.z.im < -q.z.im) {
                    best = Some(r);
                }
            }
        }
        Ok(best)
    }

    fn finish(&self, root: NlRoot) -> Result<ParetoPoint> {
        let pair = nl_eigenpair(self.fam, root.xi, root.z, self.cfg, self.solver)?;
        let structure = recover_structure(&pair, self.fam, self.cfg, self.refine.tol)?;
        Ok(ParetoPoint { alpha: root.z.re, beta_min: -root.z.im, xi: root.xi, residual: pair.residual, structure })
    }
}

fn mirror(p: ParetoPoint) -> ParetoPoint {
    // i·conj(Θ) solves the same bang-bang equation at -conj(z) with phase π/2 - ξ
    ParetoPoint { alpha: -p.alpha, xi: (0.5 * PI - p.xi).rem_euclid(PI), ..p }
}

/// `β_min(α)`: the smallest `β` with `F_nl(ξ, α - iβ) = 0` for some `ξ`.
pub fn beta_min(
    fam: &AdmissibleFamily,
    alpha: f64,
    cfg: &ResonatorConfig,
    search: &BetaSearch,
    solver: &SolverOptions,
    refine: &RefineOptions,
) -> Result<ParetoPoint> {
    if alpha < 0.0 {
        return beta_min(fam, -alpha, cfg, search, solver, refine).map(mirror);
    }
    let s = Searcher { fam, cfg, search, solver, refine, alpha };
    match s.sweep(search.beta_lo, search.beta_max, search.coarse_steps)? {
        Some(root) => s.finish(root),
        None => Err(Error::NoRootFound { alpha, beta_max: search.beta_max }),
    }
}

/// `β_min` at every `α`; with `warm`, each solve starts from the previous root and
/// only the range below it is swept for smaller roots.
pub fn pareto_sweep(
    fam: &AdmissibleFamily,
    alphas: &[f64],
    cfg: &ResonatorConfig,
    search: &BetaSearch,
    solver: &SolverOptions,
    refine: &RefineOptions,
    warm: bool,
) -> Vec<(f64, Result<ParetoPoint>)> {
    let mut out = Vec::with_capacity(alphas.len());
    let mut prev: Option<ParetoPoint> = None;
    for &alpha in alphas {
        let res = match (&prev, warm && alpha > 0.0) {
            (Some(p), true) => warm_solve(fam, alpha, cfg, search, solver, refine, p),
            _ => beta_min(fam, alpha, cfg, search, solver, refine),
        };
        if let Ok(p) = &res {
            if p.alpha > 0.0 {
                prev = Some(p.clone());
            }
        }
        out.push((alpha, res));
    }
    out
}

fn warm_solve(
    fam: &AdmissibleFamily,
    alpha: f64,
    cfg: &ResonatorConfig,
    search: &BetaSearch,
    solver: &SolverOptions,
    refine: &RefineOptions,
    prev: &ParetoPoint,
) -> Result<ParetoPoint> {
    let s = Searcher { fam, cfg, search, solver, refine, alpha };
    let Some(warm) = s.newton(prev.xi, prev.beta_min) else {
        return beta_min(fam, alpha, cfg, search, solver, refine);
    };
    let beta_w = -warm.z.im;
    let cell = (search.beta_max - search.beta_lo) / search.coarse_steps.max(1) as f64;
    let steps = (((beta_w - search.beta_lo) / cell).ceil() as usize).max(2);
    let below = s.sweep(search.beta_lo, beta_w + cell, steps)?;
    let root = match below {
        Some(r) if -r.z.im < beta_w => r,
        _ => warm,
    };
    s.finish(root)
}
