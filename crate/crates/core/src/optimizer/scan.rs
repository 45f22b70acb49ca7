//! Lattice scan of the nonlinear spectrum and clustering of the detected points.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::{xi_profile, XiProfile};
use crate::bangbang::SolverOptions;
use crate::error::{Error, Result};
use crate::model::{AdmissibleFamily, Rect, ResonatorConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Statistic {
    #[default]
    MinOverXi,
    MaxOverXi,
}

impl Statistic {
    fn of(self, p: &XiProfile) -> f64 {
        match self {
            Statistic::MinOverXi => p.min,
            Statistic::MaxOverXi => p.max,
        }
    }
}

/// How lattice points are selected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Detection {
    /// Points whose statistic is at most `eps`.
    SubLevel,
    /// Sub-level points plus points next to a change of the phase winding number,
    /// points with nonzero winding, and the same tests on subdivided cells around
    /// each column minimum.
    #[default]
    Winding,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanGrid {
    pub rect: Rect,
    pub h_re: f64,
    pub h_im: f64,
    /// Phase grid `{nπ/N : 1 <= n <= N}`.
    pub n_xi: usize,
    pub eps: f64,
    pub statistic: Statistic,
    pub detection: Detection,
    /// Interior samples placed between the neighbours of a column minimum.
    pub subcells: usize,
    /// Keep every lattice value in the result.
    pub landscape: bool,
}

impl ScanGrid {
    pub fn new(rect: Rect, h_re: f64, h_im: f64, n_xi: usize, eps: f64) -> Result<Self> {
        if !(h_re > 0.0 && h_im > 0.0) || n_xi == 0 || !(eps > 0.0) {
            return Err(Error::Config(format!("bad scan grid: h = ({h_re}, {h_im}), N = {n_xi}, eps = {eps}")));
        }
        Ok(Self {
            rect,
            h_re,
            h_im,
            n_xi,
            eps,
            statistic: Statistic::default(),
            detection: Detection::default(),
            subcells: 16,
            landscape: false,
        })
    }

    fn axis(lo: f64, hi: f64, h: f64) -> Vec<f64> {
        let mut v = Vec::new();
        let mut k = 1usize;
        loop {
            let x = lo + k as f64 * h;
            if x >= hi - 1e-9 * h {
                break;
            }
            v.push(x);
            k += 1;
        }
        v
    }

    pub fn re_axis(&self) -> Vec<f64> {
        Self::axis(self.rect.re_min, self.rect.re_max, self.h_re)
    }

    /// Imaginary parts below the real axis.
    pub fn im_axis(&self) -> Vec<f64> {
        Self::axis(self.rect.im_min, self.rect.im_max.min(0.0), self.h_im)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanPoint {
    pub z: Complex64,
    pub value: f64,
    pub best_xi: f64,
    pub winding: Option<i64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    /// Detected points, sorted by `(Re z, Im z)`; may include off-lattice points from cell subdivision.
    pub points: Vec<ScanPoint>,
    pub statistic: Statistic,
    pub landscape: Option<Vec<ScanPoint>>,
}

/// Profile at `z`, using the mirror `-conj(z)` on the left half of the lower half-plane.
fn profile_at(fam: &AdmissibleFamily, z: Complex64, cfg: &ResonatorConfig, n_xi: usize, solver: &SolverOptions) -> Result<XiProfile> {
    if z.re >= 0.0 {
        return xi_profile(fam, z, cfg, n_xi, solver);
    }
    let p = xi_profile(fam, -z.conj(), cfg, n_xi, solver)?;
    Ok(XiProfile { argmin: (0.5 * PI - p.argmin).rem_euclid(PI), ..p })
}

fn point(z: Complex64, p: &XiProfile, stat: Statistic) -> ScanPoint {
    ScanPoint { z, value: stat.of(p), best_xi: p.argmin, winding: p.winding }
}

fn differs(a: Option<i64>, b: Option<i64>) -> bool {
    matches!((a, b), (Some(x), Some(y)) if x != y)
}

/// Evaluate the statistic on the lattice and collect the detected points.
pub fn scan_nl_spectrum(fam: &AdmissibleFamily, grid: &ScanGrid, cfg: &ResonatorConfig, solver: &SolverOptions) -> Result<ScanResult> {
    if !fam.bangbang_ready() {
        return Err(Error::NotBangbangReady);
    }
    let res = grid.re_axis();
    let ims = grid.im_axis();
    let (nr, ni) = (res.len(), ims.len());
    let profiles: Vec<XiProfile> = (0..nr * ni)
        .into_par_iter()
        .map(|k| profile_at(fam, Complex64::new(res[k / ni], ims[k % ni]), cfg, grid.n_xi, solver))
        .collect::<Result<_>>()?;
    let at = |c: usize, r: usize| &profiles[c * ni + r];
    let stat = grid.statistic;
    let winding = grid.detection == Detection::Winding;

    let mut points = Vec::new();
    for c in 0..nr {
        for r in 0..ni {
            let p = at(c, r);
            let mut hit = stat.of(p) <= grid.eps;
            if winding && !hit {
                let nb = [(c.wrapping_sub(1), r), (c + 1, r), (c, r.wrapping_sub(1)), (c, r + 1)];
                hit = p.winding.is_some_and(|w| w != 0)
                    || nb.iter().any(|&(a, b)| a < nr && b < ni && differs(p.winding, at(a, b).winding));
            }
            if hit {
                points.push(point(Complex64::new(res[c], ims[r]), p, stat));
            }
        }
    }

    if winding && grid.subcells > 0 && ni >= 3 {
        // cells around each local minimum of the column profile
        let cells: Vec<(usize, usize)> = (0..nr)
            .flat_map(|c| {
                (1..ni - 1)
                    .filter(move |&r| at(c, r).min <= at(c, r - 1).min && at(c, r).min <= at(c, r + 1).min)
                    .map(move |r| (c, r))
            })
            .collect();
        let m = grid.subcells;
        let extra: Vec<Vec<ScanPoint>> = cells
            .par_iter()
            .map(|&(c, r)| -> Result<Vec<ScanPoint>> {
                let (lo, hi) = (ims[r - 1], ims[r + 1]);
                let mut sub = Vec::with_capacity(m + 2);
                sub.push(point(Complex64::new(res[c], lo), at(c, r - 1), stat));
                for j in 1..=m {
                    let im = lo + (hi - lo) * j as f64 / (m + 1) as f64;
                    let z = Complex64::new(res[c], im);
                    sub.push(point(z, &profile_at(fam, z, cfg, grid.n_xi, solver)?, stat));
                }
                sub.push(point(Complex64::new(res[c], hi), at(c, r + 1), stat));
                Ok((1..=m)
                    .filter(|&j| {
                        let s = &sub[j];
                        s.value <= grid.eps
                            || s.winding.is_some_and(|w| w != 0)
                            || differs(s.winding, sub[j - 1].winding)
                            || differs(s.winding, sub[j + 1].winding)
                    })
                    .map(|j| sub[j])
                    .collect())
            })
            .collect::<Result<_>>()?;
        points.extend(extra.into_iter().flatten());
    }

    points.sort_by(|a, b| a.z.re.total_cmp(&b.z.re).then(a.z.im.total_cmp(&b.z.im)));
    points.dedup_by(|a, b| a.z == b.z);
    let landscape = grid.landscape.then(|| {
        (0..nr * ni).map(|k| point(Complex64::new(res[k / ni], ims[k % ni]), &profiles[k], stat)).collect()
    });
    Ok(ScanResult { points, statistic: stat, landscape })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    pub points: Vec<ScanPoint>,
    pub re_min: f64,
    pub re_max: f64,
    /// Point of smallest `-Im z`.
    pub top: ScanPoint,
}

impl Cluster {
    pub fn min_beta(&self) -> f64 {
        -self.top.z.im
    }

    /// Real projection at lattice resolution `h_re`: every column that is unresolved
    /// by the lattice on either side of the cluster is included.
    pub fn alpha_hull(&self, h_re: f64) -> (f64, f64) {
        (self.re_min - h_re, self.re_max + h_re)
    }
}

/// Single-linkage clusters; points within `(gap + 1)` lattice steps in both directions are linked.
pub fn cluster_points(points: &[ScanPoint], h_re: f64, h_im: f64, gap: usize) -> Vec<Cluster> {
    let n = points.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| points[a].z.re.total_cmp(&points[b].z.re));
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    let reach_re = (gap + 1) as f64 * h_re * (1.0 + 1e-9);
    let reach_im = (gap + 1) as f64 * h_im * (1.0 + 1e-9);
    for (a, &i) in order.iter().enumerate() {
        for &j in &order[a + 1..] {
            if points[j].z.re - points[i].z.re > reach_re {
                break;
            }
            if (points[j].z.im - points[i].z.im).abs() <= reach_im {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<ScanPoint>> = Default::default();
    for i in 0..n {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(points[i]);
    }
    let mut out: Vec<Cluster> = groups
        .into_values()
        .map(|pts| {
            let re_min = pts.iter().map(|p| p.z.re).fold(f64::INFINITY, f64::min);
            let re_max = pts.iter().map(|p| p.z.re).fold(f64::NEG_INFINITY, f64::max);
            let top = *pts.iter().max_by(|a, b| a.z.im.total_cmp(&b.z.im)).unwrap();
            Cluster { points: pts, re_min, re_max, top }
        })
        .collect();
    out.sort_by(|a, b| a.re_min.total_cmp(&b.re_min));
    out
}
