//! Command-line front end.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::bangbang::{nl_eigenpair, recover_structure, SolverOptions};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::linear::{char_f, find_resonances, homogeneous_params, homogeneous_resonance, newton_polish, turning_interval, SpectrumBranch};
use crate::model::{Rect, ResonatorConfig, StepFunction};
use crate::optimizer::{
    admissible_thresholds, beta_min, beta_min_zero, cluster_points, k2, pareto_sweep, scan_nl_spectrum, BetaSearch, Detection,
    ParetoPoint, RefineOptions, ScanGrid, ScanPoint, Statistic,
};
use crate::perturbation::{perturbation_sweep, Direction};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const TOL_ENV: &str = "CAVITY_QOPT_TOL";

#[derive(Parser, Debug)]
#[command(name = "cavity-qopt", version, about = "Resonances and minimal-decay structures of layered open cavities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// JSON configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, num_args = 4, allow_negative_numbers = true, value_names = ["R0", "R1", "I0", "I1"])]
    rect: Option<Vec<f64>>,
    #[arg(long, global = true, num_args = 2, value_names = ["HR", "HI"])]
    grid: Option<Vec<f64>>,
    #[arg(long, global = true)]
    xi_steps: Option<usize>,
    #[arg(long, global = true)]
    eps: Option<f64>,
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Output CSV; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    stat: Option<StatArg>,
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Solve every frequency independently.
    #[arg(long, global = true)]
    cold: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum StatArg {
    Min,
    Max,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum DetectArg {
    Sublevel,
    Winding,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Resonances of the structure `B` in a rectangle.
    Spectrum,
    /// Closed-form resonances of a constant structure.
    Homog {
        #[arg(long)]
        b: Option<f64>,
    },
    /// First-order perturbation of a resonance of `B` in the direction `V`.
    Perturb {
        #[arg(long, num_args = 2, allow_negative_numbers = true, value_names = ["RE", "IM"])]
        omega: Vec<f64>,
        /// Comma-separated perturbation sizes.
        #[arg(long, value_delimiter = ',')]
        zeta: Option<Vec<f64>>,
    },
    /// Lattice scan of the nonlinear spectrum.
    Nlscan {
        #[arg(long, value_enum, default_value = "winding")]
        detect: DetectArg,
        /// Also write every lattice value to this file.
        #[arg(long)]
        landscape: Option<PathBuf>,
        /// Lattice gaps bridged when clustering.
        #[arg(long, default_value_t = 1)]
        gap: usize,
    },
    /// Minimal decay rate at one or more frequencies.
    Betamin {
        #[arg(long, allow_negative_numbers = true)]
        alpha: Option<f64>,
        #[arg(long)]
        alpha_list: Option<PathBuf>,
        #[arg(long)]
        beta_max: Option<f64>,
        /// Write the recovered structure of the first frequency here.
        #[arg(long)]
        structure_out: Option<PathBuf>,
    },
    /// Pareto frontier over a list or range of frequencies.
    Pareto {
        #[arg(long)]
        alpha_list: Option<PathBuf>,
        #[arg(long, num_args = 3, value_names = ["A0", "A1", "N"])]
        alpha_range: Option<Vec<f64>>,
        #[arg(long)]
        beta_max: Option<f64>,
    },
    /// Minimal decay at zero frequency for constant constraints.
    Betamin0,
    /// Optimal structure from a frontier row or an explicit eigenpair.
    Recover {
        /// Frontier CSV written by `betamin`; its first row is used.
        #[arg(long)]
        from: Option<PathBuf>,
        #[arg(long, allow_negative_numbers = true)]
        alpha: Option<f64>,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long)]
        xi: Option<f64>,
    },
    /// Guaranteed admissible frequencies for constant constraints.
    Admissible,
    /// Turning interval of a resonance of `B`.
    Turning {
        #[arg(long, num_args = 2, allow_negative_numbers = true, value_names = ["RE", "IM"])]
        omega: Vec<f64>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Homog { .. } => "homog",
            Command::Perturb { .. } => "perturb",
            Command::Nlscan { .. } => "nlscan",
            Command::Betamin { .. } => "betamin",
            Command::Pareto { .. } => "pareto",
            Command::Betamin0 => "betamin0",
            Command::Recover { .. } => "recover",
            Command::Admissible => "admissible",
            Command::Turning { .. } => "turning",
        }
    }
}

/// Record of one invocation, written next to the output.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub version: &'static str,
    pub subcommand: String,
    pub config_sha256: String,
    pub parameters: BTreeMap<String, Value>,
    pub wall_time_s: f64,
    pub outputs: Vec<String>,
    pub partial: bool,
    pub error: Option<String>,
}

/// Render a float so that it parses back to the same value.
pub fn fmt_f(x: f64) -> String {
    format!("{x:.16e}")
}

struct Ctx {
    common: Common,
    config: Option<RunConfig>,
    params: BTreeMap<String, Value>,
    outputs: Vec<String>,
    partial: bool,
}

impl Ctx {
    fn config(&self) -> Result<&RunConfig> {
        self.config.as_ref().ok_or_else(|| Error::Config("this subcommand needs --config".into()))
    }

    fn resonator(&self) -> Result<ResonatorConfig> {
        self.config()?.resonator()
    }

    fn tol(&self) -> Result<f64> {
        if let Some(t) = self.common.tol {
            return Ok(t);
        }
        if let Some(t) = self.config.as_ref().and_then(|c| c.tol) {
            return Ok(t);
        }
        match std::env::var(TOL_ENV) {
            Ok(s) => s.trim().parse().map_err(|_| Error::Config(format!("{TOL_ENV}={s:?} is not a number"))),
            Err(_) => Ok(DEFAULT_TOL),
        }
    }

    fn set(&mut self, key: &str, v: Value) {
        self.params.insert(key.to_string(), v);
    }

    fn rect_or(&self, default: Rect) -> Rect {
        match &self.common.rect {
            Some(r) => Rect::new(r[0], r[1], r[2], r[3]),
            None => default,
        }
    }

    fn write(&mut self, body: &str, path: Option<&Path>) -> Result<()> {
        match path {
            Some(p) => {
                std::fs::write(p, body).map_err(|e| Error::Config(format!("cannot write {}: {e}", p.display())))?;
                self.outputs.push(p.display().to_string());
            }
            None => print!("{body}"),
        }
        Ok(())
    }

    fn write_out(&mut self, body: &str) -> Result<()> {
        let out = self.common.out.clone();
        self.write(body, out.as_deref())
    }
}

/// Two periods of the homogeneous spectrum around the imaginary axis.
fn default_rect(b: f64, cfg: &ResonatorConfig) -> Rect {
    let l = cfg.length();
    let sb = b.sqrt().max(1e-3);
    let depth = homogeneous_resonance(b, cfg, 0).ok().flatten().map_or(1.0, |w| 3.0 * w.im.abs().max(1e-3));
    Rect::new(-2.0 * PI / (l * sb), 2.0 * PI / (l * sb), -depth, 0.0)
}

fn rect_json(r: &Rect) -> Value {
    json!([r.re_min, r.re_max, r.im_min, r.im_max])
}

fn read_alpha_list(p: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(p).map_err(|e| Error::Config(format!("cannot read {}: {e}", p.display())))?;
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty() && !l.starts_with("alpha"))
        .map(|l| {
            let first = l.split(',').next().unwrap_or(l).trim();
            first.parse::<f64>().map_err(|_| Error::Config(format!("bad frequency {first:?} in {}", p.display())))
        })
        .collect()
}

fn frontier_csv(rows: &[(f64, Result<ParetoPoint>)]) -> String {
    let k = rows.iter().filter_map(|(_, r)| r.as_ref().ok()).map(|p| p.switch_points().len()).max().unwrap_or(0);
    let mut s = String::from("alpha,beta_min,xi,n_layers");
    for j in 1..=k {
        let _ = write!(s, ",x{j}");
    }
    s.push('\n');
    for (_, r) in rows {
        if let Ok(p) = r {
            let _ = write!(s, "{},{},{},{}", fmt_f(p.alpha), fmt_f(p.beta_min), fmt_f(p.xi), p.n_layers());
            for x in p.switch_points() {
                let _ = write!(s, ",{}", fmt_f(x));
            }
            s.push('\n');
        }
    }
    s
}

fn structure_csv(b: &StepFunction) -> String {
    let mut s = String::from("left,right,value\n");
    for (l, r, v) in b.pieces() {
        let _ = writeln!(s, "{},{},{}", fmt_f(l), fmt_f(r), fmt_f(v));
    }
    s
}

fn search_params(ctx: &mut Ctx, beta_max: Option<f64>) -> Result<(BetaSearch, RefineOptions)> {
    let mut search = BetaSearch::default();
    if let Some(b) = beta_max {
        search.beta_max = b;
    }
    if let Some(n) = ctx.common.xi_steps {
        search.n_xi = n;
    }
    let refine = RefineOptions { tol: ctx.tol()?, ..RefineOptions::default() };
    ctx.set("beta_lo", json!(search.beta_lo));
    ctx.set("beta_max", json!(search.beta_max));
    ctx.set("coarse_steps", json!(search.coarse_steps));
    ctx.set("xi_steps", json!(search.n_xi));
    ctx.set("tol", json!(refine.tol));
    Ok((search, refine))
}

fn omega_arg(v: &[f64]) -> Result<Complex64> {
    match v {
        [re, im] => Ok(Complex64::new(*re, *im)),
        _ => Err(Error::Config("--omega RE IM is required".into())),
    }
}

fn dispatch(ctx: &mut Ctx, command: &Command) -> Result<()> {
    let solver = SolverOptions::default();
    match command {
        Command::Spectrum => {
            let cfg = ctx.resonator()?;
            let b = ctx.config()?.structure()?;
            let tol = ctx.tol()?;
            let rect = ctx.rect_or(default_rect(b.integral() / cfg.length(), &cfg));
            let grid = ctx.common.grid.clone().map_or((rect.width() / 240.0, rect.height() / 60.0), |g| (g[0], g[1]));
            ctx.set("rect", rect_json(&rect));
            ctx.set("grid", json!([grid.0, grid.1]));
            ctx.set("tol", json!(tol));
            let found = find_resonances(&b, &cfg, &rect, grid, tol)?;
            let mut s = String::from("re,im,multiplicity,residual\n");
            for r in &found.resonances {
                let _ = writeln!(s, "{},{},{},{}", fmt_f(r.omega.re), fmt_f(r.omega.im), r.multiplicity, fmt_f(r.residual));
            }
            ctx.write_out(&s)?;
            if let Some(n) = found.enclosed {
                ctx.partial = n != found.total_multiplicity();
                ctx.set("enclosed", json!(n));
            }
        }
        Command::Homog { b } => {
            let cfg = ctx.resonator()?;
            let b = match b {
                Some(b) => *b,
                None => match ctx.config()?.structure()?.values() {
                    [v] => *v,
                    _ => return Err(Error::Config("homog needs --b or a constant B".into())),
                },
            };
            let rect = ctx.rect_or(default_rect(b, &cfg));
            ctx.set("b", json!(b));
            ctx.set("rect", rect_json(&rect));
            let scale = cfg.length() * b.sqrt() / PI;
            let n0 = (rect.re_min * scale).floor() as i64 - 1;
            let n1 = (rect.re_max * scale).ceil() as i64 + 1;
            let massless = homogeneous_params(b, &cfg)?.branch == SpectrumBranch::Massless;
            let range = if massless { 0..=0 } else { n0..=n1 };
            let structure = StepFunction::constant(cfg.interval, b)?;
            let mut s = String::from("n,re,im,residual\n");
            for n in range {
                if let Some(w) = homogeneous_resonance(b, &cfg, n)? {
                    if rect.contains(w) {
                        let residual = char_f(&structure, w, &cfg).norm();
                        let _ = writeln!(s, "{n},{},{},{}", fmt_f(w.re), fmt_f(w.im), fmt_f(residual));
                    }
                }
            }
            ctx.write_out(&s)?;
        }
        Command::Perturb { omega, zeta } => {
            let cfg = ctx.resonator()?;
            let c = ctx.config()?;
            let (b, v) = (c.structure()?, Direction::new(c.direction()?));
            let tol = ctx.tol()?;
            let (w, _) = newton_polish(&b, &cfg, omega_arg(omega)?, tol, 60)?;
            let zetas = zeta.clone().unwrap_or_else(|| (0..10).map(|k| 10f64.powf(-6.0 + k as f64 / 3.0)).collect());
            ctx.set("omega", json!([w.re, w.im]));
            ctx.set("zeta", json!(zetas));
            ctx.set("tol", json!(tol));
            let rows = perturbation_sweep(&b, w, &v, &zetas, &cfg, tol)?;
            let mut s = String::from("zeta,branch,predicted_re,predicted_im,recomputed_re,recomputed_im,hausdorff_error\n");
            for r in &rows {
                for (k, p) in r.predicted.iter().enumerate() {
                    let q = r.recomputed.get(k).copied().unwrap_or(Complex64::new(f64::NAN, f64::NAN));
                    let _ = writeln!(
                        s,
                        "{},{k},{},{},{},{},{}",
                        fmt_f(r.zeta),
                        fmt_f(p.re),
                        fmt_f(p.im),
                        fmt_f(q.re),
                        fmt_f(q.im),
                        fmt_f(r.error)
                    );
                }
            }
            ctx.write_out(&s)?;
        }
        Command::Nlscan { detect, landscape, gap } => {
            let cfg = ctx.resonator()?;
            let c = ctx.config()?.clone();
            let fam = c.family()?;
            let rect = ctx
                .common
                .rect
                .as_ref()
                .map(|r| Rect::new(r[0], r[1], r[2], r[3]))
                .ok_or_else(|| Error::Config("nlscan needs --rect".into()))?;
            let (hr, hi) = ctx.common.grid.as_ref().map_or((2e-3, 1e-4), |g| (g[0], g[1]));
            let mut grid = ScanGrid::new(rect, hr, hi, ctx.common.xi_steps.unwrap_or(360), ctx.common.eps.unwrap_or(5e-5))?;
            grid.statistic = match ctx.common.stat {
                Some(StatArg::Max) => Statistic::MaxOverXi,
                _ => Statistic::MinOverXi,
            };
            grid.detection = match detect {
                DetectArg::Sublevel => Detection::SubLevel,
                DetectArg::Winding => Detection::Winding,
            };
            grid.landscape = landscape.is_some();
            ctx.set("rect", rect_json(&rect));
            ctx.set("grid", json!([hr, hi]));
            ctx.set("xi_steps", json!(grid.n_xi));
            ctx.set("eps", json!(grid.eps));
            ctx.set("statistic", json!(format!("{:?}", grid.statistic)));
            ctx.set("detection", json!(format!("{:?}", grid.detection)));
            let base = scan_nl_spectrum(&fam, &grid, &cfg, &solver)?;
            let mut points = base.points;
            let mut land = base.landscape.unwrap_or_default();
            for (r, ohr, ohi) in c.overrides() {
                points.retain(|p| !r.contains(p.z));
                land.retain(|p| !r.contains(p.z));
                let sub = scan_nl_spectrum(&fam, &ScanGrid { rect: r, h_re: ohr, h_im: ohi, ..grid }, &cfg, &solver)?;
                points.extend(sub.points);
                land.extend(sub.landscape.unwrap_or_default());
            }
            let order = |a: &ScanPoint, b: &ScanPoint| a.z.re.total_cmp(&b.z.re).then(a.z.im.total_cmp(&b.z.im));
            points.sort_by(order);
            land.sort_by(order);
            let csv = |pts: &[ScanPoint]| {
                let mut s = String::from("re_z,im_z,stat_value,best_xi\n");
                for p in pts {
                    let _ = writeln!(s, "{},{},{},{}", fmt_f(p.z.re), fmt_f(p.z.im), fmt_f(p.value), fmt_f(p.best_xi));
                }
                s
            };
            ctx.write_out(&csv(&points))?;
            if let Some(path) = landscape {
                ctx.write(&csv(&land), Some(path))?;
            }
            let clusters = cluster_points(&points, hr, hi, *gap);
            for (k, cl) in clusters.iter().enumerate() {
                let (lo, hi_a) = cl.alpha_hull(hr);
                eprintln!(
                    "cluster={k} points={} alpha=[{lo:.6},{hi_a:.6}] top={:.6}{:+.6}i min_beta={:.6}",
                    cl.points.len(),
                    cl.top.z.re,
                    cl.top.z.im,
                    cl.min_beta()
                );
            }
            ctx.set("clusters", json!(clusters.len()));
        }
        Command::Betamin { alpha, alpha_list, beta_max, structure_out } => {
            let cfg = ctx.resonator()?;
            let fam = ctx.config()?.family()?;
            let alphas = match (alpha, alpha_list) {
                (Some(a), None) => vec![*a],
                (None, Some(p)) => read_alpha_list(p)?,
                _ => return Err(Error::Config("betamin needs exactly one of --alpha, --alpha-list".into())),
            };
            let (search, refine) = search_params(ctx, *beta_max)?;
            ctx.set("alphas", json!(alphas));
            let rows: Vec<(f64, Result<ParetoPoint>)> =
                alphas.iter().map(|&a| (a, beta_min(&fam, a, &cfg, &search, &solver, &refine))).collect();
            frontier_outputs(ctx, &rows, alpha.is_some())?;
            if let (Some(path), Some((_, Ok(p)))) = (structure_out, rows.first()) {
                ctx.write(&structure_csv(&p.structure), Some(path))?;
            }
            if let Some((_, Err(e))) = rows.iter().find(|(_, r)| r.is_err()) {
                return Err(e.clone());
            }
        }
        Command::Pareto { alpha_list, alpha_range, beta_max } => {
            let cfg = ctx.resonator()?;
            let fam = ctx.config()?.family()?;
            let alphas = match (alpha_list, alpha_range) {
                (Some(p), None) => read_alpha_list(p)?,
                (None, Some(r)) => {
                    let n = r[2].max(1.0) as usize;
                    (0..n).map(|k| if n == 1 { r[0] } else { r[0] + (r[1] - r[0]) * k as f64 / (n - 1) as f64 }).collect()
                }
                _ => return Err(Error::Config("pareto needs exactly one of --alpha-list, --alpha-range".into())),
            };
            let (search, refine) = search_params(ctx, *beta_max)?;
            ctx.set("alphas", json!(alphas));
            ctx.set("warm_start", json!(!ctx.common.cold));
            let rows = pareto_sweep(&fam, &alphas, &cfg, &search, &solver, &refine, !ctx.common.cold);
            frontier_outputs(ctx, &rows, false)?;
            let failed: Vec<String> =
                rows.iter().filter_map(|(a, r)| r.as_ref().err().map(|e| format!("alpha={a}: {e}"))).collect();
            if !failed.is_empty() {
                for f in &failed {
                    eprintln!("{f}");
                }
                ctx.partial = true;
                return Err(rows.into_iter().find_map(|(_, r)| r.err()).expect("a failure"));
            }
        }
        Command::Betamin0 => {
            let cfg = ctx.resonator()?;
            let (b1, b2) = ctx.config()?.constant_bounds()?;
            let opt = beta_min_zero(b1, b2, &cfg)?;
            println!("beta_min={}", opt.beta);
            let mut s = String::from("b,k2,optimal\n");
            for b in [b1, b2] {
                let _ = writeln!(s, "{},{},{}", fmt_f(b), fmt_f(k2(b, &cfg.boundary)), opt.optimal.contains(&b));
            }
            ctx.write_out(&s)?;
        }
        Command::Recover { from, alpha, beta, xi } => {
            let cfg = ctx.resonator()?;
            let fam = ctx.config()?.family()?;
            let tol = ctx.tol()?;
            let (a, b, x) = match (from, alpha, beta, xi) {
                (Some(p), None, None, None) => first_frontier_row(p)?,
                (None, Some(a), Some(b), Some(x)) => (*a, *b, *x),
                _ => return Err(Error::Config("recover needs --from FILE or all of --alpha, --beta, --xi".into())),
            };
            ctx.set("eigenpair", json!([a, b, x]));
            ctx.set("tol", json!(tol));
            let pair = nl_eigenpair(&fam, x, Complex64::new(a, -b), &cfg, &solver)?;
            let structure = recover_structure(&pair, &fam, &cfg, tol)?;
            println!("layers={}", structure.n_pieces());
            ctx.write_out(&structure_csv(&structure))?;
        }
        Command::Admissible => {
            let cfg = ctx.resonator()?;
            let (b1, b2) = ctx.config()?.constant_bounds()?;
            let t = admissible_thresholds(b1, b2, &cfg)?;
            println!(
                "arrangement={:?} threshold={} strict={} general={}",
                t.arrangement, t.threshold, t.strict, t.general
            );
            let s = format!(
                "arrangement,threshold,strict,general\n{:?},{},{},{}\n",
                t.arrangement,
                fmt_f(t.threshold),
                t.strict,
                fmt_f(t.general)
            );
            ctx.write_out(&s)?;
        }
        Command::Turning { omega } => {
            let cfg = ctx.resonator()?;
            let b = ctx.config()?.structure()?;
            let tol = ctx.tol()?;
            let (w, _) = newton_polish(&b, &cfg, omega_arg(omega)?, tol, 60)?;
            ctx.set("omega", json!([w.re, w.im]));
            let t = turning_interval(&b, w, &cfg, tol.max(1e-9))?;
            let zero = t.zero_of_theta.map_or(String::new(), fmt_f);
            let s = format!("x_star,x_star_upper,zero_of_theta\n{},{},{}\n", fmt_f(t.x_star), fmt_f(t.x_star_upper), zero);
            ctx.write_out(&s)?;
        }
    }
    Ok(())
}

fn frontier_outputs(ctx: &mut Ctx, rows: &[(f64, Result<ParetoPoint>)], single: bool) -> Result<()> {
    for (a, r) in rows {
        match r {
            Ok(p) if single => println!("beta_min={}", p.beta_min),
            Ok(p) => println!("alpha={a} beta_min={}", p.beta_min),
            Err(e) => eprintln!("alpha={a}: {e}"),
        }
    }
    ctx.partial |= rows.iter().any(|(_, r)| r.is_err());
    ctx.write_out(&frontier_csv(rows))
}

fn first_frontier_row(p: &Path) -> Result<(f64, f64, f64)> {
    let text = std::fs::read_to_string(p).map_err(|e| Error::Config(format!("cannot read {}: {e}", p.display())))?;
    let row = text
        .lines()
        .find(|l| !l.starts_with("alpha") && !l.trim().is_empty())
        .ok_or_else(|| Error::Config(format!("{} has no frontier rows", p.display())))?;
    let f: Vec<f64> = row.split(',').take(3).map(|s| s.trim().parse()).collect::<std::result::Result<_, _>>().map_err(|_| {
        Error::Config(format!("bad frontier row in {}", p.display()))
    })?;
    match f[..] {
        [a, b, x] => Ok((a, b, x)),
        _ => Err(Error::Config(format!("bad frontier row in {}", p.display()))),
    }
}

fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

/// Run the command line and return the process exit code.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let start = Instant::now();
    let (config, hash) = match &cli.common.config {
        Some(p) => match std::fs::read(p) {
            Ok(bytes) => {
                let hash = hex::encode(Sha256::digest(&bytes));
                match RunConfig::from_json(&String::from_utf8_lossy(&bytes)) {
                    Ok(c) => (Some(c), hash),
                    Err(e) => {
                        eprintln!("error: {}: {e}", p.display());
                        return 2;
                    }
                }
            }
            Err(e) => {
                eprintln!("error: cannot read {}: {e}", p.display());
                return 2;
            }
        },
        None => (None, hex::encode(Sha256::digest(b""))),
    };
    if let Some(k) = cli.common.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k).build_global() {
            eprintln!("warning: thread pool already configured: {e}");
        }
    }
    let mut ctx = Ctx { common: cli.common.clone(), config, params: BTreeMap::new(), outputs: Vec::new(), partial: false };
    let result = dispatch(&mut ctx, &cli.command);
    let code = match &result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_numerical() {
                3
            } else {
                2
            }
        }
    };
    let manifest = RunManifest {
        version: env!("CARGO_PKG_VERSION"),
        subcommand: cli.command.name().to_string(),
        config_sha256: hash,
        parameters: ctx.params,
        wall_time_s: start.elapsed().as_secs_f64(),
        outputs: ctx.outputs,
        partial: ctx.partial || result.is_err(),
        error: result.err().map(|e| e.to_string()),
    };
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    match &cli.common.out {
        Some(out) => {
            let path = manifest_path(out);
            if let Err(e) = std::fs::write(&path, text) {
                eprintln!("warning: cannot write {}: {e}", path.display());
            }
        }
        None => eprintln!("{text}"),
    }
    code
}
