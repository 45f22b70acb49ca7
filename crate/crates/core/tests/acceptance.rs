//! Acceptance gate: one PASS/FAIL line per criterion.

use std::f64::consts::PI;
use std::path::Path;
use std::time::Instant;

use cavity_qopt::bangbang::{nl_eigenpair, recover_structure, solve_bangbang_ivp, theta_nl_initial, SolverOptions};
use cavity_qopt::linear::{
    char_f, df_dz_at_resonance, find_resonances, homogeneous_params, homogeneous_resonance, newton_polish, phase_flux,
    propagate::propagate_layer, theta_at_x, wronskian_trace, SpectrumBranch,
};
use cavity_qopt::model::{AdmissibleFamily, BoundaryParams, Interval, Nu2, Rect, ResonatorConfig, StepFunction};
use cavity_qopt::optimizer::{
    admissible_thresholds, beta_min, beta_min_zero, classify, cluster_points, Arrangement, BetaSearch, ParetoPoint,
    RefineOptions, ScanPoint,
};
use cavity_qopt::perturbation::{df_db, perturbation_sweep, Direction};
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Outcome = Result<String, String>;

const FRONTIER: [(f64, f64); 12] = [
    (0.14977, 0.009119),
    (0.14983, 0.009120),
    (0.16557, 0.01115),
    (0.44931, 0.00910),
    (0.46050, 0.00846),
    (0.49674, 0.01115),
    (0.74884, 0.00910),
    (0.77200, 0.00766),
    (0.82790, 0.01113),
    (1.04838, 0.00909),
    (1.08800, 0.00689),
    (1.15905, 0.01109),
];

const SWITCHES: [f64; 6] = [-0.86237855, -0.71669445, -0.57371202, -0.43130025, -0.28563822, -0.15697427];
const SWITCH_TOL: [f64; 6] = [0.00000028, 0.00004800, 0.00000900, 0.00007000, 0.00002000, 0.00011200];

const CAVITY_JSON: &str = r#"{"interval":{"a1":-1,"a2":0},"nu1":1,"nu2":"inf","b1":90,"b2":110}"#;

fn reference_cavity() -> (ResonatorConfig, AdmissibleFamily) {
    let cfg = ResonatorConfig::new(Interval::new(-1.0, 0.0).unwrap(), BoundaryParams::new(1.0, Nu2::Infinite).unwrap());
    let fam = AdmissibleFamily::constant(cfg.interval, 90.0, 110.0).unwrap();
    (cfg, fam)
}

fn cli(args: &[&str]) -> i32 {
    let mut argv = vec!["cavity-qopt"];
    argv.extend_from_slice(args);
    cavity_qopt::cli::run(argv)
}

fn csv_rows(path: &Path) -> Vec<Vec<f64>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect()
}

fn frontier_values() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = dir.path().join("cavity.json");
    let list = dir.path().join("alphas.txt");
    let out = dir.path().join("frontier.csv");
    std::fs::write(&config, CAVITY_JSON).unwrap();
    std::fs::write(&list, FRONTIER.iter().map(|(a, _)| format!("{a}\n")).collect::<String>()).unwrap();
    let code = cli(&["betamin", "--config", config.to_str().unwrap(), "--alpha-list", list.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    if code != 0 {
        return Err(format!("betamin exit code {code}"));
    }
    let rows = csv_rows(&out);
    if rows.len() != FRONTIER.len() {
        return Err(format!("{} frontier rows for {} frequencies", rows.len(), FRONTIER.len()));
    }
    let mut worst = 0.0f64;
    for ((a, b), row) in FRONTIER.iter().zip(&rows) {
        let d = (row[1] - b).abs();
        worst = worst.max(d);
        if (row[0] - a).abs() > 1e-12 || d > 2e-5 {
            return Err(format!("alpha={a}: beta_min={:.7} vs {b} (|d|={d:.2e})", row[1]));
        }
    }
    Ok(format!("12/12 within 2e-5, worst |d beta| = {worst:.2e}"))
}

fn optimal_structure() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = dir.path().join("cavity.json");
    let front = dir.path().join("frontier.csv");
    let layers = dir.path().join("layers.csv");
    std::fs::write(&config, CAVITY_JSON).unwrap();
    let c = config.to_str().unwrap();
    if cli(&["betamin", "--config", c, "--alpha", "1.088", "--out", front.to_str().unwrap()]) != 0 {
        return Err("betamin failed".into());
    }
    if cli(&["recover", "--config", c, "--from", front.to_str().unwrap(), "--out", layers.to_str().unwrap()]) != 0 {
        return Err("recover failed".into());
    }
    let rows = csv_rows(&layers);
    if rows.len() != 7 {
        return Err(format!("{} layers, expected 7", rows.len()));
    }
    let mut worst = 0.0f64;
    for (j, x) in SWITCHES.iter().enumerate() {
        let got = rows[j][1];
        let tol = (10.0 * SWITCH_TOL[j]).max(1e-5);
        worst = worst.max((got - x).abs() / tol);
        if (got - x).abs() > tol {
            return Err(format!("x{} = {got:.8} vs {x} (tol {tol:.1e})", j + 1));
        }
    }
    for (k, r) in rows.iter().enumerate() {
        let expect = if k % 2 == 0 { 110.0 } else { 90.0 };
        if r[2] != expect {
            return Err(format!("layer {} has value {}", k + 1, r[2]));
        }
    }
    let widths: Vec<f64> = rows.iter().skip(1).step_by(2).map(|r| r[1] - r[0]).collect();
    if !widths.windows(2).all(|w| w[1] < w[0]) {
        return Err(format!("b1 layer widths not decreasing: {widths:?}"));
    }
    Ok(format!(
        "7 layers, switch points within tolerance (worst {:.2}% of it), b1 widths {:.4} > {:.4} > {:.4}",
        100.0 * worst,
        widths[0],
        widths[1],
        widths[2]
    ))
}

fn random_boundary(rng: &mut StdRng) -> (f64, Nu2) {
    let nu1: f64 = if rng.gen_bool(0.15) { 0.0 } else { rng.gen_range(0.3..3.0) };
    let nu2 = if nu1 > 0.0 && rng.gen_bool(0.4) { Nu2::Infinite } else { Nu2::Finite(nu1.max(0.3) * rng.gen_range(1.3..3.0)) };
    (nu1, nu2)
}

fn homogeneous_oracle() -> Outcome {
    let mut rng = StdRng::seed_from_u64(31);
    let mut counts = [0usize; 4];
    for draw in 0..200 {
        let (nu1, nu2) = random_boundary(&mut rng);
        let len = rng.gen_range(0.5..2.0);
        let cfg = ResonatorConfig::new(Interval::new(0.0, len).unwrap(), BoundaryParams::new(nu1, nu2).unwrap());
        let nu2v = match nu2 {
            Nu2::Finite(v) => Some(v),
            Nu2::Infinite => None,
        };
        let kind = draw % 4;
        let sb = match kind {
            0 if nu1 > 0.0 => nu1 * rng.gen_range(0.2..0.9),
            0 => nu2v.unwrap() * rng.gen_range(1.1..2.0),
            1 => {
                let hi = nu2v.unwrap_or(4.0 * nu1.max(0.5));
                nu1 + (hi - nu1) * rng.gen_range(0.1..0.9)
            }
            2 if nu1 > 0.0 => 0.0,
            2 => nu2v.unwrap() * rng.gen_range(0.2..0.9),
            _ => match nu2v {
                Some(v) if rng.gen_bool(0.5) || nu1 == 0.0 => v,
                _ => nu1,
            },
        };
        let b = sb * sb;
        let params = homogeneous_params(b, &cfg).map_err(|e| format!("draw {draw}: {e}"))?;
        counts[match params.branch {
            SpectrumBranch::IntegerGrid => 0,
            SpectrumBranch::HalfIntegerGrid => 1,
            SpectrumBranch::Massless => 2,
            SpectrumBranch::Empty => 3,
        }] += 1;
        let structure = StepFunction::constant(cfg.interval, b).unwrap();
        let expected: Vec<Complex64> = match params.branch {
            SpectrumBranch::Empty => Vec::new(),
            SpectrumBranch::Massless => vec![homogeneous_resonance(b, &cfg, 0).unwrap().unwrap()],
            _ => (-3..=3).map(|n| homogeneous_resonance(b, &cfg, n).unwrap().unwrap()).collect(),
        };
        let rect = match (params.branch, expected.first()) {
            (SpectrumBranch::Empty, _) => {
                let d = PI / (sb * len);
                Rect::new(-3.0 * d, 3.0 * d, -2.0 / len, -1e-3)
            }
            (SpectrumBranch::Massless, Some(w)) => Rect::new(-1.0, 1.0, 1.5 * w.im, 0.5 * w.im),
            (_, Some(w)) => {
                let d = PI / (sb * len);
                let last = expected.last().unwrap();
                Rect::new(w.re - 0.5 * d, last.re + 0.5 * d, 1.5 * w.im, 0.5 * w.im)
            }
            _ => unreachable!(),
        };
        let grid = (rect.width() / 120.0, rect.height() / 12.0);
        let found = find_resonances(&structure, &cfg, &rect, grid, 1e-12).map_err(|e| format!("draw {draw}: {e}"))?;
        let got: Vec<Complex64> = found.resonances.iter().map(|r| r.omega).collect();
        if got.len() != expected.len() {
            return Err(format!("draw {draw} ({:?}, b={b}, nu1={nu1}, nu2={nu2:?}): {} found, {} expected", params.branch, got.len(), expected.len()));
        }
        for w in &expected {
            let d = got.iter().map(|g| (g - w).norm()).fold(f64::INFINITY, f64::min);
            if d > 1e-9 {
                return Err(format!("draw {draw}: {w} matched only to {d:.2e}"));
            }
        }
    }
    Ok(format!(
        "200 draws agree to 1e-9 (integer grid {}, half-integer grid {}, massless {}, empty {})",
        counts[0], counts[1], counts[2], counts[3]
    ))
}

fn zero_frequency_optimum() -> Outcome {
    let s3 = 3f64.sqrt();
    let cfg = ResonatorConfig::new(Interval::new(0.0, 1.0).unwrap(), BoundaryParams::new(s3, Nu2::Finite(s3)).unwrap());
    let opt = beta_min_zero(1.0, 4.0, &cfg).map_err(|e| e.to_string())?;
    let expect = (7.0 + 4.0 * s3).ln() / 2.0;
    if (opt.beta - expect).abs() > 1e-12 {
        return Err(format!("beta = {} vs {expect}", opt.beta));
    }
    if opt.optimal != vec![1.0, 4.0] {
        return Err(format!("optimal set {:?}", opt.optimal));
    }
    let mut worst = 0.0f64;
    for b in [1.0, 4.0] {
        let r = char_f(&StepFunction::constant(cfg.interval, b).unwrap(), Complex64::new(0.0, -opt.beta), &cfg).norm();
        worst = worst.max(r);
        if r > 1e-10 {
            return Err(format!("|F(-i beta; {b})| = {r:.2e}"));
        }
    }
    Ok(format!("beta = {:.15} (|d| = {:.1e}), both structures optimal, residuals <= {worst:.1e}", opt.beta, (opt.beta - expect).abs()))
}

fn random_structure(rng: &mut StdRng, len: f64) -> StepFunction {
    let n = rng.gen_range(1..=4);
    let mut w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.3..1.0)).collect();
    let s: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x *= len / s);
    let mut bps = vec![0.0];
    for x in &w[..n - 1] {
        bps.push(bps.last().unwrap() + x);
    }
    bps.push(len);
    StepFunction::new(bps, (0..n).map(|_| rng.gen_range(1.0..20.0)).collect()).unwrap()
}

fn random_resonance(rng: &mut StdRng) -> (ResonatorConfig, StepFunction, Complex64) {
    loop {
        let len = rng.gen_range(0.6..1.5);
        let nu1 = rng.gen_range(0.5..3.0);
        let nu2 = if rng.gen_bool(0.3) { Nu2::Infinite } else { Nu2::Finite(nu1 * rng.gen_range(1.0..3.0)) };
        let cfg = ResonatorConfig::new(Interval::new(0.0, len).unwrap(), BoundaryParams::new(nu1, nu2).unwrap());
        let b = random_structure(rng, len);
        let mean = b.integral() / len;
        let n = rng.gen_range(1..4);
        let guess = match homogeneous_resonance(mean, &cfg, n) {
            Ok(Some(w)) => w,
            _ => Complex64::new(PI * n as f64 / (mean.sqrt() * len), -0.1),
        };
        if let Ok((w, r)) = newton_polish(&b, &cfg, guess, 1e-13, 80) {
            if r < 1e-11 && w.re > 0.05 && w.im < 0.0 {
                return (cfg, b, w);
            }
        }
    }
}

fn derivative_identities() -> Outcome {
    let mut rng = StdRng::seed_from_u64(53);
    let (mut worst_z, mut worst_b) = (0.0f64, 0.0f64);
    let mut slopes = Vec::new();
    for k in 0..50 {
        let (cfg, b, w) = random_resonance(&mut rng);
        let h = 1e-5 * (1.0 + w.norm());
        let fd = (char_f(&b, w + h, &cfg) - char_f(&b, w - h, &cfg)) / (2.0 * h);
        let an = df_dz_at_resonance(&b, w, &cfg).map_err(|e| e.to_string())?;
        let rel = (an - fd).norm() / fd.norm();
        worst_z = worst_z.max(rel);
        let v = random_structure(&mut rng, cfg.length()).map_values(|x| x / 10.0 - 1.0);
        let hv = 1e-5;
        let fdb = (char_f(&b.add_scaled(&v, hv).unwrap(), w, &cfg) - char_f(&b.add_scaled(&v, -hv).unwrap(), w, &cfg)) / (2.0 * hv);
        let dir = Direction::new(v);
        let anb = df_db(&b, w, &dir, &cfg, 1e-10).map_err(|e| e.to_string())?;
        let relb = (anb - fdb).norm() / fdb.norm();
        worst_b = worst_b.max(relb);
        if rel > 1e-5 || relb > 1e-5 {
            return Err(format!("triple {k}: dF/dz rel {rel:.1e}, dF/dB rel {relb:.1e}"));
        }
        if k < 10 {
            let zetas: Vec<f64> = (0..7).map(|j| 10f64.powf(-5.0 + 0.5 * j as f64)).collect();
            let rows = perturbation_sweep(&b, w, &dir, &zetas, &cfg, 1e-12).map_err(|e| format!("sweep {k}: {e}"))?;
            let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.zeta.ln(), r.error.ln())).collect();
            let n = pts.len() as f64;
            let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
            let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
            slopes.push(slope);
            if !(1.8..=2.2).contains(&slope) {
                return Err(format!("sweep {k}: remainder slope {slope:.3}"));
            }
        }
    }
    let (lo, hi) = slopes.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), s| (a.min(*s), b.max(*s)));
    Ok(format!("50 triples, worst rel dF/dz {worst_z:.1e}, dF/dB {worst_b:.1e}; remainder slopes in [{lo:.3}, {hi:.3}]"))
}

fn structural_invariants() -> Outcome {
    let mut rng = StdRng::seed_from_u64(71);
    // spectra: lower half-plane and mirror symmetric
    let mut n_roots = 0;
    for k in 0..10 {
        let len = rng.gen_range(0.6..1.5);
        let (nu1, nu2) = random_boundary(&mut rng);
        let cfg = ResonatorConfig::new(Interval::new(0.0, len).unwrap(), BoundaryParams::new(nu1, nu2).unwrap());
        let b = random_structure(&mut rng, len);
        let rect = Rect::new(-4.0, 4.0, -1.5, 1.0);
        let found = find_resonances(&b, &cfg, &rect, (0.02, 0.02), 1e-12).map_err(|e| e.to_string())?;
        let roots: Vec<Complex64> = found.resonances.iter().map(|r| r.omega).collect();
        for w in &roots {
            if !(w.im < 0.0) {
                return Err(format!("structure {k}: resonance {w} not in the lower half-plane"));
            }
            let m = -w.conj();
            if rect.contains(m) && !roots.iter().any(|g| (g - m).norm() < 1e-8) {
                return Err(format!("structure {k}: mirror of {w} missing"));
            }
        }
        n_roots += roots.len();
        for z in [Complex64::new(1.3, -0.2), Complex64::new(-0.4, 0.7), Complex64::new(5.0, -1.0)] {
            for wr in wronskian_trace(&b, z) {
                if (wr - 1.0).norm() > 1e-10 {
                    return Err(format!("structure {k}: Wronskian {wr} at z = {z}"));
                }
            }
        }
    }
    // flux monotonicity along the resonator
    for k in 0..10 {
        let (cfg, b, w) = random_resonance(&mut rng);
        let xs: Vec<f64> = (0..=400).map(|j| cfg.length() * j as f64 / 400.0).collect();
        let flux: Vec<f64> = xs.iter().map(|&x| phase_flux(&theta_at_x(&b, w, &cfg, x))).collect();
        let scale = flux.iter().fold(0.0f64, |m, f| m.max(f.abs()));
        if flux.windows(2).any(|p| p[1] < p[0] - 1e-10 * scale) {
            return Err(format!("resonance {k}: Im(conj(theta) theta') not monotone"));
        }
    }
    // bang-bang traces: sign consistency, determinism, recovered structures
    let (cfg, fam) = reference_cavity();
    let dense = SolverOptions { samples_per_piece: 97, ..SolverOptions::default() };
    let search = BetaSearch::default();
    let refine = RefineOptions::default();
    let mut recovered = 0;
    for &(alpha, _) in [FRONTIER[4], FRONTIER[7], FRONTIER[10]].iter() {
        let p: ParetoPoint = beta_min(&fam, alpha, &cfg, &search, &SolverOptions::default(), &refine).map_err(|e| e.to_string())?;
        let z = p.omega();
        let init = theta_nl_initial(p.xi, z, &cfg);
        let a = solve_bangbang_ivp(&fam, z, init, &cfg, &SolverOptions::default()).map_err(|e| e.to_string())?;
        let b = solve_bangbang_ivp(&fam, z, init, &cfg, &dense).map_err(|e| e.to_string())?;
        let (ea, eb) = (a.final_state().unwrap(), b.final_state().unwrap());
        if (ea.y - eb.y).norm() > 1e-9 || (ea.dy - eb.dy).norm() > 1e-9 * (1.0 + ea.dy.norm()) {
            return Err(format!("alpha={alpha}: densities disagree by {:.1e}", (ea.y - eb.y).norm()));
        }
        for (region, &start) in a.regions.iter().zip(&a.states) {
            for j in 1..20 {
                let dx = (region.right - region.left) * j as f64 / 20.0;
                let s = propagate_layer(start, region.value, dx, z);
                let g = (s.y * s.y).im;
                let scale = s.y.norm_sqr();
                if region.free && g.abs() > 1e-9 * scale && !region.choice.admits(g) {
                    return Err(format!("alpha={alpha}: Im y^2 = {g:.2e} disagrees with {:?}", region.choice));
                }
            }
        }
        let pair = nl_eigenpair(&fam, p.xi, z, &cfg, &SolverOptions::default()).map_err(|e| e.to_string())?;
        let structure = recover_structure(&pair, &fam, &cfg, 1e-10).map_err(|e| e.to_string())?;
        let res = char_f(&structure, z, &cfg).norm();
        if !fam.is_extreme_point(&structure) || res > 1e-9 {
            return Err(format!("alpha={alpha}: extreme {} residual {res:.1e}", fam.is_extreme_point(&structure)));
        }
        recovered += 1;
    }
    Ok(format!(
        "{n_roots} resonances symmetric in the lower half-plane, Wronskian = 1, flux monotone on 10 resonances, {recovered} bang-bang traces consistent and deterministic, round-trips <= 1e-9"
    ))
}

fn nonlinear_clouds() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = dir.path().join("cavity.json");
    let out = dir.path().join("scan.csv");
    std::fs::write(&config, CAVITY_JSON).unwrap();
    let (hr, hi) = (2e-3, 1e-4);
    let code = cli(&[
        "nlscan", "--config", config.to_str().unwrap(), "--rect", "0", "1.2", "-0.015", "0", "--grid", "2e-3", "1e-4",
        "--xi-steps", "360", "--eps", "5e-5", "--out", out.to_str().unwrap(),
    ]);
    if code != 0 {
        return Err(format!("nlscan exit code {code}"));
    }
    let points: Vec<ScanPoint> = csv_rows(&out)
        .into_iter()
        .map(|r| ScanPoint { z: Complex64::new(r[0], r[1]), value: r[2], best_xi: r[3], winding: None })
        .collect();
    let clusters = cluster_points(&points, hr, hi, 1);
    if clusters.len() != 4 {
        return Err(format!("{} clusters, expected 4", clusters.len()));
    }
    let mut minima = Vec::new();
    for (k, c) in clusters.iter().enumerate() {
        let (lo, up) = c.alpha_hull(hr);
        for (a, _) in &FRONTIER[3 * k..3 * k + 3] {
            if !(lo <= *a && *a <= up) {
                return Err(format!("cluster {k} spans [{lo:.4}, {up:.4}] without alpha = {a}"));
            }
        }
        minima.push(c.min_beta());
    }
    if !minima.windows(2).all(|w| w[1] < w[0]) {
        return Err(format!("per-cloud minimal beta not decreasing: {minima:?}"));
    }
    let reference = [0.009119, 0.00846, 0.00766, 0.00689];
    for (m, r) in minima.iter().zip(reference) {
        if (m - r).abs() > hi {
            return Err(format!("cloud minimum {m} is more than one lattice step from {r}"));
        }
    }
    Ok(format!(
        "4 clusters ({} points), minimal beta {:.6} > {:.6} > {:.6} > {:.6}",
        points.len(),
        minima[0],
        minima[1],
        minima[2],
        minima[3]
    ))
}

/// Random `(√b1, √b2, ν1, ν2)` in the given arrangement.
fn draw_arrangement(rng: &mut StdRng, a: Arrangement, variant: usize) -> (f64, f64, f64, Option<f64>) {
    use Arrangement::*;
    let u = |rng: &mut StdRng, lo: f64, hi: f64| rng.gen_range(lo..hi);
    let inf = variant % 2 == 0;
    match a {
        Outside if variant % 2 == 0 => {
            let nu1 = u(rng, 2.0, 4.0);
            let s2 = nu1 * u(rng, 0.5, 0.95);
            (s2 * u(rng, 0.4, 0.85), s2, nu1, Some(nu1 * u(rng, 1.0, 2.0)))
        }
        Outside => {
            let nu1 = u(rng, 0.3, 1.0);
            let nu2 = nu1 * u(rng, 1.0, 2.0);
            let s1 = nu2 * u(rng, 1.0, 1.5);
            (s1, s1 * u(rng, 1.2, 2.0), nu1, Some(nu2))
        }
        UpperAtNu1 => {
            let nu1 = u(rng, 1.0, 3.0);
            (nu1 * u(rng, 0.4, 0.85), nu1, nu1, if inf { None } else { Some(nu1 * u(rng, 1.2, 2.0)) })
        }
        Inside => {
            let nu1 = if variant == 1 { 0.0 } else { u(rng, 0.5, 2.0) };
            let s1 = if variant == 2 { nu1 } else { nu1.max(0.3) * u(rng, 1.0, 1.5) };
            let s2 = s1 * u(rng, 1.2, 1.8);
            (s1, s2, nu1, if inf && nu1 > 0.0 { None } else { Some(s2 * u(rng, 1.1, 2.0)) })
        }
        UpperAtNu2 => {
            let nu1 = u(rng, 0.3, 1.5);
            let s1 = nu1 * u(rng, 1.1, 1.5);
            let s2 = s1 * u(rng, 1.2, 1.8);
            (s1, s2, nu1, Some(s2))
        }
        BothAtEnds => {
            let s1 = u(rng, 0.5, 2.0);
            let s2 = s1 * u(rng, 1.2, 1.8);
            (s1, s2, s1, Some(s2))
        }
        MasslessBelowNu1 => {
            let nu1 = u(rng, 1.0, 3.0);
            (0.0, nu1 * if variant == 1 { 1.0 } else { u(rng, 0.3, 0.95) }, nu1, if inf { None } else { Some(nu1 * u(rng, 1.0, 2.0)) })
        }
        StraddleNu2 => {
            let nu1 = if variant == 1 { 0.0 } else { u(rng, 0.3, 1.5) };
            let s1 = if variant == 2 { nu1 } else { nu1.max(0.3) * u(rng, 1.0, 1.4) };
            let nu2 = s1 * u(rng, 1.1, 1.4);
            (s1, nu2 * u(rng, 1.1, 1.4), nu1, Some(nu2))
        }
        StraddleNu1 => {
            let nu1 = u(rng, 0.5, 2.0);
            let s1 = nu1 * u(rng, 0.6, 0.95);
            let s2 = nu1 * u(rng, 1.05, 1.5);
            (s1, s2, nu1, if inf { None } else { Some(s2 * if variant == 1 { 1.0 } else { u(rng, 1.0, 1.5) }) })
        }
        StraddleBoth => {
            let nu1 = u(rng, 0.5, 2.0);
            let nu2 = if variant == 1 { nu1 } else { nu1 * u(rng, 1.0, 1.3) };
            (nu1 * u(rng, 0.6, 0.95), nu2 * u(rng, 1.05, 1.5), nu1, Some(nu2))
        }
        MasslessStraddleNu1 => {
            let nu1 = u(rng, 0.5, 2.0);
            let s2 = nu1 * u(rng, 1.05, 1.8);
            (0.0, s2, nu1, if inf { None } else { Some(s2 * u(rng, 1.0, 1.5)) })
        }
        MasslessStraddleBoth => {
            let nu1 = u(rng, 0.5, 2.0);
            let nu2 = nu1 * u(rng, 1.0, 1.3);
            (0.0, nu2 * u(rng, 1.05, 1.5), nu1, Some(nu2))
        }
    }
}

/// Defining inequalities of each arrangement, with `None` as `ν2 = ∞`.
fn row_holds(a: Arrangement, s1: f64, s2: f64, nu1: f64, nu2: Option<f64>) -> bool {
    use Arrangement::*;
    let n2 = nu2.unwrap_or(f64::INFINITY);
    match a {
        Outside => (0.0 < s1 && s2 < nu1) || (n2 <= s1 && s1 > 0.0),
        UpperAtNu1 => 0.0 < s1 && s2 == nu1,
        Inside => nu1 <= s1 && s2 < n2,
        UpperAtNu2 => nu1 < s1 && s2 == n2,
        BothAtEnds => nu1 == s1 && s2 == n2,
        MasslessBelowNu1 => s1 == 0.0 && s2 <= nu1,
        StraddleNu2 => nu1 <= s1 && s1 < n2 && n2 < s2,
        StraddleNu1 => 0.0 < s1 && s1 < nu1 && nu1 < s2 && s2 <= n2,
        StraddleBoth => 0.0 < s1 && s1 < nu1 && n2 < s2,
        MasslessStraddleNu1 => s1 == 0.0 && nu1 < s2 && s2 <= n2 && nu1 > 0.0,
        MasslessStraddleBoth => s1 == 0.0 && nu1 > 0.0 && n2 < s2,
    }
}

/// A constant `b` in `(b1, b2]` with a homogeneous resonance at frequency `alpha`.
fn homogeneous_witness(alpha: f64, b1: f64, b2: f64, cfg: &ResonatorConfig) -> Option<(f64, Complex64)> {
    let scale = alpha * cfg.length() / PI;
    let (lo, hi) = (b1.sqrt() * scale, b2.sqrt() * scale);
    let mut best: Option<(f64, Complex64)> = None;
    for shift in [0.0, 0.5] {
        let mut m = (lo - shift).floor().max(0.0);
        while m + shift <= hi {
            let sb = (m + shift) / scale;
            if sb > b1.sqrt() && sb <= b2.sqrt() && sb > 0.0 {
                let b = sb * sb;
                if let Ok(Some(w)) = homogeneous_resonance(b, cfg, m as i64) {
                    if (w.re - alpha).abs() < 1e-9 * alpha && best.is_none_or(|(_, q)| w.im > q.im) {
                        best = Some((b, w));
                    }
                }
            }
            m += 1.0;
        }
    }
    best
}

fn admissibility() -> Outcome {
    use Arrangement::*;
    let all = [
        Outside, UpperAtNu1, Inside, UpperAtNu2, BothAtEnds, MasslessBelowNu1, StraddleNu2, StraddleNu1, StraddleBoth,
        MasslessStraddleNu1, MasslessStraddleBoth,
    ];
    // totality over an exhaustive enumeration of orderings
    let levels = [0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0];
    let mut enumerated = 0;
    for (i, &s1) in levels.iter().enumerate() {
        for &s2 in &levels[i + 1..] {
            for &nu1 in &levels {
                for nu2 in levels.iter().map(|&v| Some(v)).chain([None]) {
                    if nu2.is_some_and(|v| v < nu1 || v == 0.0) || (nu1 == 0.0 && nu2.is_none()) {
                        continue;
                    }
                    let cfg = ResonatorConfig::new(
                        Interval::new(0.0, 1.0).unwrap(),
                        BoundaryParams::new(nu1, nu2.map_or(Nu2::Infinite, Nu2::Finite)).unwrap(),
                    );
                    let t = admissible_thresholds(s1 * s1, s2 * s2, &cfg).map_err(|e| e.to_string())?;
                    let rows: Vec<Arrangement> = all.iter().copied().filter(|&a| row_holds(a, s1, s2, nu1, nu2)).collect();
                    if rows != [t.arrangement] {
                        return Err(format!("({s1}, {s2}, {nu1}, {nu2:?}) classified {:?}, rows {rows:?}", t.arrangement));
                    }
                    if !(t.threshold.is_finite() && t.threshold > 0.0) {
                        return Err(format!("({s1}, {s2}, {nu1}, {nu2:?}) gives threshold {}", t.threshold));
                    }
                    enumerated += 1;
                }
            }
        }
    }
    let mut rng = StdRng::seed_from_u64(97);
    let mut searched = 0;
    let mut witnessed = 0;
    let search0 = BetaSearch::default();
    for k in 0..all.len() * 5 {
        let a = all[k % all.len()];
        let variant = k / all.len();
        let (s1, s2, nu1, nu2) = draw_arrangement(&mut rng, a, variant);
        let len = rng.gen_range(0.7..1.3);
        let cfg = ResonatorConfig::new(
            Interval::new(0.0, len).unwrap(),
            BoundaryParams::new(nu1, nu2.map_or(Nu2::Infinite, Nu2::Finite)).unwrap(),
        );
        let (b1, b2) = (s1 * s1, s2 * s2);
        let got = classify(s1, s2, nu1, nu2);
        if got != a {
            return Err(format!("draw {k}: classified {got:?}, drawn as {a:?}"));
        }
        let t = admissible_thresholds(b1, b2, &cfg).map_err(|e| e.to_string())?;
        let alpha = 1.01 * t.threshold;
        let (bw, w) = homogeneous_witness(alpha, b1, b2, &cfg)
            .ok_or_else(|| format!("draw {k} ({a:?}): no homogeneous structure resonates at alpha = {alpha}"))?;
        let fam = AdmissibleFamily::constant(cfg.interval, b1, b2).map_err(|e| e.to_string())?;
        if fam.bangbang_ready() {
            let search = BetaSearch { beta_lo: (-w.im * 1e-3).min(search0.beta_lo), beta_max: -1.2 * w.im, ..search0 };
            let p = beta_min(&fam, alpha, &cfg, &search, &SolverOptions::default(), &RefineOptions::default())
                .map_err(|e| format!("draw {k} ({a:?}, b=({b1:.3},{b2:.3}), nu=({nu1:.3},{nu2:?}), alpha={alpha:.4}): {e}"))?;
            if p.beta_min > -w.im * (1.0 + 1e-6) {
                return Err(format!("draw {k}: beta_min {} above the homogeneous witness {}", p.beta_min, -w.im));
            }
            searched += 1;
        } else {
            let structure = StepFunction::constant(cfg.interval, bw).unwrap();
            let r = 0.1 * w.im.abs();
            let found = find_resonances(&structure, &cfg, &Rect::around(w, r), (r / 8.0, r / 8.0), 1e-12).map_err(|e| e.to_string())?;
            if !found.resonances.iter().any(|q| (q.omega - w).norm() < 1e-9) {
                return Err(format!("draw {k}: witness {w} not confirmed"));
            }
            witnessed += 1;
        }
    }
    Ok(format!(
        "classifier total on {enumerated} orderings; {} draws over 11 arrangements: {searched} beta_min roots found, {witnessed} massless draws witnessed by homogeneous resonances",
        searched + witnessed
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("minimal decay rates", frontier_values),
        ("optimal structure", optimal_structure),
        ("homogeneous spectrum oracle", homogeneous_oracle),
        ("zero-frequency optimum", zero_frequency_optimum),
        ("derivative identities and perturbation order", derivative_identities),
        ("structural invariants", structural_invariants),
        ("nonlinear spectrum clouds", nonlinear_clouds),
        ("admissible frequency thresholds", admissibility),
    ];
    let only: Vec<usize> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|s| s.split(',').filter_map(|x| x.trim().parse().ok()).collect())
        .unwrap_or_default();
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        if !only.is_empty() && !only.contains(&(k + 1)) {
            continue;
        }
        let t = Instant::now();
        let result = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match result {
            Ok(msg) => println!("PASS {}. {name}: {msg} [{secs:.1}s]", k + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL {}. {name}: {msg} [{secs:.1}s]", k + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
