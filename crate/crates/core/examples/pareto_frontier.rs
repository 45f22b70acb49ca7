//! Warm-started frontier of minimal decay rates across one cloud.

use cavity_qopt::bangbang::SolverOptions;
use cavity_qopt::model::{AdmissibleFamily, BoundaryParams, Interval, Nu2, ResonatorConfig};
use cavity_qopt::optimizer::{pareto_sweep, BetaSearch, RefineOptions};

fn main() -> cavity_qopt::Result<()> {
    let cfg = ResonatorConfig::new(Interval::new(-1.0, 0.0)?, BoundaryParams::new(1.0, Nu2::Infinite)?);
    let fam = AdmissibleFamily::constant(cfg.interval, 90.0, 110.0)?;
    let alphas: Vec<f64> = (0..12).map(|k| 1.05 + 0.01 * k as f64).collect();
    let rows = pareto_sweep(&fam, &alphas, &cfg, &BetaSearch::default(), &SolverOptions::default(), &RefineOptions::default(), true);
    println!("{:>8} {:>10} {:>7}", "alpha", "beta_min", "layers");
    for (alpha, r) in rows {
        match r {
            Ok(p) => println!("{alpha:>8.3} {:>10.7} {:>7}", p.beta_min, p.n_layers()),
            Err(e) => println!("{alpha:>8.3} {e}"),
        }
    }
    Ok(())
}
