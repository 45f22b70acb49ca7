//! Minimal decay rate at a few frequencies and the structures attaining it.

use cavity_qopt::bangbang::SolverOptions;
use cavity_qopt::model::{AdmissibleFamily, BoundaryParams, Interval, Nu2, ResonatorConfig};
use cavity_qopt::optimizer::{beta_min, BetaSearch, RefineOptions};

fn main() -> cavity_qopt::Result<()> {
    let cfg = ResonatorConfig::new(Interval::new(-1.0, 0.0)?, BoundaryParams::new(1.0, Nu2::Infinite)?);
    let fam = AdmissibleFamily::constant(cfg.interval, 90.0, 110.0)?;
    for alpha in [0.4605, 0.772, 1.088, -1.088] {
        let p = beta_min(&fam, alpha, &cfg, &BetaSearch::default(), &SolverOptions::default(), &RefineOptions::default())?;
        let x: Vec<String> = p.switch_points().iter().map(|x| format!("{x:.6}")).collect();
        println!("alpha = {alpha:+}: beta_min = {:.7}, {} layers, switches [{}]", p.beta_min, p.n_layers(), x.join(", "));
    }
    Ok(())
}
