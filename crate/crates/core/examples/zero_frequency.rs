//! Optimal decay on the imaginary axis, including a tie between both constraints.

use cavity_qopt::linear::char_f;
use cavity_qopt::model::{BoundaryParams, Interval, Nu2, ResonatorConfig, StepFunction};
use cavity_qopt::optimizer::{beta_min_zero, k2};
use num_complex::Complex64;

fn main() -> cavity_qopt::Result<()> {
    let nu = 3f64.sqrt();
    let cfg = ResonatorConfig::new(Interval::new(0.0, 1.0)?, BoundaryParams::new(nu, Nu2::Finite(nu))?);
    let opt = beta_min_zero(1.0, 4.0, &cfg)?;
    println!("K2(1) = {:.15}, K2(4) = {:.15}", k2(1.0, &cfg.boundary), k2(4.0, &cfg.boundary));
    println!("beta_min(0) = {:.15}, optimal constant structures {:?}", opt.beta, opt.optimal);
    for b in &opt.optimal {
        let r = char_f(&StepFunction::constant(cfg.interval, *b)?, Complex64::new(0.0, -opt.beta), &cfg).norm();
        println!("  |F(-i beta; {b})| = {r:.1e}");
    }
    Ok(())
}
