//! Solve the bang-bang equation and read off the switching structure.

use cavity_qopt::bangbang::{f_nl, theta_nl, SolverOptions};
use cavity_qopt::model::{AdmissibleFamily, BoundaryParams, Interval, Nu2, ResonatorConfig};
use num_complex::Complex64;

fn main() -> cavity_qopt::Result<()> {
    let cfg = ResonatorConfig::new(Interval::new(-1.0, 0.0)?, BoundaryParams::new(1.0, Nu2::Infinite)?);
    let fam = AdmissibleFamily::constant(cfg.interval, 90.0, 110.0)?;
    let opts = SolverOptions::default();
    let z = Complex64::new(1.088, -0.00689);
    for xi in [0.3, 1.5662] {
        let (end, trace) = theta_nl(&fam, xi, z, &cfg, &opts)?;
        println!("xi = {xi}: Theta(a2) = {:.6}, {} regions", end.y, trace.regions.len());
        for r in &trace.regions {
            println!("  [{:+.6}, {:+.6}] {:?} b = {}", r.left, r.right, r.choice, r.value);
        }
    }
    // G(xi) = e^{-i xi} F_nl is pi-periodic
    let f0 = f_nl(&fam, 0.4, z, &cfg, &opts)?;
    let f1 = f_nl(&fam, 0.4 + std::f64::consts::PI, z, &cfg, &opts)?;
    println!("F(xi) + F(xi + pi) = {:.1e}", (f0 + f1).norm());
    Ok(())
}
