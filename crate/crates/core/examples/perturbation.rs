//! First-order motion of a resonance under a small change of the structure.

use cavity_qopt::linear::{homogeneous_resonance, newton_polish};
use cavity_qopt::model::{BoundaryParams, Interval, Nu2, ResonatorConfig, StepFunction};
use cavity_qopt::perturbation::{perturbation_sweep, splitting_k, Direction};

fn main() -> cavity_qopt::Result<()> {
    let cfg = ResonatorConfig::new(Interval::new(0.0, 1.0)?, BoundaryParams::new(1.0, Nu2::Finite(3.0))?);
    let b = StepFunction::constant(cfg.interval, 4.0)?;
    let (omega, _) = newton_polish(&b, &cfg, homogeneous_resonance(4.0, &cfg, 2)?.unwrap(), 1e-14, 40)?;
    let v = Direction::new(StepFunction::indicator(cfg.interval, 0.2, 0.5, 1.0)?);
    let pred = splitting_k(&b, omega, &v, &cfg, 1e-10)?;
    println!("omega = {omega:.12}, K = {:.8}, multiplicity {}", pred.k, pred.multiplicity);
    let zetas: Vec<f64> = (0..7).map(|k| 10f64.powf(-5.0 + 0.5 * k as f64)).collect();
    println!("{:>10} {:>12}", "zeta", "error");
    for row in perturbation_sweep(&b, omega, &v, &zetas, &cfg, 1e-12)? {
        println!("{:>10.2e} {:>12.3e}", row.zeta, row.error);
    }
    Ok(())
}
