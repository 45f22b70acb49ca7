//! Where the energy flux of a resonant mode changes direction.

use cavity_qopt::linear::{find_resonances, phase_flux, theta_at_x, turning_interval};
use cavity_qopt::model::{BoundaryParams, Interval, Nu2, Rect, ResonatorConfig, StepFunction};

fn main() -> cavity_qopt::Result<()> {
    let cfg = ResonatorConfig::new(Interval::new(-1.0, 0.0)?, BoundaryParams::new(2.0, Nu2::Finite(2.0))?);
    // two dense slabs around an empty gap
    let b = StepFunction::new(vec![-1.0, -0.6, -0.4, 0.0], vec![110.0, 0.0, 110.0])?;
    let found = find_resonances(&b, &cfg, &Rect::new(0.05, 1.0, -0.5, 0.0), (0.005, 0.005), 1e-12)?;
    for r in found.resonances.iter().take(3) {
        let t = turning_interval(&b, r.omega, &cfg, 1e-9)?;
        println!("omega = {:.10}: flux crosses zero on [{:.6}, {:.6}], theta zero {:?}", r.omega, t.x_star, t.x_star_upper, t.zero_of_theta);
        let samples: Vec<String> =
            (0..=10).map(|k| format!("{:+.2e}", phase_flux(&theta_at_x(&b, r.omega, &cfg, -1.0 + 0.1 * k as f64)))).collect();
        println!("  flux: {}", samples.join(" "));
    }
    Ok(())
}
