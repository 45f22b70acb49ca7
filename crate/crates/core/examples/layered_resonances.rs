//! Resonances of a layered structure: search, multiplicities and mirror symmetry.

use cavity_qopt::linear::find_resonances;
use cavity_qopt::model::{BoundaryParams, Interval, Nu2, Rect, ResonatorConfig, StepFunction};

fn main() -> cavity_qopt::Result<()> {
    let cfg = ResonatorConfig::new(Interval::new(0.0, 1.0)?, BoundaryParams::new(1.0, Nu2::Finite(2.0))?);
    // quarter-wave stack
    let b = StepFunction::from_layers(0.0, &[(0.25, 4.0), (0.25, 1.0), (0.25, 4.0), (0.25, 1.0)])?;
    let rect = Rect::new(-8.0, 8.0, -2.0, 0.0);
    let out = find_resonances(&b, &cfg, &rect, (0.04, 0.04), 1e-12)?;
    println!("{} resonances (argument principle count: {:?})", out.resonances.len(), out.enclosed);
    for r in &out.resonances {
        println!("{:+.10} {:+.10}i  m = {}  |F| = {:.1e}", r.omega.re, r.omega.im, r.multiplicity, r.residual);
    }
    Ok(())
}
