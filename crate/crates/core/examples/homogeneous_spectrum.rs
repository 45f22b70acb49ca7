//! Closed-form resonances of a constant structure, checked against a numerical search.

use cavity_qopt::linear::{find_resonances, homogeneous_params, homogeneous_spectrum};
use cavity_qopt::model::{BoundaryParams, Interval, Nu2, Rect, ResonatorConfig, StepFunction};

fn main() -> cavity_qopt::Result<()> {
    let cfg = ResonatorConfig::new(Interval::new(-1.0, 0.0)?, BoundaryParams::new(1.0, Nu2::Infinite)?);
    for b in [0.25, 110.0] {
        let params = homogeneous_params(b, &cfg)?;
        println!("b = {b}: K1 = {:.6}, {:?}", params.k1, params.branch);
        let closed = homogeneous_spectrum(b, &cfg, -2..=2)?;
        let lo = closed.first().unwrap().omega;
        let hi = closed.last().unwrap().omega;
        let rect = Rect::new(lo.re - 0.05, hi.re + 0.05, 2.0 * lo.im, 0.5 * lo.im);
        let found = find_resonances(&StepFunction::constant(cfg.interval, b)?, &cfg, &rect, (rect.width() / 200.0, rect.height() / 10.0), 1e-12)?;
        for (c, f) in closed.iter().zip(&found.resonances) {
            println!("  {:+.12} {:+.12}i   |diff| = {:.1e}", c.omega.re, c.omega.im, (c.omega - f.omega).norm());
        }
    }
    Ok(())
}
