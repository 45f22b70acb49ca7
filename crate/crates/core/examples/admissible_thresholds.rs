//! Frequencies guaranteed to be reachable by some admissible structure.

use cavity_qopt::model::{BoundaryParams, Interval, Nu2, ResonatorConfig};
use cavity_qopt::optimizer::admissible_thresholds;

fn main() -> cavity_qopt::Result<()> {
    let cases = [
        (1.0, Nu2::Finite(1.0), 1.0, 4.0),
        (90f64.sqrt(), Nu2::Infinite, 90.0, 110.0),
        (1.0, Nu2::Finite(2.0), 0.0, 9.0),
        (2.0, Nu2::Finite(3.0), 1.0, 16.0),
    ];
    for (nu1, nu2, b1, b2) in cases {
        let cfg = ResonatorConfig::new(Interval::new(0.0, 1.0)?, BoundaryParams::new(nu1, nu2)?);
        let t = admissible_thresholds(b1, b2, &cfg)?;
        let rel = if t.strict { ">" } else { ">=" };
        println!("b in [{b1}, {b2}], nu = ({nu1:.3}, {nu2:?}): {:?}, |alpha| {rel} {:.6} (general bound {:.6})", t.arrangement, t.threshold, t.general);
    }
    Ok(())
}
