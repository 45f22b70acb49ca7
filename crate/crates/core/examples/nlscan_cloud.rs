//! Lattice scan of the nonlinear spectrum around the first cloud.

use cavity_qopt::bangbang::SolverOptions;
use cavity_qopt::model::{AdmissibleFamily, BoundaryParams, Interval, Nu2, Rect, ResonatorConfig};
use cavity_qopt::optimizer::{cluster_points, scan_nl_spectrum, ScanGrid};

fn main() -> cavity_qopt::Result<()> {
    let cfg = ResonatorConfig::new(Interval::new(-1.0, 0.0)?, BoundaryParams::new(1.0, Nu2::Infinite)?);
    let fam = AdmissibleFamily::constant(cfg.interval, 90.0, 110.0)?;
    let grid = ScanGrid::new(Rect::new(0.14, 0.17, -0.015, 0.0), 2e-3, 1e-4, 360, 5e-5)?;
    let scan = scan_nl_spectrum(&fam, &grid, &cfg, &SolverOptions::default())?;
    println!("{} points detected", scan.points.len());
    for c in cluster_points(&scan.points, grid.h_re, grid.h_im, 1) {
        let (lo, hi) = c.alpha_hull(grid.h_re);
        println!("cluster of {} points, Re in [{lo:.3}, {hi:.3}], closest to the axis at {:.4}", c.points.len(), c.top.z);
    }
    Ok(())
}
