//! Linear resonance problem for a fixed structure `B`.

pub mod homogeneous;
pub mod propagate;
pub mod roots;
pub mod theta;
pub mod turning;

use num_complex::Complex64;

/// A zero of `F(·; B)` in the closed lower half-plane.
#[derive(Debug, Clone, PartialEq)]
pub struct Resonance {
    pub omega: Complex64,
    pub multiplicity: usize,
    /// `|F(omega; B)|`.
    pub residual: f64,
}

pub use homogeneous::{homogeneous_params, homogeneous_resonance, homogeneous_spectrum, SpectrumBranch};
pub use roots::{count_zeros_winding, find_resonances, newton_polish, winding_number, Contour, SearchOutcome};
pub use theta::{char_f, df_dz, df_dz_at_resonance, phase_flux, theta_at, theta_at_x, theta_trace, wronskian_trace};
pub use turning::{turning_interval, TurningInterval};
