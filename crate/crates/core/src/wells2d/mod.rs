//! Magnetic Laplacian with `n` identical radial wells: single-well radial
//! problem, hopping and overlap integrals, the full two-dimensional
//! discretisation and sweeps in `h`.

mod integrals;
mod lattice;
mod radial;
mod sweep;

pub use integrals::{
    ground_state, hopping, hopping_from, j_coefficients, overlap_from, overlap_w, phi_n, triangle_flux, JCoefficients,
    Overlap, ANGLE_NODES, RADIAL_CELLS_PER_UNIT,
};
pub use lattice::{default_half_width, discretize, DiscretizeOptions, QuadraticGauge};
pub use radial::{radial_grid, radial_single_well, RadialGroundState};
pub use sweep::{gap_sweep, well_operator, SweepOptions, WellSweep};

use crate::actions::RadialWell;
use crate::error::{invalid, Result};
use std::f64::consts::PI;

/// `z_k = L/√(2 − 2cos(2π/n)) · e^{2πik/n}` for `k = 1..n`.
pub fn well_centers(n: usize, l: f64) -> Result<Vec<[f64; 2]>> {
    if n < 2 || !(l > 0.0) {
        return Err(invalid("well_centers", format!("need n >= 2 and L > 0, got n={n}, L={l}")));
    }
    let rho = circumradius(n, l);
    Ok((1..=n)
        .map(|k| {
            let (s, c) = (2.0 * PI * k as f64 / n as f64).sin_cos();
            [rho * c, rho * s]
        })
        .collect())
}

fn circumradius(n: usize, l: f64) -> f64 {
    l / (2.0 - 2.0 * (2.0 * PI / n as f64).cos()).sqrt()
}

/// `n` copies of a radial well at distance `L` in a field of strength `b`.
#[derive(Debug, Clone)]
pub struct WellConfig {
    pub n: usize,
    pub l: f64,
    pub b: f64,
    pub well: RadialWell,
    pub centers: Vec<[f64; 2]>,
}

impl WellConfig {
    pub fn new(n: usize, l: f64, b: f64, well: RadialWell) -> Result<Self> {
        if !(b > 0.0) {
            return Err(invalid("WellConfig", format!("b = {b} must be positive")));
        }
        if !(l > 2.0 * well.a()) {
            return Err(invalid("WellConfig", format!("need L > 2a, got L={l}, a={}", well.a())));
        }
        let centers = well_centers(n, l)?;
        Ok(Self { n, l, b, well, centers })
    }

    pub fn circumradius(&self) -> f64 {
        circumradius(self.n, self.l)
    }

    /// `V(x) = Σ_k v₀(x − z_k)`.
    pub fn potential(&self, p: [f64; 2]) -> f64 {
        self.centers.iter().map(|z| self.well.eval((p[0] - z[0]).hypot(p[1] - z[1]))).sum()
    }

    /// The well `b⁻²v₀` of the unit-field problem with `ħ = h/b`.
    pub fn scaled_well(&self) -> RadialWell {
        self.well.scaled(self.b)
    }
}
