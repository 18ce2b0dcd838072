use crate::actions::RadialWell;
use crate::error::{check_failed, invalid, Result};
use crate::model1d::{Boundary, Grid1D};
use crate::numeric::tridiag::SymTridiag;

/// Radial ground state `u_h(r)` of the single-well operator, normalised in
/// `L²(ℝ², dx)`.
#[derive(Debug, Clone)]
pub struct RadialGroundState {
    pub h: f64,
    pub lambda: f64,
    pub r: Vec<f64>,
    pub u: Vec<f64>,
    dr: f64,
    log_u: Vec<f64>,
}

impl RadialGroundState {
    /// `u_h(ρ)` by linear interpolation of `ln u`; zero past the grid.
    pub fn eval(&self, rho: f64) -> f64 {
        let rho = rho.abs();
        let x = rho / self.dr - 0.5;
        if x <= 0.0 {
            return self.u[0];
        }
        let i = x.floor() as usize;
        if i + 1 >= self.u.len() {
            return 0.0;
        }
        let f = x - i as f64;
        ((1.0 - f) * self.log_u[i] + f * self.log_u[i + 1]).exp()
    }

    pub fn extent(&self) -> f64 {
        self.dr * self.r.len() as f64
    }
}

/// Lowest eigenpair of `−h²(f'' + f'/r) + (r²/4 + v₀(r)) f` on `(0, R)`,
/// regular at 0 and Dirichlet at `R`.
///
/// The cell-centred scheme is symmetrised by `√r`; the eigenvalue is the
/// Rayleigh quotient of the inverse-iteration vector.
pub fn radial_single_well(h: f64, well: &RadialWell, grid: &Grid1D) -> Result<RadialGroundState> {
    if !(h > 0.0) {
        return Err(invalid("radial_single_well", format!("h = {h} must be positive")));
    }
    if grid.left != 0.0 {
        return Err(invalid("radial_single_well", "radial grid must start at 0"));
    }
    let m = grid.nodes;
    let dr = grid.spacing();
    let r: Vec<f64> = grid.points();
    let k = h * h / (dr * dr);
    let pot: Vec<f64> = r.iter().map(|&x| x * x / 4.0 + well.eval(x)).collect();
    let diag: Vec<f64> = (0..m)
        .map(|i| {
            let rp = r[i] + dr / 2.0;
            let rm = r[i] - dr / 2.0;
            let outer = match (i + 1 == m, grid.right_bc) {
                (false, _) => rp,
                (true, Boundary::Dirichlet) => 2.0 * rp,
                (true, Boundary::Neumann) => 0.0,
            };
            k * (rm + outer) / r[i] + pot[i]
        })
        .collect();
    let off: Vec<f64> = (0..m - 1).map(|i| -k * (r[i] + dr / 2.0) / (r[i] * r[i + 1]).sqrt()).collect();
    let (_, g) = SymTridiag::new(diag, off).lowest_eigenpair(1e-9)?;
    let mut u: Vec<f64> = g.iter().zip(&r).map(|(gi, ri)| gi / ri.sqrt()).collect();
    // quadratic form in flux form, weight r dr
    let mut num = 0.0;
    for i in 0..m - 1 {
        let du = u[i + 1] - u[i];
        num += k * (r[i] + dr / 2.0) * du * du;
    }
    if grid.right_bc == Boundary::Dirichlet {
        num += 2.0 * k * (r[m - 1] + dr / 2.0) * u[m - 1] * u[m - 1];
    }
    let mut den = 0.0;
    for i in 0..m {
        num += pot[i] * u[i] * u[i] * r[i];
        den += u[i] * u[i] * r[i];
    }
    let lambda = num / den;
    let norm = (2.0 * std::f64::consts::PI * den * dr).sqrt();
    u.iter_mut().for_each(|x| *x /= norm);
    if u[0] < 0.0 {
        u.iter_mut().for_each(|x| *x = -*x);
    }
    if lambda > h * (1.0 + 1e-9) {
        return Err(check_failed("radial_single_well", format!("lambda = {lambda} exceeds h = {h}; grid too coarse")));
    }
    let floor = f64::MIN_POSITIVE;
    let log_u = u.iter().map(|x| x.max(floor).ln()).collect();
    Ok(RadialGroundState { h, lambda, r, u, dr, log_u })
}

/// Radial grid of `(0, extent)` with the given number of cells.
pub fn radial_grid(extent: f64, cells: usize) -> Grid1D {
    Grid1D::new(0.0, extent, cells, Boundary::Neumann, Boundary::Dirichlet).expect("valid radial grid")
}
