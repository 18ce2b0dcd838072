//! The two one-dimensional fibre operators: the de Gennes model on the
//! half-line and the magnetic-step model on the line.
//!
//! Both are discretised by second-order finite differences on a cell-centred
//! grid, so a Neumann end is a reflection through the boundary face and a
//! Dirichlet end an antisymmetric reflection. The matrices are symmetric
//! tridiagonal and the lowest eigenvalue is found by Sturm bisection.

use crate::error::{check_failed, invalid, Result};
use crate::numeric::optimize::{golden_section, scan};
use crate::numeric::tridiag::SymTridiag;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Boundary {
    Neumann,
    Dirichlet,
}

/// Uniform cell-centred grid on `[left, right]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    pub left: f64,
    pub right: f64,
    pub nodes: usize,
    pub left_bc: Boundary,
    pub right_bc: Boundary,
}

impl Grid1D {
    pub fn new(left: f64, right: f64, nodes: usize, left_bc: Boundary, right_bc: Boundary) -> Result<Self> {
        if nodes < 16 {
            return Err(invalid("Grid1D", format!("node count {nodes} < 16")));
        }
        if !(left < right) || !left.is_finite() || !right.is_finite() {
            return Err(invalid("Grid1D", format!("need left < right, got [{left}, {right}]")));
        }
        Ok(Self { left, right, nodes, left_bc, right_bc })
    }

    pub fn spacing(&self) -> f64 {
        (self.right - self.left) / self.nodes as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        self.left + (i as f64 + 0.5) * self.spacing()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.nodes).map(|i| self.node(i)).collect()
    }

    /// The same interval with twice as many cells.
    pub fn refined(&self) -> Self {
        Self { nodes: 2 * self.nodes, ..*self }
    }

    /// `-d²/dx² + V` on this grid.
    pub fn schrodinger<F: Fn(f64) -> f64>(&self, v: F) -> SymTridiag {
        let n = self.nodes;
        let d2 = 1.0 / (self.spacing() * self.spacing());
        let mut diag: Vec<f64> = (0..n).map(|i| 2.0 * d2 + v(self.node(i))).collect();
        let end = |bc| match bc {
            Boundary::Neumann => -d2,
            Boundary::Dirichlet => d2,
        };
        diag[0] += end(self.left_bc);
        diag[n - 1] += end(self.right_bc);
        SymTridiag::new(diag, vec![-d2; n - 1])
    }
}

impl Grid1D {
    /// Quadratic form of `-d²/dx² + V` evaluated in difference form, which
    /// avoids the `‖T‖·ε` rounding floor of the assembled matrix.
    fn rayleigh<F: Fn(f64) -> f64>(&self, v: &F, u: &[f64]) -> f64 {
        let d2 = 1.0 / (self.spacing() * self.spacing());
        let n = u.len();
        let mut q: f64 = u.windows(2).map(|w| (w[1] - w[0]) * (w[1] - w[0])).sum::<f64>() * d2;
        if self.left_bc == Boundary::Dirichlet {
            q += 2.0 * u[0] * u[0] * d2;
        }
        if self.right_bc == Boundary::Dirichlet {
            q += 2.0 * u[n - 1] * u[n - 1] * d2;
        }
        q += u.iter().enumerate().map(|(i, x)| v(self.node(i)) * x * x).sum::<f64>();
        q / u.iter().map(|x| x * x).sum::<f64>()
    }
}

/// Ground state of `-d²/dx² + V`; the eigenvalue is the Rayleigh quotient of
/// the inverse-iteration vector.
fn lowest<F: Fn(f64) -> f64>(g: &Grid1D, v: F, op: &'static str) -> Result<(f64, Vec<f64>)> {
    let (_, u) = g.schrodinger(&v).lowest_eigenpair(1e-9).map_err(|e| match e {
        crate::Error::NoConvergence { residual, .. } => crate::Error::NoConvergence { op, residual },
        other => other,
    })?;
    Ok((g.rayleigh(&v, &u), u))
}

/// Lowest eigenvalue of `-d²/dτ² + (ξ+τ)²` on the half-line grid.
pub fn degennes_mu(xi: f64, grid: &Grid1D) -> Result<f64> {
    if grid.left != 0.0 || grid.left_bc != Boundary::Neumann {
        return Err(invalid("degennes_mu", "grid must start at 0 with a Neumann end"));
    }
    if grid.right < xi.abs() + 10.0 {
        return Err(invalid("degennes_mu", format!("right end {} < |xi| + 10", grid.right)));
    }
    Ok(lowest(grid, |t| (xi + t) * (xi + t), "degennes_mu")?.0)
}

/// Magnetic step profile `b(τ)τ`.
fn step_potential(theta: f64, xi: f64) -> impl Fn(f64) -> f64 {
    move |t| {
        let a = xi + if t > 0.0 { t } else { theta * t };
        a * a
    }
}

/// Lowest eigenvalue of `-d²/dτ² + (ξ + b(τ)τ)²` with `b = 1` on `τ > 0` and
/// `b = ϑ` on `τ < 0`.
pub fn step_mu(theta: f64, xi: f64, grid: &Grid1D) -> Result<f64> {
    if theta == 0.0 || !theta.is_finite() {
        return Err(invalid("step_mu", "theta = 0 gives a non-confining potential"));
    }
    if !(theta > -1.0 && theta < 0.0) && theta != 1.0 {
        return Err(invalid("step_mu", format!("theta = {theta} outside (-1, 0)")));
    }
    if grid.left_bc != Boundary::Dirichlet || grid.right_bc != Boundary::Dirichlet || grid.left >= 0.0 || grid.right <= 0.0 {
        return Err(invalid("step_mu", "grid must straddle 0 with Dirichlet ends"));
    }
    Ok(lowest(grid, step_potential(theta, xi), "step_mu")?.0)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DeGennesConstants {
    pub theta0: f64,
    pub xi0: f64,
    pub c1: f64,
    /// Second derivative of the band function at its minimum.
    pub mu_second: f64,
    /// Grid points for `u0`.
    pub tau: Vec<f64>,
    /// Normalised ground state at `ξ = ξ₀`.
    pub u0: Vec<f64>,
    /// `|ξ₀² − Θ₀|`.
    pub identity_residual: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StepConstants {
    pub theta: f64,
    pub beta: f64,
    pub zeta: f64,
    pub mu_second: f64,
    pub phi0: f64,
    pub dphi0: f64,
    pub m3: f64,
}

/// Cells per unit length of the base grid used for the constants; the value
/// is extrapolated from this grid and its refinement.
const CELLS_PER_UNIT: f64 = 400.0;

fn richardson(coarse: f64, fine: f64) -> f64 {
    (4.0 * fine - coarse) / 3.0
}

fn dg_grid(right: f64) -> Grid1D {
    let n = (right * CELLS_PER_UNIT).ceil() as usize;
    Grid1D::new(0.0, right, n, Boundary::Neumann, Boundary::Dirichlet).unwrap()
}

fn step_grid(theta: f64) -> Grid1D {
    let t = 12.0 / theta.abs().min(1.0);
    let n = 2 * (t * CELLS_PER_UNIT).ceil() as usize;
    Grid1D::new(-t, t, n, Boundary::Dirichlet, Boundary::Dirichlet).unwrap()
}

/// Locate the unique minimum of `f` on `[-3, 1]`.
fn band_minimum<F: Fn(f64) -> Result<f64>>(f: F, tol: f64, op: &'static str) -> Result<(f64, f64)> {
    let err = std::cell::RefCell::new(None);
    let g = |x: f64| match f(x) {
        Ok(v) => v,
        Err(e) => {
            err.borrow_mut().get_or_insert(e);
            f64::NAN
        }
    };
    let s = scan(g, -3.0, 1.0, 41);
    if let Some(e) = err.borrow_mut().take() {
        return Err(e);
    }
    if s.local_minima > 1 {
        return Err(check_failed(op, format!("coarse scan shows {} local minima", s.local_minima)));
    }
    if s.at_edge() {
        return Err(check_failed(op, "minimiser at the edge of the scan bracket"));
    }
    let (lo, hi) = s.bracket();
    let (x, v) = golden_section(g, lo, hi, tol.min(1e-3) * 1e-2);
    if let Some(e) = err.into_inner() {
        return Err(e);
    }
    Ok((x, v))
}

/// The de Gennes constant, its minimiser, `C₁` and the curvature of the band
/// function at the minimum.
pub fn degennes_constants(tol: f64) -> Result<DeGennesConstants> {
    if !(tol > 0.0 && tol <= 1e-3) {
        return Err(invalid("degennes_constants", format!("tol = {tol} outside (0, 1e-3]")));
    }
    let coarse = dg_grid(3.0 + 12.0);
    let fine = coarse.refined();
    let mu = |xi: f64| Ok(richardson(degennes_mu(xi, &coarse)?, degennes_mu(xi, &fine)?));
    let (xi0, theta0) = band_minimum(mu, tol, "degennes_constants")?;
    let delta = tol.cbrt();
    let mu_second = (mu(xi0 + delta)? - 2.0 * theta0 + mu(xi0 - delta)?) / (delta * delta);

    let boundary_value = |g: &Grid1D| -> Result<(f64, Vec<f64>)> {
        let (_, mut u) = lowest(g, |t| (xi0 + t) * (xi0 + t), "degennes_constants")?;
        let scale = (u.iter().map(|x| x * x).sum::<f64>() * g.spacing()).sqrt();
        u.iter_mut().for_each(|x| *x /= scale);
        Ok(((9.0 * u[0] - u[1]) / 8.0, u))
    };
    let (uc, _) = boundary_value(&coarse)?;
    let (uf, u0) = boundary_value(&fine)?;
    let c1 = richardson(uc * uc, uf * uf) / 3.0;
    let identity_residual = (xi0 * xi0 - theta0).abs();
    if identity_residual > 10.0 * tol {
        return Err(check_failed(
            "degennes_constants",
            format!("|xi0^2 - Theta0| = {identity_residual:.3e} exceeds 10 tol; grid under-resolved"),
        ));
    }
    Ok(DeGennesConstants { theta0, xi0, c1, mu_second, tau: fine.points(), u0, identity_residual })
}

/// Cubic through the first four samples right of 0, evaluated with its
/// derivative at 0.
fn one_sided_cubic(t: &[f64], y: &[f64]) -> (f64, f64) {
    // Lagrange basis on four nodes: value and derivative at x = 0.
    let mut v = 0.0;
    let mut d = 0.0;
    for i in 0..4 {
        let mut w = 1.0;
        let mut dw = 0.0;
        let mut denom = 1.0;
        for j in 0..4 {
            if j == i {
                continue;
            }
            denom *= t[i] - t[j];
            dw = dw * (-t[j]) + w;
            w *= -t[j];
        }
        v += y[i] * w / denom;
        d += y[i] * dw / denom;
    }
    (v, d)
}

/// Constants of the magnetic-step fibre model for `ϑ ∈ (−1, 0)`.
pub fn step_constants(theta: f64, tol: f64) -> Result<StepConstants> {
    if !(theta > -1.0 && theta < 0.0) {
        return Err(invalid("step_constants", format!("theta = {theta} outside (-1, 0)")));
    }
    if !(tol > 0.0 && tol <= 1e-3) {
        return Err(invalid("step_constants", format!("tol = {tol} outside (0, 1e-3]")));
    }
    let coarse = step_grid(theta);
    let fine = coarse.refined();
    let mu = |xi: f64| Ok(richardson(step_mu(theta, xi, &coarse)?, step_mu(theta, xi, &fine)?));
    let (zeta, beta) = band_minimum(mu, tol, "step_constants")?;
    let delta = tol.cbrt();
    let mu_second = (mu(zeta + delta)? - 2.0 * beta + mu(zeta - delta)?) / (delta * delta);

    let trace = |g: &Grid1D| -> Result<(f64, f64)> {
        let (_, mut u) = lowest(g, step_potential(theta, zeta), "step_constants")?;
        let scale = (u.iter().map(|x| x * x).sum::<f64>() * g.spacing()).sqrt();
        u.iter_mut().for_each(|x| *x /= scale);
        let i0 = g.nodes / 2;
        let t: Vec<f64> = (i0..i0 + 4).map(|i| g.node(i)).collect();
        Ok(one_sided_cubic(&t, &u[i0..i0 + 4]))
    };
    let (pc, dc) = trace(&coarse)?;
    let (pf, df) = trace(&fine)?;
    let phi0 = richardson(pc, pf);
    let dphi0 = richardson(dc, df);
    let m3 = (1.0 / theta - 1.0) * zeta * phi0 * dphi0 / 3.0;
    Ok(StepConstants { theta, beta, zeta, mu_second, phi0, dphi0, m3 })
}
