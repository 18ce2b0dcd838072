use crate::error::{invalid, Result};
use crate::numeric::quad::gauss_legendre_on;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Points stored per symmetry period.
const POINTS_PER_PERIOD: usize = 256;
const GL_ORDER: usize = 16;

/// Closed curve of length `2L` parametrised by arc length, with curvature
/// `k(s) = k_mean + ε·cos(nπs/L)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosedCurve {
    /// Half-perimeter.
    pub l: f64,
    pub n: usize,
    pub k_mean: f64,
    pub eps_curv: f64,
    /// `γ(s_j)` at `s_j = j·2L/M`, `j = 0..M` (the last point closes the loop).
    pub points: Vec<[f64; 2]>,
    pub area: f64,
    /// Set when `k'' ≡ 0` and the curvature wells are not isolated.
    pub degenerate: bool,
}

impl ClosedCurve {
    pub fn curvature(&self, s: f64) -> f64 {
        self.k_mean + self.eps_curv * (self.n as f64 * PI * s / self.l).cos()
    }

    pub fn k_max(&self) -> f64 {
        self.k_mean + self.eps_curv.abs()
    }

    /// Tangent angle `θ(s) = ∫₀^s k`.
    pub fn tangent_angle(&self, s: f64) -> f64 {
        let w = self.n as f64 * PI / self.l;
        self.k_mean * s + self.eps_curv * (w * s).sin() / w
    }

    /// Well positions `s_j = (j−1)·2L/n`.
    pub fn wells(&self) -> Vec<f64> {
        (0..self.n).map(|j| j as f64 * 2.0 * self.l / self.n as f64).collect()
    }

    /// Arc-length parameter of `points[j]`.
    pub fn point_parameter(&self, j: usize) -> f64 {
        j as f64 * 2.0 * self.l / (self.points.len() - 1) as f64
    }

    /// Total curvature `∫₀^{2L} k ds`.
    pub fn total_curvature(&self) -> f64 {
        self.tangent_angle(2.0 * self.l)
    }

    /// `|γ(2L) − γ(0)|`.
    pub fn closure_defect(&self) -> f64 {
        let (a, b) = (self.points[0], self.points[self.points.len() - 1]);
        (a[0] - b[0]).hypot(a[1] - b[1])
    }
}

fn tangent(c: &ClosedCurve, s: f64) -> [f64; 2] {
    let (y, x) = c.tangent_angle(s).sin_cos();
    [x, y]
}

fn integrate_tangent(c: &ClosedCurve, a: f64, b: f64) -> [f64; 2] {
    let (x, w) = gauss_legendre_on(GL_ORDER, a, b);
    x.iter().zip(&w).fold([0.0, 0.0], |acc, (s, wi)| {
        let t = tangent(c, *s);
        [acc[0] + wi * t[0], acc[1] + wi * t[1]]
    })
}

/// The `n`-fold symmetric perturbation of the circle of perimeter `2L`:
/// `k(s) = π/L + ε_curv·cos(nπs/L)`.
pub fn smoothed_triangle(l: f64, eps_curv: f64, n: usize) -> Result<ClosedCurve> {
    if !(l > 0.0) || n < 3 {
        return Err(invalid("smoothed_triangle", format!("need L > 0 and n >= 3, got L={l}, n={n}")));
    }
    if !(eps_curv >= 0.0 && eps_curv < PI / (2.0 * l)) {
        return Err(invalid(
            "smoothed_triangle",
            format!("eps_curv = {eps_curv} outside [0, pi/(2L)) = [0, {})", PI / (2.0 * l)),
        ));
    }
    let mut c = ClosedCurve {
        l,
        n,
        k_mean: PI / l,
        eps_curv,
        points: Vec::new(),
        area: 0.0,
        degenerate: eps_curv == 0.0,
    };
    let m = POINTS_PER_PERIOD * n;
    let ds = 2.0 * l / m as f64;
    let mut p = [0.0, 0.0];
    let mut points = Vec::with_capacity(m + 1);
    points.push(p);
    // ½∮(x dy − y dx), with γ evaluated at the quadrature nodes of each piece
    let mut area = 0.0;
    for j in 0..m {
        let (s0, s1) = (j as f64 * ds, (j + 1) as f64 * ds);
        let (xs, ws) = gauss_legendre_on(GL_ORDER, s0, s1);
        for (s, w) in xs.iter().zip(&ws) {
            let d = integrate_tangent(&c, s0, *s);
            let g = [p[0] + d[0], p[1] + d[1]];
            let t = tangent(&c, *s);
            area += 0.5 * w * (g[0] * t[1] - g[1] * t[0]);
        }
        let d = integrate_tangent(&c, s0, s1);
        p = [p[0] + d[0], p[1] + d[1]];
        points.push(p);
    }
    c.points = points;
    c.area = area.abs();
    Ok(c)
}
