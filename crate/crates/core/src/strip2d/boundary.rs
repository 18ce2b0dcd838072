use super::curve::ClosedCurve;
use crate::model1d::{DeGennesConstants, StepConstants};
use crate::numeric::quad::gauss_legendre_on;
use serde::{Deserialize, Serialize};

/// Fibre model behind a strip operator.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum FiberConstants {
    /// Neumann boundary: the de Gennes model.
    Neumann(DeGennesConstants),
    /// Magnetic step with field ratio `ϑ`.
    Step(StepConstants),
}

impl FiberConstants {
    /// Minimiser of the band function (`ξ₀` or `ζ_ϑ`).
    pub fn band_minimiser(&self) -> f64 {
        match self {
            Self::Neumann(c) => c.xi0,
            Self::Step(c) => c.zeta,
        }
    }

    /// Minimum of the band function (`Θ₀` or `β_ϑ`).
    pub fn band_minimum(&self) -> f64 {
        match self {
            Self::Neumann(c) => c.theta0,
            Self::Step(c) => c.beta,
        }
    }

    /// `√(2C₁/μ'')` or `√(−2M₃/μ_ϑ'')`.
    pub fn agmon_prefactor(&self) -> f64 {
        match self {
            Self::Neumann(c) => (2.0 * c.c1 / c.mu_second).sqrt(),
            Self::Step(c) => (-2.0 * c.m3 / c.mu_second).sqrt(),
        }
    }

    /// Two-term expansion of the lowest strip eigenvalue at curvature
    /// `k_max`: `Θ₀ − 3C₁k_max√h` or `β_ϑ + M₃k_max√h`.
    pub fn leading_order(&self, k_max: f64, h: f64) -> f64 {
        match self {
            Self::Neumann(c) => c.theta0 - 3.0 * c.c1 * k_max * h.sqrt(),
            Self::Step(c) => c.beta + c.m3 * k_max * h.sqrt(),
        }
    }
}

/// Tunnelling and flux constants of a boundary with curvature wells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryActions {
    /// `S_n` (or `S_n(ϑ)`).
    pub s_n: f64,
    /// `Φ₀ = |Ω| − 2Lξ₀` (or `Φ_ϑ` with `ζ_ϑ`).
    pub phi: f64,
    /// `γ₀ = |Ω|/(2L)`.
    pub gamma0: f64,
    /// `(σ, Φ₁(σ))` on `[0, 2L/n]`.
    pub phi1: Vec<(f64, f64)>,
    /// Set when `k_max − k` came out negative somewhere and was clamped.
    pub clamped: bool,
}

const PROFILE_PANELS: usize = 256;

/// `S_n`, the flux term, `γ₀` and the Agmon profile `Φ₁` of `curve`. A
/// circle gives `S_n = 0`.
pub fn boundary_actions(curve: &ClosedCurve, fiber: &FiberConstants) -> BoundaryActions {
    let k_max = curve.k_max();
    let mut clamped = false;
    let mut root = |s: f64| {
        let d = k_max - curve.curvature(s);
        if d < 0.0 {
            clamped = true;
        }
        d.max(0.0).sqrt()
    };
    let period = 2.0 * curve.l / curve.n as f64;
    let pre = fiber.agmon_prefactor();
    let ds = period / PROFILE_PANELS as f64;
    let mut phi1 = Vec::with_capacity(PROFILE_PANELS + 1);
    phi1.push((0.0, 0.0));
    let mut acc = 0.0;
    for j in 0..PROFILE_PANELS {
        let (x, w) = gauss_legendre_on(12, j as f64 * ds, (j + 1) as f64 * ds);
        acc += x.iter().zip(&w).map(|(s, wi)| wi * root(*s)).sum::<f64>();
        phi1.push(((j + 1) as f64 * ds, pre * acc));
    }
    let s_n = pre * acc;
    let gamma0 = curve.area / (2.0 * curve.l);
    let phi = curve.area - 2.0 * curve.l * fiber.band_minimiser();
    BoundaryActions { s_n, phi, gamma0, phi1, clamped }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model1d::degennes_constants;
    use crate::strip2d::curve::smoothed_triangle;
    use std::f64::consts::PI;
    use std::sync::OnceLock;

    fn neumann() -> &'static FiberConstants {
        static F: OnceLock<FiberConstants> = OnceLock::new();
        F.get_or_init(|| FiberConstants::Neumann(degennes_constants(1e-6).unwrap()))
    }

    #[test]
    fn circle_has_no_barrier() {
        let c = smoothed_triangle(PI, 0.0, 3).unwrap();
        let b = boundary_actions(&c, neumann());
        assert_eq!(b.s_n, 0.0);
        assert!(b.phi1.iter().all(|p| p.1 == 0.0));
    }

    #[test]
    fn s_n_closed_form() {
        // ∫₀^{2L/n} √(ε(1 − cos(nπs/L))) ds = √(2ε)·4L/(nπ)
        let f = neumann();
        for (l, eps, n) in [(PI, 0.4, 3), (2.0, 0.3, 3), (3.0, 0.2, 5)] {
            let c = smoothed_triangle(l, eps, n).unwrap();
            let b = boundary_actions(&c, f);
            let exact = f.agmon_prefactor() * (2.0 * eps).sqrt() * 4.0 * l / (n as f64 * PI);
            assert!((b.s_n - exact).abs() < 1e-10 * exact, "{} vs {exact}", b.s_n);
            let last = b.phi1.last().unwrap();
            assert!((last.0 - 2.0 * l / n as f64).abs() < 1e-12);
            assert_eq!(last.1, b.s_n);
            assert!(b.phi1.windows(2).all(|w| w[1].1 >= w[0].1));
            assert!(!b.clamped);
        }
    }

    #[test]
    fn flux_and_gauge_constant() {
        let f = neumann();
        let theta0 = f.band_minimum();
        for eps in [0.1, 0.4, 0.45] {
            let c = smoothed_triangle(PI, eps, 3).unwrap();
            let b = boundary_actions(&c, f);
            assert!((b.phi - (c.area + 2.0 * PI * theta0.sqrt())).abs() < 1e-6);
            assert!((b.gamma0 - c.area / (2.0 * PI)).abs() < 1e-15);
        }
    }

    #[test]
    fn leading_order_terms() {
        let f = neumann();
        let FiberConstants::Neumann(d) = f else { unreachable!() };
        let v = f.leading_order(1.4, 0.01);
        assert!((v - (d.theta0 - 3.0 * d.c1 * 1.4 * 0.1)).abs() < 1e-15);
        assert!(f.agmon_prefactor() > 0.0);
    }
}
