use super::boundary::FiberConstants;
use super::curve::ClosedCurve;
use crate::error::{invalid, Result};
use crate::operator::{GridInfo, SparseHermitianOperator};
use crate::reduction::SiteMap;
use crate::sparse::CsrMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Which fibre operator lives across the strip.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum StripKind {
    /// `τ ∈ (0, T)`, Neumann at the boundary `τ = 0`.
    Neumann,
    /// `τ ∈ (−T, T)`, field `1` for `τ > 0` and `ϑ` for `τ < 0`.
    Step { theta: f64 },
}

impl StripKind {
    pub fn of(fiber: &FiberConstants) -> Self {
        match fiber {
            FiberConstants::Neumann(_) => Self::Neumann,
            FiberConstants::Step(c) => Self::Step { theta: c.theta },
        }
    }
}

/// Grid of the scaled strip: `sigma_nodes` periodic nodes along the curve
/// and `tau_nodes` cells across (split evenly about `τ = 0` for the step).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StripGrid {
    pub sigma_nodes: usize,
    pub tau_nodes: usize,
}

/// Cap on the scaled strip width.
pub const TAU_CAP: f64 = 12.0;
/// Default cells per unit of `τ`.
pub const TAU_CELLS_PER_UNIT: f64 = 16.0;
/// Default `σ` spacing in units of `h^{1/2}`.
pub const SIGMA_STEP: f64 = 0.44;

/// A strip operator in the scaled variables `(σ, τ) = (s, h^{−1/2}t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StripSpec {
    pub kind: StripKind,
    pub curve: ClosedCurve,
    /// Strip half-width in `t`.
    pub eps0: f64,
    pub h: f64,
    pub grid: StripGrid,
    /// Constant term of the tangential momentum; `|Ω|/(2L)` for the curve.
    pub gamma0: f64,
    /// Band minimiser (`ξ₀` or `ζ_ϑ`); the discrete gauge is centred on it.
    pub xi: f64,
}

/// `min(0.4/k_max, L/4)`.
pub fn default_eps0(curve: &ClosedCurve) -> f64 {
    (0.4 / curve.k_max()).min(curve.l / 4.0)
}

/// Default grid at `h`: about [`TAU_CELLS_PER_UNIT`] cells per unit `τ` and
/// a `σ` spacing of [`SIGMA_STEP`]`·h^{1/2}`, rounded up to a multiple of `n`.
pub fn default_grid(kind: StripKind, curve: &ClosedCurve, eps0: f64, h: f64) -> StripGrid {
    let hb = h.sqrt();
    let t = tau_max(eps0, h);
    let tau_nodes = match kind {
        StripKind::Neumann => (t * TAU_CELLS_PER_UNIT).ceil() as usize,
        StripKind::Step { .. } => 2 * (t * TAU_CELLS_PER_UNIT).ceil() as usize,
    };
    let raw = (2.0 * curve.l / (SIGMA_STEP * hb)).ceil() as usize;
    StripGrid { sigma_nodes: raw.div_ceil(curve.n) * curve.n, tau_nodes }
}

/// `min(ε₀ h^{−1/2}, 12)`.
pub fn tau_max(eps0: f64, h: f64) -> f64 {
    (eps0 / h.sqrt()).min(TAU_CAP)
}

impl StripSpec {
    /// Defaults for `ε₀`, `γ₀` and the grid.
    pub fn new(curve: ClosedCurve, fiber: &FiberConstants, h: f64) -> Self {
        let kind = StripKind::of(fiber);
        let eps0 = default_eps0(&curve);
        let grid = default_grid(kind, &curve, eps0, h);
        let gamma0 = curve.area / (2.0 * curve.l);
        Self { kind, curve, eps0, h, grid, gamma0, xi: fiber.band_minimiser() }
    }

    /// Integer `m` of the gauge `e^{iπmσ/L}` that brings the tangential
    /// momentum `γ₀h^{−1/2}` close to `−ξ`.
    pub fn gauge_index(&self) -> f64 {
        let hb = self.h.sqrt();
        ((self.gamma0 / hb + self.xi) * self.curve.l / (hb * PI)).round()
    }
}

/// `θ/(2 sin(θ/2))`, which makes a link exact on `σ`-constant functions.
fn link_weight(theta: f64) -> f64 {
    if theta.abs() < 1e-6 {
        1.0 + theta * theta / 24.0
    } else {
        0.5 * theta / (0.5 * theta).sin()
    }
}

/// Finite-difference matrix of the strip operator, made Hermitian by the
/// similarity with `(a·dσ·dτ)^{1/2}`.
///
/// Nodes are `(σ_j, τ_i)` with `σ_j = j·dσ` and cell-centred `τ_i`; index
/// `i·N_σ + j`. Links along `σ` carry the exact phase of the gauged
/// potential at their midpoint. The gauge `e^{iπmσ/L}` shifts the
/// momentum by a multiple of `πh^{1/2}/L`, so `γ₀` offsets by `πh/L` times
/// an integer give the same matrix, and the rotation becomes
/// `e^{2πim/n}` times the shift by `N_σ/n` nodes.
pub fn discretize_strip(spec: &StripSpec) -> Result<SparseHermitianOperator> {
    let op = "discretize_strip";
    let StripSpec { kind, curve, eps0, h, grid, gamma0, .. } = spec;
    let (ns, nt) = (grid.sigma_nodes, grid.tau_nodes);
    if !(*h > 0.0) || !(*eps0 > 0.0) {
        return Err(invalid(op, format!("need h > 0 and eps0 > 0, got h={h}, eps0={eps0}")));
    }
    if ns < 3 * curve.n || ns % curve.n != 0 {
        return Err(invalid(op, format!("sigma nodes {ns} must be a multiple of n={} and at least 3n", curve.n)));
    }
    let theta = match kind {
        StripKind::Neumann => None,
        StripKind::Step { theta } => {
            if !(*theta > -1.0 && *theta < 0.0) {
                return Err(invalid(op, format!("theta = {theta} outside (-1, 0)")));
            }
            if nt % 2 != 0 {
                return Err(invalid(op, "step strips need an even number of tau cells"));
            }
            Some(*theta)
        }
    };
    if nt < 8 {
        return Err(invalid(op, format!("need at least 8 tau cells, got {nt}")));
    }
    let hb = h.sqrt();
    let t_max = tau_max(*eps0, *h);
    let t_min = if theta.is_some() { -t_max } else { 0.0 };
    let dt = (t_max - t_min) / nt as f64;
    if dt > 1.0 / 12.0 + 1e-12 {
        return Err(invalid(op, format!("tau spacing {dt} coarser than 1/12")));
    }
    let ds = 2.0 * curve.l / ns as f64;
    let tau: Vec<f64> = (0..nt).map(|i| t_min + (i as f64 + 0.5) * dt).collect();
    let field = |t: f64| match theta {
        Some(th) if t < 0.0 => th,
        _ => 1.0,
    };
    let a = |s: f64, t: f64| 1.0 - hb * t * curve.curvature(s);
    let min_weight = [t_min, t_max]
        .iter()
        .flat_map(|&t| (0..2 * ns).map(move |j| (j as f64 * ds / 2.0, t)))
        .map(|(s, t)| a(s, t))
        .fold(f64::INFINITY, f64::min);
    if !(min_weight > 0.0) {
        return Err(invalid(op, format!("weight 1 - h^(1/2) tau k reaches {min_weight:.3e}; eps0 too large")));
    }
    let m = spec.gauge_index();
    let c = gamma0 / hb - hb * PI * m / curve.l;

    let idx = |i: usize, j: usize| i * ns + (j % ns);
    let mut trip: Vec<(usize, usize, C64)> = Vec::with_capacity(9 * ns * nt);
    let re = |x: f64| C64::new(x, 0.0);
    for (i, &t) in tau.iter().enumerate() {
        for j in 0..ns {
            let s = j as f64 * ds;
            let p = idx(i, j);
            if i + 1 < nt {
                let w = a(s, t + 0.5 * dt) * ds / dt;
                let q = idx(i + 1, j);
                trip.extend([(p, p, re(w)), (q, q, re(w)), (p, q, re(-w)), (q, p, re(-w))]);
            }
            // Dirichlet ends
            if i + 1 == nt {
                trip.push((p, p, re(2.0 * a(s, t_max) * ds / dt)));
            }
            if i == 0 && theta.is_some() {
                trip.push((p, p, re(2.0 * a(s, t_min) * ds / dt)));
            }
            let sm = s + 0.5 * ds;
            let b = field(t);
            let g = c - b * t + hb * curve.curvature(sm) * b * t * t / 2.0;
            let th = g * ds / hb;
            if th.abs() >= 2.0 * PI {
                return Err(invalid(op, format!("sigma link phase {th:.3} beyond 2 pi; refine sigma")));
            }
            let w = ds * dt / a(sm, t);
            let amp = hb / ds * link_weight(th);
            // D v = α v_j + β v_{j+1} ≈ (−i h^{1/2} ∂σ + g) v
            let alpha = C64::new(0.0, amp) * C64::from_polar(1.0, -0.5 * th);
            let beta = C64::new(0.0, -amp) * C64::from_polar(1.0, 0.5 * th);
            let q = idx(i, j + 1);
            trip.extend([
                (p, p, re(w * alpha.norm_sqr())),
                (q, q, re(w * beta.norm_sqr())),
                (p, q, alpha.conj() * beta * w),
                (q, p, beta.conj() * alpha * w),
            ]);
        }
    }
    let n = ns * nt;
    let mass: Vec<f64> = (0..n).map(|k| a((k % ns) as f64 * ds, tau[k / ns]) * ds * dt).collect();
    let scaled: Vec<(usize, usize, C64)> =
        trip.into_iter().map(|(r, col, v)| (r, col, v / (mass[r] * mass[col]).sqrt())).collect();
    let matrix = CsrMatrix::from_triplets(n, &scaled);
    let points = (0..n).map(|k| [(k % ns) as f64 * ds, tau[k / ns]]).collect();
    let shift = ns / curve.n;
    let phase = C64::from_polar(1.0, 2.0 * PI * m / curve.n as f64);
    let symmetry = SiteMap {
        src: (0..n).map(|k| idx(k / ns, k % ns + ns - shift)).collect(),
        phase: vec![phase; n],
    };
    Ok(SparseHermitianOperator {
        matrix,
        grid: GridInfo::Strip { sigma_nodes: ns, tau_nodes: nt, d_sigma: ds, d_tau: dt, tau_min: t_min, tau_max: t_max },
        points,
        symmetry: Some(symmetry),
        shift_hint: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model1d::{degennes_constants, DeGennesConstants};
    use crate::operator::lowest_eigs;
    use crate::strip2d::curve::smoothed_triangle;
    use nalgebra::DMatrix;
    use std::sync::OnceLock;

    fn dg() -> &'static DeGennesConstants {
        static DG: OnceLock<DeGennesConstants> = OnceLock::new();
        DG.get_or_init(|| degennes_constants(1e-6).unwrap())
    }

    fn neumann() -> FiberConstants {
        FiberConstants::Neumann(dg().clone())
    }

    fn small_spec(curve: ClosedCurve, h: f64) -> StripSpec {
        let mut spec = StripSpec::new(curve, &neumann(), h);
        spec.grid = StripGrid { sigma_nodes: 48, tau_nodes: (spec.eps0 / h.sqrt() * 12.0).ceil() as usize };
        spec
    }

    fn max_entry_diff(a: &CsrMatrix, b: &CsrMatrix) -> f64 {
        (0..a.dim())
            .flat_map(|i| {
                let (c, v) = a.row(i);
                c.iter().zip(v).map(move |(&j, &x)| (i, j, x)).collect::<Vec<_>>()
            })
            .map(|(i, j, x)| (x - b.get(i, j)).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn hermitian_after_similarity() {
        let c = smoothed_triangle(PI, 0.4, 3).unwrap();
        for h in [0.04, 0.01] {
            let op = discretize_strip(&StripSpec::new(c.clone(), &neumann(), h)).unwrap();
            assert!(op.matrix.hermitian_defect() < 1e-13);
        }
        let step = FiberConstants::Step(crate::model1d::StepConstants {
            theta: -0.5,
            beta: 0.39,
            zeta: -0.8,
            mu_second: 1.0,
            phi0: 0.5,
            dphi0: 0.1,
            m3: -0.1,
        });
        let op = discretize_strip(&StripSpec::new(c, &step, 0.01)).unwrap();
        assert!(op.matrix.hermitian_defect() < 1e-13);
    }

    #[test]
    fn gauge_equivalent_offsets_give_the_same_operator() {
        let circle = smoothed_triangle(PI, 0.0, 3).unwrap();
        let h = 0.04;
        let base = small_spec(circle, h);
        let a = discretize_strip(&base).unwrap();
        let ea = lowest_eigs(&a, 4, 1e-12, 1, false).unwrap().values;
        for j in [-2.0, 1.0, 5.0] {
            let mut spec = base.clone();
            spec.gamma0 += PI * h / spec.curve.l * j;
            assert_eq!(spec.gauge_index(), base.gauge_index() + j);
            let b = discretize_strip(&spec).unwrap();
            assert!(max_entry_diff(&a.matrix, &b.matrix) < 1e-10);
            let eb = lowest_eigs(&b, 4, 1e-12, 2, false).unwrap().values;
            for (x, y) in ea.iter().zip(&eb) {
                assert!((x - y).abs() < 1e-9, "{x} vs {y}");
            }
        }
    }

    /// Lowest eigenvalue of the straight strip by separation of variables:
    /// each discrete Fourier mode in `σ` leaves a real tridiagonal problem in
    /// `τ` whose potential is the symbol of the link form.
    fn straight_strip_oracle(spec: &StripSpec) -> f64 {
        let (ns, nt) = (spec.grid.sigma_nodes, spec.grid.tau_nodes);
        let hb = spec.h.sqrt();
        let t_max = (spec.eps0 / hb).min(12.0);
        let dt = t_max / nt as f64;
        let ds = 2.0 * spec.curve.l / ns as f64;
        let m = ((spec.gamma0 / hb + spec.xi) * spec.curve.l / (hb * PI)).round();
        let c = spec.gamma0 / hb - hb * PI * m / spec.curve.l;
        let mut best = f64::INFINITY;
        for q in 0..ns {
            let kappa = 2.0 * PI * q as f64 / (2.0 * spec.curve.l);
            let mut a = DMatrix::<f64>::zeros(nt, nt);
            for i in 0..nt {
                let t = (i as f64 + 0.5) * dt;
                let th = (c - t) * ds / hb;
                let w = if th.abs() < 1e-12 { 1.0 } else { th / (2.0 * (th / 2.0).sin()) };
                let s = 2.0 * (0.5 * (th + kappa * ds)).sin();
                a[(i, i)] += (hb / ds * w * s).powi(2);
                if i + 1 < nt {
                    let e = 1.0 / (dt * dt);
                    a[(i, i)] += e;
                    a[(i + 1, i + 1)] += e;
                    a[(i, i + 1)] -= e;
                    a[(i + 1, i)] -= e;
                } else {
                    a[(i, i)] += 2.0 / (dt * dt);
                }
            }
            best = best.min(a.symmetric_eigen().eigenvalues.min());
        }
        best
    }

    #[test]
    fn straight_strip_separates_and_tends_to_theta0() {
        let straight = ClosedCurve {
            l: PI,
            n: 3,
            k_mean: 0.0,
            eps_curv: 0.0,
            points: vec![],
            area: 0.0,
            degenerate: true,
        };
        let mut errs = Vec::new();
        for h in [0.04, 0.02, 0.01] {
            let mut spec = StripSpec::new(straight.clone(), &neumann(), h);
            spec.gamma0 = 0.0;
            let op = discretize_strip(&spec).unwrap();
            let l1 = lowest_eigs(&op, 1, 1e-12, 0, false).unwrap().values[0];
            let oracle = straight_strip_oracle(&spec);
            assert!((l1 - oracle).abs() < 1e-9, "h={h}: {l1} vs {oracle}");
            errs.push((l1 - dg().theta0).abs());
        }
        // momentum spacing πh^{1/2}/L and the τ grid set the distance to Θ₀
        assert!(errs.iter().all(|e| *e < 5e-3), "{errs:?}");
    }

    #[test]
    fn rotation_commutes_with_operator() {
        let c = smoothed_triangle(PI, 0.4, 3).unwrap();
        for h in [0.04, 0.0123] {
            let op = discretize_strip(&StripSpec::new(c.clone(), &neumann(), h)).unwrap();
            let p = op.symmetry.as_ref().unwrap();
            let n = op.dim();
            let x: Vec<C64> = (0..n).map(|k| C64::new((k as f64 * 0.37).sin(), (k as f64 * 0.11).cos())).collect();
            let mut ax = vec![C64::new(0.0, 0.0); n];
            op.matrix.matvec(&x, &mut ax);
            let pax = p.apply(&ax);
            let px = p.apply(&x);
            let mut apx = vec![C64::new(0.0, 0.0); n];
            op.matrix.matvec(&px, &mut apx);
            let err = pax.iter().zip(&apx).map(|(u, v)| (u - v).norm()).fold(0.0, f64::max);
            let scale = ax.iter().map(|v| v.norm()).fold(0.0, f64::max);
            assert!(err < 1e-10 * scale, "h={h}: {err:e}");
        }
    }

    #[test]
    fn shifted_spectrum_matches() {
        let c = smoothed_triangle(PI, 0.4, 3).unwrap();
        let op = discretize_strip(&StripSpec::new(c, &neumann(), 0.02)).unwrap();
        let p = op.symmetry.as_ref().unwrap();
        // conjugate by P: entries (P A P*)_{ij} = phase_i conj(phase_j) A_{src i, src j}
        let n = op.dim();
        let mut trip = Vec::new();
        for i in 0..n {
            let (cols, vals) = op.matrix.row(p.src[i]);
            let inv: std::collections::HashMap<usize, usize> = (0..n).map(|k| (p.src[k], k)).collect();
            for (&j0, &v) in cols.iter().zip(vals) {
                let j = inv[&j0];
                trip.push((i, j, p.phase[i] * v * p.phase[j].conj()));
            }
        }
        let moved = SparseHermitianOperator { matrix: CsrMatrix::from_triplets(n, &trip), ..op.clone() };
        let a = lowest_eigs(&op, 4, 1e-12, 0, false).unwrap().values;
        let b = lowest_eigs(&moved, 4, 1e-12, 5, false).unwrap().values;
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn oversized_strip_is_rejected() {
        let c = smoothed_triangle(PI, 0.4, 3).unwrap();
        let mut spec = StripSpec::new(c, &neumann(), 0.04);
        spec.eps0 = 1.0;
        spec.grid = StripGrid { sigma_nodes: 60, tau_nodes: 60 };
        let err = discretize_strip(&spec).unwrap_err().to_string();
        assert!(err.contains("eps0 too large"), "{err}");
    }

    #[test]
    fn grid_checks() {
        let c = smoothed_triangle(PI, 0.4, 3).unwrap();
        let mut spec = StripSpec::new(c, &neumann(), 0.04);
        spec.grid.sigma_nodes = 61;
        assert!(discretize_strip(&spec).is_err());
        spec.grid = StripGrid { sigma_nodes: 60, tau_nodes: 4 };
        assert!(discretize_strip(&spec).is_err());
        spec.h = -1.0;
        assert!(discretize_strip(&spec).is_err());
    }

    #[test]
    fn default_grid_is_symmetric_and_fine_enough() {
        let c = smoothed_triangle(PI, 0.4, 3).unwrap();
        for h in [0.02, 0.003, 4e-4] {
            let eps0 = default_eps0(&c);
            let g = default_grid(StripKind::Neumann, &c, eps0, h);
            assert_eq!(g.sigma_nodes % 3, 0);
            assert!(tau_max(eps0, h) / g.tau_nodes as f64 <= 1.0 / 12.0);
            let s = default_grid(StripKind::Step { theta: -0.5 }, &c, eps0, h);
            assert_eq!(s.tau_nodes % 2, 0);
        }
    }
}
