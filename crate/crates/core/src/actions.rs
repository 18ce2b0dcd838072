//! Agmon distance of a radial well and the tunnelling constants built from it.

use crate::error::{check_failed, invalid, Result};
use crate::numeric::optimize::{golden_section, nelder_mead_2d, scan};
use crate::numeric::quad::adaptive_simpson;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;

#[derive(Clone)]
enum Profile {
    Bump { depth: f64 },
    Zero,
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

/// A compactly supported, non-positive radial potential `v₀(r)`.
#[derive(Clone)]
pub struct RadialWell {
    profile: Profile,
    /// Multiplies the profile (used for `b⁻²v₀`).
    scale: f64,
    a: f64,
    vmin: f64,
    v2: f64,
}

impl fmt::Debug for RadialWell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.profile {
            Profile::Bump { .. } => "bump",
            Profile::Zero => "zero",
            Profile::Custom(_) => "custom",
        };
        f.debug_struct("RadialWell")
            .field("kind", &kind)
            .field("a", &self.a)
            .field("vmin", &self.vmin)
            .field("v2", &self.v2)
            .finish()
    }
}

impl RadialWell {
    /// `v₀(r) = −V₀·exp(1 − a²/(a² − r²))` inside the disc of radius `a`.
    pub fn bump(v0: f64, a: f64) -> Result<Self> {
        if !(v0 > 0.0 && v0.is_finite()) {
            return Err(invalid("RadialWell::bump", format!("V0 = {v0} must be positive")));
        }
        if !(a > 0.0 && a.is_finite()) {
            return Err(invalid("RadialWell::bump", format!("a = {a} must be positive")));
        }
        Ok(Self { profile: Profile::Bump { depth: v0 }, scale: 1.0, a, vmin: -v0, v2: 2.0 * v0 / (a * a) })
    }

    /// The identically zero potential with nominal radius `a`. It violates the
    /// well invariants and is only meant for checks of the free problem.
    pub fn zero(a: f64) -> Self {
        Self { profile: Profile::Zero, scale: 1.0, a, vmin: 0.0, v2: 0.0 }
    }

    /// A user-supplied profile; the invariants are checked on a sample grid.
    pub fn custom<F>(f: F, a: f64, v2: f64) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let vmin = f(0.0);
        if !(vmin < 0.0) {
            return Err(invalid("RadialWell::custom", "v0(0) must be negative"));
        }
        if !(v2 > 0.0) {
            return Err(invalid("RadialWell::custom", "v0''(0) must be positive"));
        }
        for k in 0..=1000 {
            let r = 2.0 * a * k as f64 / 1000.0;
            let v = f(r);
            if v > 0.0 || v < vmin || (r >= a && v != 0.0) {
                return Err(invalid("RadialWell::custom", format!("profile violates the well invariants at r = {r}")));
            }
        }
        Ok(Self { profile: Profile::Custom(Arc::new(f)), scale: 1.0, a, vmin, v2 })
    }

    /// The well `b⁻²v₀`; `a` is unchanged.
    pub fn scaled(&self, b: f64) -> Self {
        let s = 1.0 / (b * b);
        Self { scale: self.scale * s, vmin: self.vmin * s, v2: self.v2 * s, ..self.clone() }
    }

    pub fn eval(&self, r: f64) -> f64 {
        let r = r.abs();
        if r >= self.a {
            return 0.0;
        }
        self.scale
            * match &self.profile {
                Profile::Bump { depth } => {
                    let a2 = self.a * self.a;
                    -depth * (1.0 - a2 / (a2 - r * r)).exp()
                }
                Profile::Zero => 0.0,
                Profile::Custom(f) => f(r),
            }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn vmin(&self) -> f64 {
        self.vmin
    }

    pub fn depth(&self) -> f64 {
        -self.vmin
    }

    pub fn second_derivative(&self) -> f64 {
        self.v2
    }
}

/// Whether `(a, L)` lies where the tunnelling asymptotics are proven.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    /// `L ≥ 4a`.
    Proven,
    /// `2a < L < 4a`: computed, but outside proven validity.
    Unproven,
}

pub fn regime(a: f64, l: f64) -> Result<Regime> {
    if !(l > 2.0 * a) {
        return Err(invalid("regime", format!("need L > 2a, got L = {l}, a = {a}")));
    }
    Ok(if l >= 4.0 * a { Regime::Proven } else { Regime::Unproven })
}

/// `∫₀^r √(ρ²/4 + c) dρ` in closed form.
fn free_action(r: f64, c: f64) -> f64 {
    if c == 0.0 {
        return r * r / 4.0;
    }
    let s = (r * r + 4.0 * c).sqrt();
    0.5 * (0.5 * r * s + 2.0 * c * ((r + s) / (2.0 * c.sqrt())).ln())
}

/// Agmon distance `d(r) = ∫₀^r √(ρ²/4 + v₀(ρ) − v₀^min) dρ`.
///
/// The part inside the support is integrated adaptively; beyond `a` the
/// integrand is explicit.
pub fn agmon_d(well: &RadialWell, r: f64, tol: f64) -> f64 {
    let c = well.depth();
    let inner = r.min(well.a());
    let f = |p: f64| (p * p / 4.0 + well.eval(p) + c).max(0.0).sqrt();
    let mut d = if inner > 0.0 { adaptive_simpson(&f, 0.0, inner, tol) } else { 0.0 };
    if r > well.a() {
        d += free_action(r, c) - free_action(well.a(), c);
    }
    d
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ActionConstants {
    pub s0: f64,
    pub s_a: f64,
    pub s_hat_a: f64,
    pub s_hat: f64,
    /// Minimiser of `Lr/2 + d(r) + d(L − r)`.
    pub r_hat: f64,
}

/// `S₀`, `S_a`, `Ŝ_a` and `Ŝ`.
pub fn action_constants(well: &RadialWell, l: f64, tol: f64) -> Result<ActionConstants> {
    if !(l > 2.0 * well.a()) {
        return Err(invalid("action_constants", format!("need L > 2a, got L = {l}, a = {}", well.a())));
    }
    let a = well.a();
    let d = |r: f64| agmon_d(well, r, tol);
    let s0 = d(l);
    let s_hat_a = d(l - a);
    let s_a = d(a) + s_hat_a;
    let g = |r: f64| l * r / 2.0 + d(r) + d(l - r);
    let sc = scan(g, 0.0, a, 201);
    let (lo, hi) = sc.bracket();
    let (mut r_hat, mut s_hat) = golden_section(g, lo, hi, 1e-10 * a);
    if sc.values[sc.argmin] < s_hat {
        r_hat = sc.xs[sc.argmin];
        s_hat = sc.values[sc.argmin];
    }
    Ok(ActionConstants { s0, s_a, s_hat_a, s_hat, r_hat })
}

/// `F(v₀)`.
pub fn f_constant(well: &RadialWell, tol: f64) -> f64 {
    let a = well.a();
    let v = well.depth();
    let s = (a * a + 4.0 * v).sqrt();
    a / 4.0 * s + v / 2.0 * ((s + a) * (s + a) / (4.0 * v)).ln() - agmon_d(well, a, tol)
}

/// `Ψ(r, t)` with a precomputed `d(r)`.
fn psi_with(d_r: f64, depth: f64, l: f64, r: f64, t: f64) -> f64 {
    d_r + (r * r + l * l) / 4.0 * (2.0 * t + 1.0) + depth / 2.0 * (1.0 / t).ln_1p() - l * r * (t * (t + 1.0)).sqrt()
}

/// `Ψ(r,t) = d(r) + (r²+L²)(2t+1)/4 + (|v₀^min|/2)·ln(1+1/t) − Lr√(t(t+1))`.
pub fn psi(well: &RadialWell, l: f64, r: f64, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(invalid("psi", format!("t = {t} must be positive")));
    }
    if !(r >= 0.0) {
        return Err(invalid("psi", format!("r = {r} must be nonnegative")));
    }
    Ok(psi_with(agmon_d(well, r, 1e-13), well.depth(), l, r, t))
}

const T_CLIP: (f64, f64) = (1e-9, 1e6);

/// Minimum of `Ψ` over `[r_lo, r_hi] × (0, ∞)`: a 128 × 128 grid (uniform in
/// `r`, logarithmic in `t ∈ [1e−6, 1e3]`) followed by a simplex refinement in
/// `(r, ln t)`.
fn minimize_psi(well: &RadialWell, l: f64, r_lo: f64, r_hi: f64, tol: f64) -> (f64, f64, f64) {
    let depth = well.depth();
    let nr = 128;
    let nt = 128;
    let (lt0, lt1) = (1e-6f64.ln(), 1e3f64.ln());
    let mut best = (f64::INFINITY, r_lo, 1.0);
    for i in 0..nr {
        let r = r_lo + (r_hi - r_lo) * i as f64 / (nr - 1) as f64;
        let dr = agmon_d(well, r, tol);
        for j in 0..nt {
            let t = (lt0 + (lt1 - lt0) * j as f64 / (nt - 1) as f64).exp();
            let v = psi_with(dr, depth, l, r, t);
            if v < best.0 {
                best = (v, r, t);
            }
        }
    }
    let project = |p: [f64; 2]| [p[0].clamp(r_lo, r_hi), p[1].clamp(T_CLIP.0.ln(), T_CLIP.1.ln())];
    let f = |p: [f64; 2]| psi_with(agmon_d(well, p[0], tol), depth, l, p[0], p[1].exp());
    let step = [(r_hi - r_lo) / nr as f64, (lt1 - lt0) / nt as f64];
    let (x, v) = nelder_mead_2d(f, project, [best.1, best.2.ln()], step, 1e-15, 4000);
    if v < best.0 {
        (v, x[0], x[1].exp())
    } else {
        best
    }
}

/// Minimiser data of the decay rate `S(v₀, L) = −F(v₀) + inf Ψ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayRate {
    pub s: f64,
    pub f: f64,
    pub r_star: f64,
    pub t_star: f64,
}

/// `S(v₀, L)` with its minimiser; fails unless `S_a < S < Ŝ`.
pub fn decay_rate(well: &RadialWell, l: f64, tol: f64) -> Result<DecayRate> {
    let ac = action_constants(well, l, tol)?;
    let f = f_constant(well, tol);
    let (m, r_star, t_star) = minimize_psi(well, l, 0.0, well.a(), tol);
    let s = m - f;
    if !(ac.s_a < s && s < ac.s_hat) {
        return Err(check_failed(
            "s_constant",
            format!("S = {s} outside (S_a, S_hat) = ({}, {}); minimisation failed", ac.s_a, ac.s_hat),
        ));
    }
    Ok(DecayRate { s, f, r_star, t_star })
}

/// `S(v₀, L)`.
pub fn s_constant(well: &RadialWell, l: f64, tol: f64) -> Result<f64> {
    Ok(decay_rate(well, l, tol)?.s)
}

/// All tunnelling constants of a `(v₀, L)` pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ActionSet {
    pub s0: f64,
    pub s_a: f64,
    pub s_hat_a: f64,
    pub s_hat: f64,
    pub f: f64,
    pub s: f64,
    pub r_star: f64,
    pub t_star: f64,
    pub regime: Regime,
}

pub fn action_set(well: &RadialWell, l: f64, tol: f64) -> Result<ActionSet> {
    let ac = action_constants(well, l, tol)?;
    let dr = decay_rate(well, l, tol)?;
    Ok(ActionSet {
        s0: ac.s0,
        s_a: ac.s_a,
        s_hat_a: ac.s_hat_a,
        s_hat: ac.s_hat,
        f: dr.f,
        s: dr.s,
        r_star: dr.r_star,
        t_star: dr.t_star,
        regime: regime(well.a(), l)?,
    })
}

/// `b·S(b⁻²v₀, L)`.
pub fn scaled_energy(well: &RadialWell, l: f64, b: f64, tol: f64) -> Result<f64> {
    if !(b > 0.0) {
        return Err(invalid("scaled_energy", format!("b = {b} must be positive")));
    }
    Ok(b * s_constant(&well.scaled(b), l, tol)?)
}

/// `2∫₀^{L/2} √(v₀ − v₀^min) dρ`, the small-`b` limit of [`scaled_energy`].
pub fn small_b_limit(well: &RadialWell, l: f64, tol: f64) -> f64 {
    let c = well.depth();
    let f = |p: f64| (well.eval(p) + c).max(0.0).sqrt();
    let half = l / 2.0;
    let inner = half.min(well.a());
    2.0 * (adaptive_simpson(&f, 0.0, inner, tol) + (half - inner).max(0.0) * c.sqrt())
}

/// `t* = √(1/4 + |v₀^min|/a²) − 1/2`.
pub fn t_star(a: f64, depth: f64) -> f64 {
    (0.25 + depth / (a * a)).sqrt() - 0.5
}

/// `G(t) = (|v₀^min|/2)·ln(1 + 1/t) + (a²/2)(t + 1/2)`.
pub fn g_function(a: f64, depth: f64, t: f64) -> f64 {
    depth / 2.0 * (1.0 / t).ln_1p() + a * a / 2.0 * (t + 0.5)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AppendixReport {
    /// Closed-form minimiser of `G`.
    pub t_star: f64,
    /// Numerical minimiser of `G` by golden section.
    pub t_numeric: f64,
    /// Central difference of `G` at `t*`.
    pub g_slope: f64,
    pub g_min: f64,
    /// `−F(v₀) + inf Ψ` over `[a, L−a] × (0, ∞)`.
    pub bound: f64,
    pub s_a: f64,
    /// `bound − S_a`.
    pub margin: f64,
    pub r_min: f64,
    pub t_min: f64,
}

/// Numerical verification of the lower bound `−F + inf Ψ ≥ S_a` on `[a, L−a]`.
pub fn appendix_a_check(well: &RadialWell, l: f64, tol: f64) -> Result<AppendixReport> {
    let ac = action_constants(well, l, tol)?;
    let (a, v) = (well.a(), well.depth());
    let ts = t_star(a, v);
    let (t_numeric, _) = golden_section(|t| g_function(a, v, t), 1e-9, 10.0 * (1.0 + ts), 1e-12);
    let dt = 1e-5 * ts.max(1e-3);
    let g_slope = (g_function(a, v, ts + dt) - g_function(a, v, ts - dt)) / (2.0 * dt);
    let g_min = g_function(a, v, ts);
    if (t_numeric - ts).abs() > 1e-6 * (1.0 + ts) {
        return Err(check_failed("appendix_a_check", format!("G minimiser {t_numeric} differs from t* = {ts}")));
    }
    let f = f_constant(well, tol);
    let (m, r_min, t_min) = minimize_psi(well, l, a, l - a, tol);
    let bound = m - f;
    let margin = bound - ac.s_a;
    if margin < -tol {
        return Err(check_failed(
            "appendix_a_check",
            format!("-F + inf Psi = {bound} < S_a = {} at (r, t) = ({r_min}, {t_min})", ac.s_a),
        ));
    }
    Ok(AppendixReport { t_star: ts, t_numeric, g_slope, g_min, bound, s_a: ac.s_a, margin, r_min, t_min })
}
