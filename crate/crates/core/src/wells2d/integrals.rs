use super::radial::{radial_grid, radial_single_well, RadialGroundState};
use super::WellConfig;
use crate::actions::RadialWell;
use crate::error::{check_failed, invalid, Result};
use crate::numeric::quad::gauss_legendre_on;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Radial cells per unit length used when the integrals build their own
/// ground state.
pub const RADIAL_CELLS_PER_UNIT: f64 = 4000.0;
/// Trapezoid nodes in the angle.
pub const ANGLE_NODES: usize = 1 << 10;
const GL_ORDER: usize = 16;

/// Ground state on `(0, extent)` at the default radial resolution.
pub fn ground_state(h: f64, well: &RadialWell, extent: f64) -> Result<RadialGroundState> {
    let cells = (extent * RADIAL_CELLS_PER_UNIT).ceil() as usize;
    radial_single_well(h, well, &radial_grid(extent, cells.max(16)))
}

/// `∫_{r₀<|x|<r₁} weight(|x|) u(|x|) u(|x + (L,0)|) e^{iLx₂/2h} dx` in polar
/// coordinates: composite Gauss–Legendre in `r`, panels doubled until the
/// relative change is below `tol`, trapezoid in the angle.
fn polar_overlap<W: Fn(f64) -> f64>(
    g: &RadialGroundState,
    weight: W,
    l: f64,
    r0: f64,
    r1: f64,
    tol: f64,
) -> C64 {
    let h = g.h;
    let trig: Vec<(f64, f64)> = (0..ANGLE_NODES).map(|k| (2.0 * PI * k as f64 / ANGLE_NODES as f64).sin_cos()).collect();
    let eval = |panels: usize| -> C64 {
        let width = (r1 - r0) / panels as f64;
        let mut acc = C64::new(0.0, 0.0);
        for p in 0..panels {
            let a = r0 + p as f64 * width;
            let (xs, ws) = gauss_legendre_on(GL_ORDER, a, a + width);
            for (r, wr) in xs.into_iter().zip(ws) {
                let base = weight(r) * g.eval(r) * r * wr;
                if base == 0.0 {
                    continue;
                }
                let mut ring = C64::new(0.0, 0.0);
                for &(s, c) in &trig {
                    let far = (r * r + l * l + 2.0 * l * r * c).sqrt();
                    ring += C64::from_polar(g.eval(far), l * r * s / (2.0 * h));
                }
                acc += ring * base;
            }
        }
        acc * (2.0 * PI / ANGLE_NODES as f64)
    };
    let mut panels = 4;
    let mut prev = eval(panels);
    while panels < 1024 {
        panels *= 2;
        let next = eval(panels);
        let done = (next - prev).norm() <= tol * next.norm().max(f64::MIN_POSITIVE);
        prev = next;
        if done {
            break;
        }
    }
    prev
}

/// The hopping coefficient `c_h(v₀, L)` computed from a given ground state.
pub fn hopping_from(g: &RadialGroundState, well: &RadialWell, l: f64, quad_tol: f64) -> Result<C64> {
    let a = well.a();
    if l <= 2.0 * a {
        return Err(invalid("hopping", format!("need L > 2a, got L={l}, a={a}")));
    }
    if g.extent() < l + a {
        return Err(invalid("hopping", format!("radial extent {} below L + a = {}", g.extent(), l + a)));
    }
    let c = polar_overlap(g, |r| well.eval(r), l, 0.0, a, quad_tol);
    if c == C64::new(0.0, 0.0) {
        return Ok(c);
    }
    if c.re >= 0.0 || c.im.abs() > quad_tol * c.re.abs() {
        return Err(check_failed("hopping", format!("expected a negative real value, got {c} at h={}", g.h)));
    }
    Ok(c)
}

/// The hopping coefficient `c_h(v₀, L)`.
pub fn hopping(h: f64, well: &RadialWell, l: f64, quad_tol: f64) -> Result<C64> {
    let g = ground_state(h, well, l + well.a() + 2.0)?;
    hopping_from(&g, well, l, quad_tol)
}

/// The overlap `w = ∫_{D(0,L)} u_h(x) u_h(x + (L,0)) e^{iLx₂/2h} dx` and its
/// pieces over `D(0,a)`, the annulus up to `L − a` and the outer annulus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Overlap {
    pub w: C64,
    pub w1: C64,
    pub w2: C64,
    pub w3: C64,
}

pub fn overlap_w(h: f64, well: &RadialWell, l: f64) -> Result<Overlap> {
    let a = well.a();
    if l <= 2.0 * a {
        return Err(invalid("overlap_w", format!("need L > 2a, got L={l}, a={a}")));
    }
    let g = ground_state(h, well, 2.0 * l + 1.0)?;
    Ok(overlap_from(&g, a, l, 1e-10))
}

pub fn overlap_from(g: &RadialGroundState, a: f64, l: f64, tol: f64) -> Overlap {
    let one = |_: f64| 1.0;
    let w1 = polar_overlap(g, one, l, 0.0, a, tol);
    let w2 = polar_overlap(g, one, l, a, l - a, tol);
    let w3 = polar_overlap(g, one, l, l - a, l, tol);
    Overlap { w: w1 + w2 + w3, w1, w2, w3 }
}

/// Interaction coefficients of the `n`-well operator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JCoefficients {
    pub j0: f64,
    pub j1: C64,
    pub hopping: C64,
    /// `φ_n`.
    pub phi_n: f64,
    /// Flux through the well polygon over `2π`, reported for `n = 3`.
    pub flux: Option<f64>,
    pub lambda: f64,
}

/// `φ_n = −L² sin(2π/n) / (2 − 2cos(2π/n))`.
pub fn phi_n(n: usize, l: f64) -> f64 {
    let t = 2.0 * PI / n as f64;
    -l * l * t.sin() / (2.0 - 2.0 * t.cos())
}

/// `Φ = √3 L² / (8π)`.
pub fn triangle_flux(l: f64) -> f64 {
    3f64.sqrt() * l * l / (8.0 * PI)
}

/// `J₀`, `J₁ ≈ e^{iφ_n/2h} c_h` and the flux data for `n ∈ {2, 3}`.
///
/// `J₀ = (n−1) ∫_{D(0,a)} v₀(y) u_h(|y + (L,0)|)² dy`, which is `⟨T u₁, u₁⟩`
/// up to cut-off corrections far below it.
pub fn j_coefficients(h: f64, config: &WellConfig) -> Result<JCoefficients> {
    if !matches!(config.n, 2 | 3) {
        return Err(invalid("j_coefficients", format!("n = {} unsupported; need 2 or 3", config.n)));
    }
    let well = config.scaled_well();
    let hb = h / config.b;
    let l = config.l;
    let g = ground_state(hb, &well, l + well.a() + 2.0)?;
    let c = hopping_from(&g, &well, l, 1e-6)?;
    let a = well.a();
    let j0 = (config.n - 1) as f64 * polar_square(&g, &well, l, a);
    let phi = phi_n(config.n, l);
    let scale = config.b * config.b;
    Ok(JCoefficients {
        j0: j0 * scale,
        j1: C64::from_polar(1.0, phi / (2.0 * hb)) * c * scale,
        hopping: c * scale,
        phi_n: phi,
        flux: (config.n == 3).then(|| triangle_flux(l) * config.b),
        lambda: g.lambda * scale,
    })
}

fn polar_square(g: &RadialGroundState, well: &RadialWell, l: f64, a: f64) -> f64 {
    let panels = 64;
    let width = a / panels as f64;
    let mut acc = 0.0;
    for p in 0..panels {
        let r0 = p as f64 * width;
        let (xs, ws) = gauss_legendre_on(GL_ORDER, r0, r0 + width);
        for (r, wr) in xs.into_iter().zip(ws) {
            let mut ring = 0.0;
            for k in 0..ANGLE_NODES {
                let c = (2.0 * PI * k as f64 / ANGLE_NODES as f64).cos();
                let u = g.eval((r * r + l * l + 2.0 * l * r * c).sqrt());
                ring += u * u;
            }
            acc += well.eval(r) * ring * r * wr;
        }
    }
    acc * 2.0 * PI / ANGLE_NODES as f64
}
