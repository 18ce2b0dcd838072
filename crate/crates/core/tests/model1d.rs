use braidlab::model1d::*;
use proptest::prelude::*;
use std::sync::OnceLock;

// Independent oracle: vertex-centred grid, ghost-node reflection for the
// Neumann end, Sturm bisection for the lowest eigenvalue, and Richardson
// extrapolation over two resolutions.

fn sturm_lowest(diag: &[f64], off: &[f64]) -> f64 {
    let count = |x: f64| {
        let mut c = 0;
        let mut q = diag[0] - x;
        if q < 0.0 {
            c += 1;
        }
        for i in 1..diag.len() {
            let q0 = if q == 0.0 { 1e-300 } else { q };
            q = diag[i] - x - off[i - 1] * off[i - 1] / q0;
            if q < 0.0 {
                c += 1;
            }
        }
        c
    };
    let (mut lo, mut hi) = (-1.0, 50.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if count(mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

fn oracle_half_line(xi: f64, t: f64, intervals: usize) -> f64 {
    let d = t / intervals as f64;
    let d2 = 1.0 / (d * d);
    let diag: Vec<f64> = (0..intervals).map(|i| 2.0 * d2 + (xi + i as f64 * d).powi(2)).collect();
    let mut off = vec![-d2; intervals - 1];
    off[0] = -(2f64).sqrt() * d2;
    sturm_lowest(&diag, &off)
}

fn oracle_step(theta: f64, xi: f64, t: f64, intervals: usize) -> f64 {
    let d = 2.0 * t / intervals as f64;
    let d2 = 1.0 / (d * d);
    let diag: Vec<f64> = (1..intervals)
        .map(|i| {
            let x = -t + i as f64 * d;
            let b = if x > 0.0 { 1.0 } else { theta };
            2.0 * d2 + (xi + b * x).powi(2)
        })
        .collect();
    sturm_lowest(&diag, &vec![-d2; intervals - 2])
}

fn richardson(f: impl Fn(usize) -> f64, n: usize) -> f64 {
    (4.0 * f(2 * n) - f(n)) / 3.0
}

fn oracle_mu(xi: f64) -> f64 {
    richardson(|n| oracle_half_line(xi, 14.0, n), 4000)
}

fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    while b - a > 1e-7 {
        let (c, d) = (b - r * (b - a), a + r * (b - a));
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Frozen output of the oracle above.
const MU_AT_MINUS_07682: f64 = 0.590106125004;
const THETA0: f64 = 0.590106124907;
const BETA_HALF: f64 = 0.391237469127;

fn dg() -> &'static DeGennesConstants {
    static DG: OnceLock<DeGennesConstants> = OnceLock::new();
    DG.get_or_init(|| degennes_constants(1e-6).unwrap())
}

fn half_line(nodes: usize) -> Grid1D {
    Grid1D::new(0.0, 14.0, nodes, Boundary::Neumann, Boundary::Dirichlet).unwrap()
}

fn mu_extrapolated(xi: f64, nodes: usize) -> f64 {
    let g = half_line(nodes);
    (4.0 * degennes_mu(xi, &g.refined()).unwrap() - degennes_mu(xi, &g).unwrap()) / 3.0
}

#[test]
fn oracle_reproduces_frozen_values() {
    let mu = oracle_mu(-0.7682);
    let (_, theta0) = golden_min(oracle_mu, -1.0, -0.5);
    let beta = golden_min(|x| richardson(|n| oracle_step(-0.5, x, 24.0, n), 8000), -1.5, -0.2).1;
    assert!((mu - MU_AT_MINUS_07682).abs() < 1e-9);
    assert!((theta0 - THETA0).abs() < 1e-9);
    assert!((beta - BETA_HALF).abs() < 1e-9);
}

#[test]
fn mu_at_zero_is_the_harmonic_ground_level() {
    assert!((mu_extrapolated(0.0, 4000) - 1.0).abs() < 1e-8);
}

#[test]
fn mu_matches_oracle() {
    assert!((mu_extrapolated(-0.7682, 4000) - MU_AT_MINUS_07682).abs() < 1e-8);
    let g = half_line(4000);
    assert!(degennes_mu(-0.7682, &g).unwrap() < degennes_mu(-0.3, &g).unwrap());
}

#[test]
fn second_order_convergence() {
    let g = half_line(500);
    let m: Vec<f64> = [g, g.refined(), g.refined().refined()].iter().map(|g| degennes_mu(-0.5, g).unwrap()).collect();
    let ratio = (m[0] - m[1]) / (m[1] - m[2]);
    assert!((ratio - 4.0).abs() < 0.05, "{ratio}");
}

#[test]
fn short_grid_is_rejected() {
    let g = Grid1D::new(0.0, 5.0, 100, Boundary::Neumann, Boundary::Dirichlet).unwrap();
    assert!(degennes_mu(-0.7, &g).is_err());
}

#[test]
fn de_gennes_constants() {
    let c = dg();
    assert!((c.theta0 - THETA0).abs() < 1e-8);
    assert!((c.xi0 + c.theta0.sqrt()).abs() < 1e-5);
    assert!(c.identity_residual < 1e-6);
    assert!(c.c1 > 0.0 && c.mu_second > 0.0);
    let n = c.u0.len();
    assert!(c.u0[..n - 1].iter().all(|u| *u > 0.0));
    let h = c.tau[1] - c.tau[0];
    let norm: f64 = c.u0.iter().map(|u| u * u).sum::<f64>() * h;
    assert!((norm - 1.0).abs() < 1e-10);
    for d in [0.05, 0.2, 0.5] {
        assert!(mu_extrapolated(c.xi0 + d, 2000) > c.theta0);
        assert!(mu_extrapolated(c.xi0 - d, 2000) > c.theta0);
    }
}

#[test]
fn de_gennes_tolerance_range() {
    assert!(degennes_constants(0.0).is_err());
    assert!(degennes_constants(1e-2).is_err());
}

#[test]
fn step_constants_at_minus_half() {
    let s = step_constants(-0.5, 1e-6).unwrap();
    assert!(s.zeta < 0.0);
    assert!(s.m3 < 0.0);
    assert!(s.mu_second > 0.0);
    assert!(s.beta > 0.0 && s.beta < 1.0);
    assert!((s.beta - BETA_HALF).abs() < 1e-7, "{}", s.beta);
}

#[test]
fn step_beta_stable_under_refinement() {
    let s = step_constants(-0.5, 1e-6).unwrap();
    let g = Grid1D::new(-24.0, 24.0, 9600, Boundary::Dirichlet, Boundary::Dirichlet).unwrap();
    let extrapolate = |g: &Grid1D| (4.0 * step_mu(-0.5, s.zeta, &g.refined()).unwrap() - step_mu(-0.5, s.zeta, g).unwrap()) / 3.0;
    let a = extrapolate(&g);
    let b = extrapolate(&g.refined());
    assert!((a - b).abs() < 1e-6);
    assert!((a - s.beta).abs() < 1e-6);
}

#[test]
fn step_mu_grows_with_xi() {
    let g = Grid1D::new(-24.0, 24.0, 4000, Boundary::Dirichlet, Boundary::Dirichlet).unwrap();
    let v: Vec<f64> = [0.5, 1.0, 2.0, 3.0].iter().map(|&x| step_mu(-0.5, x, &g).unwrap()).collect();
    assert!(v.windows(2).all(|w| w[1] > w[0]));
    assert!(v[1] > 1.0);
}

#[test]
fn step_rejects_bad_theta() {
    assert!(step_constants(0.2, 1e-6).is_err());
    assert!(step_constants(-1.0, 1e-6).is_err());
    let g = Grid1D::new(-12.0, 12.0, 400, Boundary::Dirichlet, Boundary::Dirichlet).unwrap();
    assert!(step_mu(0.0, -0.5, &g).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn flat_step_is_the_harmonic_oscillator(xi in -3.0f64..3.0) {
        let g = Grid1D::new(-16.0, 16.0, 8000, Boundary::Dirichlet, Boundary::Dirichlet).unwrap();
        let v = (4.0 * step_mu(1.0, xi, &g.refined()).unwrap() - step_mu(1.0, xi, &g).unwrap()) / 3.0;
        prop_assert!((v - 1.0).abs() < 1e-8);
    }

    #[test]
    fn theta0_is_the_band_minimum(xi in -3.0f64..1.0) {
        prop_assert!(mu_extrapolated(xi, 1500) >= dg().theta0 - 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(3))]

    #[test]
    fn step_m3_negative(theta in -0.9f64..-0.1) {
        let s = step_constants(theta, 1e-4).unwrap();
        prop_assert!(s.m3 < 0.0);
        prop_assert!(s.mu_second > 0.0);
        prop_assert!(s.zeta < 0.0);
    }
}
