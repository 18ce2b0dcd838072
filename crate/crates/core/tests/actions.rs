use braidlab::actions::*;
use proptest::prelude::*;

const V0: f64 = 1.0;
const A: f64 = 0.625;

fn well() -> RadialWell {
    RadialWell::bump(V0, A).unwrap()
}

fn bump(r: f64) -> f64 {
    if r >= A {
        0.0
    } else {
        -V0 * (1.0 - A * A / (A * A - r * r)).exp()
    }
}

/// Cumulative midpoint table of `d` on `[0, r_max]`.
struct DTable {
    dx: f64,
    cum: Vec<f64>,
}

impl DTable {
    fn new(r_max: f64, panels: usize) -> Self {
        let dx = r_max / panels as f64;
        let mut cum = Vec::with_capacity(panels + 1);
        let mut acc = 0.0;
        cum.push(0.0);
        for i in 0..panels {
            let p = (i as f64 + 0.5) * dx;
            acc += (p * p / 4.0 + bump(p) + V0).sqrt() * dx;
            cum.push(acc);
        }
        Self { dx, cum }
    }

    fn d(&self, r: f64) -> f64 {
        let x = r / self.dx;
        let i = (x.floor() as usize).min(self.cum.len() - 2);
        let f = x - i as f64;
        self.cum[i] * (1.0 - f) + self.cum[i + 1] * f
    }
}

fn oracle_f() -> f64 {
    let n = 1_000_000;
    let dx = A / n as f64;
    (0..n)
        .map(|i| {
            let p = (i as f64 + 0.5) * dx;
            ((p * p / 4.0 + V0).sqrt() - (p * p / 4.0 + bump(p) + V0).sqrt()) * dx
        })
        .sum()
}

fn oracle_psi(t: &DTable, l: f64, r: f64, tt: f64) -> f64 {
    t.d(r) + (r * r + l * l) / 4.0 * (2.0 * tt + 1.0) + V0 / 2.0 * (1.0 + 1.0 / tt).ln() - l * r * (tt * (tt + 1.0)).sqrt()
}

fn golden(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..80 {
        let (c, d) = (b - g * (b - a), a + g * (b - a));
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    0.5 * (a + b)
}

/// Frozen outputs of the oracles above for the default well at `L = 4a`.
const D_A: f64 = 0.352089092708;
const S_HAT_4A: f64 = 2.736011493762;
const S_4A: f64 = 2.482690566834;

#[test]
fn oracles_reproduce_frozen_values() {
    let l = 4.0 * A;
    let table = DTable::new(l, 4_000_000);
    let n = 100_000;
    let s_hat = (1..n)
        .map(|i| A * i as f64 / n as f64)
        .map(|r| l * r / 2.0 + table.d(r) + table.d(l - r))
        .fold(f64::INFINITY, f64::min);
    let (lt0, lt1) = (1e-6f64.ln(), 1e3f64.ln());
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for i in 0..400 {
        let r = A * i as f64 / 399.0;
        for j in 0..400 {
            let lt = lt0 + (lt1 - lt0) * j as f64 / 399.0;
            let v = oracle_psi(&table, l, r, lt.exp());
            if v < best.0 {
                best = (v, r, lt);
            }
        }
    }
    let (_, mut r, mut lt) = best;
    for _ in 0..60 {
        r = golden(|x| oracle_psi(&table, l, x, lt.exp()), (r - 0.05).max(0.0), (r + 0.05).min(A));
        lt = golden(|y| oracle_psi(&table, l, r, y.exp()), lt - 1.0, lt + 1.0);
    }
    let s = oracle_psi(&table, l, r, lt.exp()) - oracle_f();
    assert!((table.d(A) - D_A).abs() < 1e-10);
    assert!((s_hat - S_HAT_4A).abs() < 1e-10);
    assert!((s - S_4A).abs() < 1e-8);
}

#[test]
fn agmon_d_trivial_cases() {
    let z = RadialWell::zero(1.0);
    assert!((agmon_d(&z, 2.0, 1e-12) - 1.0).abs() < 1e-12);
    assert_eq!(agmon_d(&well(), 0.0, 1e-12), 0.0);
}

#[test]
fn agmon_d_matches_midpoint_oracle() {
    let table = DTable::new(A, 1_000_000);
    assert!((agmon_d(&well(), A, 1e-12) - table.d(A)).abs() < 1e-9);
    assert!((agmon_d(&well(), A, 1e-12) - D_A).abs() < 1e-9);
}

#[test]
fn action_constants_match_scan() {
    let c = action_constants(&well(), 4.0 * A, 1e-12).unwrap();
    assert!((c.s_hat - S_HAT_4A).abs() < 1e-7);
    assert!(c.s_hat_a < c.s_a && c.s_a < c.s_hat);
    assert!(c.s_hat < c.s0.min(4.0 * A * A / 2.0 + c.s_a));
    assert!(2.0 * c.s_hat_a > c.s_hat);
}

#[test]
fn action_constants_need_separated_wells() {
    assert!(action_constants(&well(), 2.0 * A, 1e-10).is_err());
    assert!(matches!(regime(A, 3.0 * A), Ok(Regime::Unproven)));
    assert!(matches!(regime(A, 4.0 * A), Ok(Regime::Proven)));
}

#[test]
fn wide_separation_second_claim() {
    let c = action_constants(&well(), 4.5 * A, 1e-12).unwrap();
    assert!(2.0 * c.s_hat_a > c.s_hat);
}

#[test]
fn decay_rate_matches_grid_oracle() {
    let s = s_constant(&well(), 4.0 * A, 1e-12).unwrap();
    assert!((s - S_4A).abs() < 1e-5);
    let set = action_set(&well(), 4.0 * A, 1e-12).unwrap();
    assert!(set.s_a < set.s && set.s < set.s_hat);
    assert!((set.f - oracle_f()).abs() < 1e-9);
}

#[test]
fn psi_formula() {
    let w = well();
    let l = 4.0 * A;
    for t in [0.01, 0.5, 3.0] {
        let expect = (l * l / 4.0) * (2.0 * t + 1.0) + V0 / 2.0 * (1.0 + 1.0 / t).ln();
        assert!((psi(&w, l, 0.0, t).unwrap() - expect).abs() < 1e-12 * expect);
    }
    let table = DTable::new(l, 1_000_000);
    for (r, t) in [(0.1, 0.2), (0.4, 1.5), (0.6, 0.01)] {
        assert!((psi(&w, l, r, t).unwrap() - oracle_psi(&table, l, r, t)).abs() < 1e-9);
    }
    assert!(psi(&w, l, 0.1, 0.0).is_err());
    let d = decay_rate(&w, l, 1e-12).unwrap();
    for r in [0.0, 0.3, A] {
        assert!(psi(&w, l, r, 1e3).unwrap() > psi(&w, l, d.r_star, d.t_star).unwrap());
    }
}

#[test]
fn unit_scaling_is_identity() {
    let l = 4.0 * A;
    let s = s_constant(&well(), l, 1e-12).unwrap();
    assert!((scaled_energy(&well(), l, 1.0, 1e-12).unwrap() - s).abs() < 1e-12);
    assert!((s_constant(&well().scaled(1.0), l, 1e-12).unwrap() - s).abs() < 1e-12);
}

#[test]
fn small_field_limit() {
    let l = 4.0 * A;
    let n = 1_000_000;
    let dx = l / 2.0 / n as f64;
    let limit: f64 = 2.0 * (0..n).map(|i| (bump((i as f64 + 0.5) * dx) + V0).sqrt() * dx).sum::<f64>();
    assert!((small_b_limit(&well(), l, 1e-12) - limit).abs() < 1e-8);
    let errs: Vec<f64> =
        [1.0, 0.5, 0.25, 0.125].iter().map(|&b| (scaled_energy(&well(), l, b, 1e-10).unwrap() - limit).abs()).collect();
    assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
    let e = (scaled_energy(&well(), l, 0.1, 1e-10).unwrap() - limit).abs();
    assert!(e < 0.05 * limit);
}

#[test]
fn t_star_closed_form() {
    assert!((t_star(1.0, 2.0) - 1.0).abs() < 1e-15);
    assert!((t_star(1.0, 0.25) - (0.5f64.sqrt() - 0.5)).abs() < 1e-15);
}

#[test]
fn appendix_bound_default_well() {
    let r = appendix_a_check(&well(), 4.0 * A, 1e-10).unwrap();
    assert!(r.margin >= -1e-8);
    assert!(r.g_slope.abs() < 1e-6 * r.g_min.abs());
    assert!((r.t_numeric - r.t_star).abs() < 1e-6);
}

#[test]
fn custom_profile_validation() {
    assert!(RadialWell::custom(|r| if r < 1.0 { -(1.0 - r * r).powi(3) } else { 0.0 }, 1.0, 6.0).is_ok());
    assert!(RadialWell::custom(|r| if r < 1.0 { 0.5 - r } else { 0.0 }, 1.0, 1.0).is_err());
    assert!(RadialWell::custom(|_| -1.0, 1.0, 1.0).is_err());
    assert!(RadialWell::bump(-1.0, 1.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn agmon_d_monotone(r1 in 0.0f64..3.0, dr in 0.0f64..2.0) {
        let w = well();
        let r2 = r1 + dr;
        let (d1, d2) = (agmon_d(&w, r1, 1e-12), agmon_d(&w, r2, 1e-12));
        prop_assert!(d2 >= d1 - 1e-12);
        if r1 >= A {
            prop_assert!(d2 - d1 >= (r2 * r2 - r1 * r1) / 4.0 - 1e-12);
        }
    }

    #[test]
    fn ordering_chain(v0 in 0.3f64..3.0, a in 0.3f64..1.2, ratio in 2.1f64..6.0) {
        let w = RadialWell::bump(v0, a).unwrap();
        let l = ratio * a;
        let s = action_set(&w, l, 1e-10).unwrap();
        prop_assert!(s.s_hat_a < s.s_a && s.s_a < s.s_hat);
        prop_assert!(s.s_hat < s.s0.min(l * a / 2.0 + s.s_a));
        prop_assert!(s.s_a < s.s && s.s < s.s_hat);
        if l >= 4.0 * a {
            prop_assert!(2.0 * s.s_hat_a > s.s_hat);
        }
    }

    #[test]
    fn g_minimised_at_t_star(a in 0.2f64..2.0, depth in 0.1f64..5.0) {
        let t = t_star(a, depth);
        let dt = 1e-5 * t;
        let slope = (g_function(a, depth, t + dt) - g_function(a, depth, t - dt)) / (2.0 * dt);
        prop_assert!(slope.abs() < 1e-6 * g_function(a, depth, t));
    }
}
