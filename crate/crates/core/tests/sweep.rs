use braidlab::operator::{GridInfo, SparseHermitianOperator};
use braidlab::reduction::{PhaseLaw, SiteMap};
use braidlab::sparse::CsrMatrix;
use braidlab::strip2d::{smoothed_triangle, strip_sweep, FiberConstants, StripGrid, StripSweepOptions};
use braidlab::sweep::{i1_from_sectors, linear_fit, relabel, run_sweep, sector_energies, SolverParams, SweepPlan};
use braidlab::Result;
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

fn dummy_grid() -> GridInfo {
    GridInfo::Strip { sigma_nodes: 0, tau_nodes: 0, d_sigma: 0.0, d_tau: 0.0, tau_min: 0.0, tau_max: 0.0 }
}

/// `c + ρ(e^{iθ}S + e^{−iθ}S†)` on `n` sites with `S` the cyclic shift.
fn circulant(n: usize, c: f64, rho: f64, theta: f64) -> SparseHermitianOperator {
    let t = C64::from_polar(rho, theta);
    let mut trip: Vec<(usize, usize, C64)> = (0..n).map(|i| (i, i, C64::new(c, 0.0))).collect();
    for i in 0..n {
        trip.push(((i + 1) % n, i, t));
        trip.push((i, (i + 1) % n, t.conj()));
    }
    SparseHermitianOperator {
        matrix: CsrMatrix::from_triplets(n, &trip),
        grid: dummy_grid(),
        points: vec![[0.0, 0.0]; n],
        symmetry: Some(SiteMap::roll(n, 1)),
        shift_hint: None,
    }
}

const ALPHA: f64 = 0.4;
const SLOPE: f64 = 0.9;

fn three_well(h: f64) -> Result<SparseHermitianOperator> {
    Ok(circulant(3, -1.0, 0.05, ALPHA + SLOPE / h))
}

#[test]
fn fit_and_relabel_basics() {
    let (s, c) = linear_fit(&[(0.0, 1.0), (1.0, 3.0), (2.0, 5.0)]).unwrap();
    assert!((s - 2.0).abs() < 1e-15 && (c - 1.0).abs() < 1e-15);
    assert!(linear_fit(&[(1.0, 1.0)]).is_none());
    assert!(linear_fit(&[(1.0, 1.0), (1.0, 2.0)]).is_none());
    // at θ = 0.1 branch 1 is highest and branch 2 lowest
    let b = relabel(&[-1.0, 0.0, 1.0], 0.1);
    assert_eq!(b, [1.0, -1.0, 0.0]);
}

#[test]
fn sectors_recover_the_interaction() {
    for theta in [0.3, 1.7, -2.5] {
        let op = circulant(3, 2.0, 0.7, theta);
        let d = op.matrix.to_dense();
        let e = d.symmetric_eigen();
        let mut idx: Vec<usize> = (0..3).collect();
        idx.sort_by(|&a, &b| e.eigenvalues[a].total_cmp(&e.eigenvalues[b]));
        let values: Vec<f64> = idx.iter().map(|&i| e.eigenvalues[i]).collect();
        let vectors: Vec<Vec<C64>> = idx.iter().map(|&i| e.eigenvectors.column(i).iter().copied().collect()).collect();
        let sec = sector_energies(&values, &vectors, op.symmetry.as_ref().unwrap()).unwrap();
        let mut sorted = sec.clone();
        sorted.sort_by(f64::total_cmp);
        for (a, b) in sorted.iter().zip(&values) {
            assert!((a - b).abs() < 1e-12);
        }
        let i1 = i1_from_sectors(&sec);
        assert!((i1.norm() - 0.7).abs() < 1e-12);
        // the sector energies are 2 + 2ρcos(arg I₁ + 2π(k−1)/3)
        for (k, ek) in sec.iter().enumerate() {
            let exact = 2.0 + 1.4 * (i1.arg() + 2.0 * PI * k as f64 / 3.0).cos();
            assert!((ek - exact).abs() < 1e-12);
        }
    }
}

#[test]
fn crossings_of_an_exact_braid() {
    let hs: Vec<f64> = (0..40).map(|i| 1.0 / (2.0 + 0.25 * i as f64)).collect();
    let plan = SweepPlan {
        n: 3,
        m: 3,
        law: PhaseLaw::InverseH,
        slope: Some(SLOPE),
        solver: SolverParams::default(),
        crossings: true,
        build: &three_well,
    };
    let r = run_sweep(&plan, &hs).unwrap();
    let (g_lo, g_hi) = (1.0 / hs[0], 1.0 / hs[hs.len() - 1]);
    // gaps close wherever θ is a multiple of π/3
    let exact: Vec<f64> = (0..100)
        .map(|j| (j as f64 * PI / 3.0 - ALPHA) / SLOPE)
        .filter(|g| *g > g_lo && *g < g_hi)
        .collect();
    assert_eq!(r.crossings.len(), exact.len());
    for (c, g) in r.crossings.iter().zip(&exact) {
        assert!((c.g - g).abs() < 1e-4, "{} vs {g}", c.g);
        assert!(c.branches.is_some());
    }
    assert!(r.crossings.windows(2).all(|w| w[0].lower != w[1].lower));
    let p = r.prediction.as_ref().unwrap();
    assert_eq!(p.crossings.len(), exact.len());
    for (c, g) in p.crossings.iter().zip(&exact) {
        assert!((c.g - g).abs() < 1e-4);
    }
    for row in &r.rows {
        assert!((row.i1.unwrap().norm() - 0.05).abs() < 1e-12);
        let b = row.branches.as_ref().unwrap();
        let th = row.theta_fit.unwrap();
        for (k, v) in b.iter().enumerate() {
            assert!((v - (-1.0 + 0.1 * (th + 2.0 * PI * k as f64 / 3.0).cos())).abs() < 1e-6);
        }
    }
    assert!(r.rate.is_none());
}

#[test]
fn crossings_without_symmetry() {
    let build = |h: f64| {
        let mut op = three_well(h)?;
        op.symmetry = None;
        Ok(op)
    };
    let hs: Vec<f64> = (0..40).map(|i| 1.0 / (2.0 + 0.25 * i as f64)).collect();
    let plan = SweepPlan { n: 3, m: 3, law: PhaseLaw::InverseH, slope: None, solver: SolverParams::default(), crossings: true, build: &build };
    let r = run_sweep(&plan, &hs).unwrap();
    let (g_lo, g_hi) = (1.0 / hs[0], 1.0 / hs[hs.len() - 1]);
    let n_exact = (0..100).map(|j| (j as f64 * PI / 3.0 - ALPHA) / SLOPE).filter(|g| *g > g_lo && *g < g_hi).count();
    assert_eq!(r.crossings.len(), n_exact);
    assert!(r.crossings.iter().all(|c| c.branches.is_none()));
    assert!(r.prediction.is_none());
}

#[test]
fn double_well_rate() {
    // gap 2e^{−1.3/h}
    let build = |h: f64| Ok(circulant(2, 0.0, -(-1.3 / h).exp() / 2.0, 0.0));
    let hs = [0.5, 0.4, 0.3, 0.2];
    let plan = SweepPlan { n: 2, m: 2, law: PhaseLaw::InverseH, slope: None, solver: SolverParams::default(), crossings: true, build: &build };
    let r = run_sweep(&plan, &hs).unwrap();
    let fit = r.rate.unwrap();
    assert!((fit.s - 1.3).abs() < 1e-9, "{}", fit.s);
    assert!((fit.intercept - 2f64.ln()).abs() < 1e-8);
    assert_eq!(fit.points, 4);
    assert!(r.crossings.is_empty());
}

#[test]
fn sweep_input_checks() {
    let plan = SweepPlan { n: 3, m: 3, law: PhaseLaw::InverseH, slope: None, solver: SolverParams::default(), crossings: true, build: &three_well };
    assert!(run_sweep(&plan, &[0.3]).is_err());
    assert!(run_sweep(&plan, &[0.2, 0.3]).is_err());
    assert!(run_sweep(&plan, &[0.3, 0.0]).is_err());
    let low = SweepPlan { m: 2, ..plan };
    assert!(run_sweep(&low, &[0.3, 0.2]).is_err());
}

#[test]
fn strip_sweep_smoke() {
    let fiber = FiberConstants::Neumann(braidlab::model1d::degennes_constants(1e-6).unwrap());
    let curve = smoothed_triangle(PI, 0.4, 3).unwrap();
    let opts = StripSweepOptions {
        grid: None,
        crossings: false,
        solver: SolverParams::default(),
    };
    let s = strip_sweep(&curve, &fiber, &[0.004, 0.003], 4, &opts).unwrap();
    assert_eq!(s.leading.len(), 2);
    assert!(s.actions.s_n > 0.0 && s.actions.phi > 0.0);
    for (row, res) in s.result.rows.iter().zip(s.leading_residuals()) {
        assert!(row.values.windows(2).all(|w| w[1] >= w[0]));
        assert_eq!(row.sectors.as_ref().unwrap().len(), 3);
        assert!(row.residual <= 1e-10);
        assert!(res.abs() < 0.05, "{res}");
    }
    assert!(strip_sweep(&curve, &fiber, &[0.004, 0.003], 2, &opts).is_err());
    let fixed = StripSweepOptions { grid: Some(StripGrid { sigma_nodes: 96, tau_nodes: 40 }), ..opts };
    assert!(strip_sweep(&curve, &fiber, &[0.02, 0.015], 4, &fixed).is_ok());
}
