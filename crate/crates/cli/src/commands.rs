//! Dispatch of a validated configuration to the numerical routines.

use crate::config::{Command, RunConfig};
use crate::output::{Cell, Report};
use anyhow::Context;
use braidlab::actions::{action_set, scaled_energy, RadialWell};
use braidlab::model1d::{degennes_constants, step_constants};
use braidlab::reduction::{hermitian_norm, predict_crossings, spectral_reduce, synth_testbed, PhaseLaw};
use braidlab::strip2d::{smoothed_triangle, strip_sweep, FiberConstants, StripGrid, StripSweepOptions};
use braidlab::sweep::{SolverParams, SweepResult};
use braidlab::wells2d::{gap_sweep, hopping, SweepOptions, WellConfig};
use braidlab::Lattice;
use rayon::prelude::*;

/// Tolerance of the band-function constants behind strip sweeps.
const FIBER_TOL: f64 = 1e-8;

pub fn run(cfg: &RunConfig) -> anyhow::Result<Report> {
    let report = match cfg.command {
        Command::Constants => constants(cfg),
        Command::Actions => actions(cfg),
        Command::ReduceDemo => reduce_demo(cfg),
        Command::WellsHopping => wells_hopping(cfg),
        Command::WellsSweep => wells_sweep(cfg),
        Command::StripSweep => strip(cfg),
        Command::Predict => predict(cfg),
    };
    report.with_context(|| format!("`{}` failed with {}", cfg.command.name(), summary(cfg)))
}

fn summary(cfg: &RunConfig) -> String {
    cfg.params.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(", ")
}

fn well(cfg: &RunConfig) -> anyhow::Result<RadialWell> {
    Ok(RadialWell::bump(cfg.real("V0"), cfg.real("a"))?)
}

fn solver(cfg: &RunConfig) -> SolverParams {
    SolverParams { tol: cfg.real("tol"), seed: cfg.seed }
}

/// `steps` values of `h` in `[lo, hi]`, descending, evenly spaced in the
/// abscissa `g` of `law`.
pub fn h_list(lo: f64, hi: f64, steps: usize, law: PhaseLaw) -> Vec<f64> {
    let (g0, g1) = (law.g(hi), law.g(lo));
    (0..steps).map(|i| law.h(g0 + (g1 - g0) * i as f64 / (steps - 1) as f64)).collect()
}

fn constants(cfg: &RunConfig) -> anyhow::Result<Report> {
    let tol = cfg.real("tol");
    Ok(match cfg.opt_real("theta") {
        None => {
            let c = degennes_constants(tol)?;
            Report::record(vec![
                ("theta0", c.theta0.into()),
                ("xi0", c.xi0.into()),
                ("c1", c.c1.into()),
                ("mu_second", c.mu_second.into()),
                ("identity_residual", c.identity_residual.into()),
            ])
        }
        Some(theta) => {
            let c = step_constants(theta, tol)?;
            Report::record(vec![
                ("theta", c.theta.into()),
                ("beta", c.beta.into()),
                ("zeta", c.zeta.into()),
                ("mu_second", c.mu_second.into()),
                ("m3", c.m3.into()),
                ("phi0", c.phi0.into()),
                ("dphi0", c.dphi0.into()),
            ])
        }
    })
}

fn actions(cfg: &RunConfig) -> anyhow::Result<Report> {
    let (w, l, b, tol) = (well(cfg)?, cfg.real("L"), cfg.real("b"), cfg.real("tol"));
    let s = action_set(&w, l, tol)?;
    let scaled = scaled_energy(&w, l, b, tol)?;
    Ok(Report::record(vec![
        ("s0", s.s0.into()),
        ("s_a", s.s_a.into()),
        ("s_hat_a", s.s_hat_a.into()),
        ("s_hat", s.s_hat.into()),
        ("f", s.f.into()),
        ("s", s.s.into()),
        ("r_star", s.r_star.into()),
        ("t_star", s.t_star.into()),
        ("scaled_s", scaled.into()),
        ("regime", regime_name(s.regime).into()),
        ("rate_assumption", yes_no(2.0 * s.s_hat_a > s.s).into()),
    ]))
}

fn regime_name(r: braidlab::actions::Regime) -> &'static str {
    match r {
        braidlab::actions::Regime::Proven => "proven",
        braidlab::actions::Regime::Unproven => "unproven",
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn reduce_demo(cfg: &RunConfig) -> anyhow::Result<Report> {
    let (sites, wells, barrier) = (cfg.usize("sites"), cfg.usize("wells"), cfg.real("barrier"));
    let (lo, hi, steps) = cfg.sweep("phase_sweep");
    let phases: Vec<f64> =
        (0..steps).map(|i| if steps == 1 { lo } else { lo + (hi - lo) * i as f64 / (steps - 1) as f64 }).collect();
    let rows = phases
        .par_iter()
        .map(|&phase| -> anyhow::Result<Vec<Cell>> {
            let t = synth_testbed(sites, wells, barrier, phase)?;
            let r = spectral_reduce(&t.operator, &t.family, wells)?;
            let circ = r.circulant.as_ref().context("testbed without cyclic symmetry")?;
            let mut row: Vec<Cell> = vec![phase.into()];
            row.extend(r.eigenvalues.iter().map(|&e| Cell::from(e)));
            row.push(circ.coeffs[0].re.into());
            row.push(circ.coeffs[1].norm().into());
            row.push(circ.coeffs[1].arg().into());
            row.push(hermitian_norm(&r.r).into());
            Ok(row)
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    let lambdas: Vec<String> = (1..=wells).map(|k| format!("lambda{k}")).collect();
    let mut cols = vec!["phase"];
    cols.extend(lambdas.iter().map(String::as_str));
    cols.extend(["I0", "abs_I1", "theta", "norm_R"]);
    let mut rep = Report::new(&cols);
    rows.into_iter().for_each(|r| rep.push(r));
    rep.notes.push(format!("ring of {sites} sites, {wells} dips, barrier {barrier}; eigenvalues relative to the single-dip ground energy"));
    Ok(rep)
}

fn wells_hopping(cfg: &RunConfig) -> anyhow::Result<Report> {
    let (w, l, b, h) = (well(cfg)?, cfg.real("L"), cfg.real("b"), cfg.real("h"));
    let c = hopping(h / b, &w.scaled(b), l, cfg.real("tol"))? * (b * b);
    let s_ref = scaled_energy(&w, l, b, 1e-10)?;
    Ok(Report::record(vec![
        ("h", h.into()),
        ("re_c", c.re.into()),
        ("im_c", c.im.into()),
        ("rate", (-h * c.norm().ln()).into()),
        ("s_ref", s_ref.into()),
    ]))
}

fn crossing_notes(r: &SweepResult, notes: &mut Vec<String>) {
    for c in &r.crossings {
        let pair = c.branches.map_or(String::new(), |(a, b)| format!(", branches {a} and {b}"));
        notes.push(format!("crossing of gap{}{}: h = {}, g = {}{pair}", c.lower + 1, c.lower, c.h, c.g));
    }
    if let Some(p) = &r.prediction {
        notes.push(format!("fitted phase law: slope {}, alpha0 {}, orientation {}", p.slope, p.alpha0, r.orientation));
        for c in &p.crossings {
            notes.push(format!("predicted crossing: h = {}, g = {}, angle {}", c.h, c.g, c.angle.angle));
        }
    }
}

fn sweep_columns(first: &[&str], m: usize, last: &[&str]) -> Vec<String> {
    let mut cols: Vec<String> = first.iter().map(|s| s.to_string()).collect();
    cols.extend((1..=m).map(|k| format!("lambda{k}")));
    cols.extend(last.iter().map(|s| s.to_string()));
    cols
}

fn spectrum_cells(values: &[f64], m: usize) -> Vec<Cell> {
    let mut row: Vec<Cell> = values[..m].iter().map(|&v| Cell::from(v)).collect();
    row.push(Cell::from(values[1] - values[0]));
    row.push(Cell::from(values.get(2).map(|v| v - values[1])));
    row
}

fn wells_sweep(cfg: &RunConfig) -> anyhow::Result<Report> {
    let (n, m) = (cfg.usize("n"), cfg.usize("m"));
    let config = WellConfig::new(n, cfg.real("L"), cfg.real("b"), well(cfg)?)?;
    let lattice = match cfg.text("lattice") {
        "square" => Some(Lattice::Square),
        "triangular" => Some(Lattice::Triangular),
        _ => None,
    };
    let opts = SweepOptions { nodes: cfg.usize("N"), half_width: cfg.opt_real("R"), lattice, solver: solver(cfg) };
    let (lo, hi, steps) = cfg.sweep("h");
    let hs = h_list(lo, hi, steps, PhaseLaw::InverseH);
    let s = gap_sweep(&config, &hs, m, &opts)?;
    let cols = sweep_columns(&["h"], m, &["gap21", "gap32", "theta_fit"]);
    let mut rep = Report { columns: cols, ..Default::default() };
    for row in &s.result.rows {
        let mut cells = vec![Cell::from(row.h)];
        cells.extend(spectrum_cells(&row.values, m));
        cells.push(row.theta_fit.into());
        rep.push(cells);
    }
    rep.notes.push(format!("regime {}; reference rate {}", regime_name(s.regime), s.s_ref));
    if !s.rate_assumption {
        rep.notes.push("2 S_hat_a <= S: rate fit is informational only".into());
    }
    if let Some(fit) = s.result.rate {
        rep.notes.push(format!("fitted rate {} over {} points", fit.s, fit.points));
    }
    crossing_notes(&s.result, &mut rep.notes);
    Ok(rep)
}

fn strip(cfg: &RunConfig) -> anyhow::Result<Report> {
    let m = cfg.usize("m");
    let curve = smoothed_triangle(cfg.real("L"), cfg.real("eps_curv"), cfg.usize("n"))?;
    let fiber = match cfg.text("kind") {
        "step" => FiberConstants::Step(step_constants(cfg.real("theta"), FIBER_TOL)?),
        _ => FiberConstants::Neumann(degennes_constants(FIBER_TOL)?),
    };
    let grid = cfg
        .opt_usize("sigma_nodes")
        .zip(cfg.opt_usize("tau_nodes"))
        .map(|(sigma_nodes, tau_nodes)| StripGrid { sigma_nodes, tau_nodes });
    let opts = StripSweepOptions { grid, crossings: cfg.text("crossings") == "yes", solver: solver(cfg) };
    let (lo, hi, steps) = cfg.sweep("h");
    let hs = h_list(lo, hi, steps, PhaseLaw::InverseSqrtH);
    let s = strip_sweep(&curve, &fiber, &hs, m, &opts)?;
    let cols = sweep_columns(&["h", "sqrt_inv_h"], m, &["gap21", "gap32", "predicted_theta"]);
    let mut rep = Report { columns: cols, ..Default::default() };
    for row in &s.result.rows {
        let mut cells = vec![Cell::from(row.h), Cell::from(row.h.powf(-0.5))];
        cells.extend(spectrum_cells(&row.values, m));
        cells.push(row.theta_fit.into());
        rep.push(cells);
    }
    let a = &s.actions;
    rep.notes.push(format!("S_n {}, flux term {}, gamma0 {}, area {}", a.s_n, a.phi, a.gamma0, curve.area));
    if curve.degenerate {
        rep.notes.push("degenerate wells: constant curvature".into());
    }
    crossing_notes(&s.result, &mut rep.notes);
    Ok(rep)
}

fn predict(cfg: &RunConfig) -> anyhow::Result<Report> {
    let law = if cfg.text("law") == "inverse-sqrt-h" { PhaseLaw::InverseSqrtH } else { PhaseLaw::InverseH };
    let (lo, hi) = cfg.span("h");
    let p = predict_crossings(cfg.real("slope"), cfg.real("alpha0"), lo, hi, law, cfg.usize("n"))?;
    let mut rep = Report::new(&["h", "g", "angle", "branch_a", "branch_b"]);
    for c in &p.crossings {
        let (a, b) = c.angle.pair;
        rep.push(vec![c.h.into(), c.g.into(), c.angle.angle.into(), a.into(), b.into()]);
    }
    Ok(rep)
}
