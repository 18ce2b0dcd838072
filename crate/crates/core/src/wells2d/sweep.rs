use super::integrals::{ground_state, triangle_flux};
use super::lattice::{default_half_width, discretize, DiscretizeOptions, QuadraticGauge};
use super::WellConfig;
use crate::actions::{action_constants, regime, s_constant, Regime};
use crate::error::{invalid, Result};
use crate::operator::{Lattice, SparseHermitianOperator};
use crate::reduction::PhaseLaw;
use crate::sweep::{run_sweep, SolverParams, SweepPlan, SweepResult};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Discretisation and solver settings of [`gap_sweep`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    /// Nodes per side.
    pub nodes: usize,
    /// Box half-width; `None` uses [`default_half_width`] at each `h`.
    pub half_width: Option<f64>,
    /// `None` picks the triangular lattice for three wells and the square
    /// lattice otherwise.
    pub lattice: Option<Lattice>,
    pub solver: SolverParams,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self { nodes: 256, half_width: None, lattice: None, solver: SolverParams::default() }
    }
}

impl SweepOptions {
    pub fn lattice_for(&self, n: usize) -> Lattice {
        self.lattice.unwrap_or(if n == 3 { Lattice::Triangular } else { Lattice::Square })
    }
}

/// A sweep of the `n`-well operator with its validity flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WellSweep {
    pub result: SweepResult,
    /// Reference rate in `1/h`: `b·S(b⁻²v₀, L)`.
    pub s_ref: f64,
    pub regime: Regime,
    /// Whether `2Ŝ_a > S`; when false the rate fit is informational only.
    pub rate_assumption: bool,
}

/// Operator at `h` with the solver shift placed just below the single-well
/// ground energy.
pub fn well_operator(h: f64, config: &WellConfig, opts: &SweepOptions) -> Result<SparseHermitianOperator> {
    let r = opts.half_width.unwrap_or_else(|| default_half_width(config, h));
    let dopts = DiscretizeOptions { lattice: opts.lattice_for(config.n), gauge: QuadraticGauge::default() };
    let mut op = discretize(h, config, r, opts.nodes, dopts)?;
    let hb = h / config.b;
    let g = ground_state(hb, &config.scaled_well(), config.well.a() + 6.0)?;
    op.shift_hint = Some(config.b * config.b * (g.lambda - 0.05 * hb));
    Ok(op)
}

/// Lowest `m` eigenvalues over a descending `h` list, with the rate fit for
/// two wells and crossings plus the fitted phase law for three.
pub fn gap_sweep(config: &WellConfig, hs: &[f64], m: usize, opts: &SweepOptions) -> Result<WellSweep> {
    if m < config.n {
        return Err(invalid("gap_sweep", format!("m = {m} below n = {}", config.n)));
    }
    let well = config.scaled_well();
    let tol = 1e-10;
    let s_ref = s_constant(&well, config.l, tol)?;
    let acts = action_constants(&well, config.l, tol)?;
    let build = |h: f64| well_operator(h, config, opts);
    // θ advances by 2πΦ/3 per unit of b/h
    let slope = (config.n == 3).then(|| 2.0 * PI * triangle_flux(config.l) * config.b / 3.0);
    let plan = SweepPlan { n: config.n, m, law: PhaseLaw::InverseH, slope, solver: opts.solver, crossings: true, build: &build };
    let result = run_sweep(&plan, hs)?;
    Ok(WellSweep {
        result,
        s_ref: config.b * s_ref,
        regime: regime(well.a(), config.l)?,
        rate_assumption: 2.0 * acts.s_hat_a > s_ref,
    })
}
