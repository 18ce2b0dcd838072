use super::boundary::{boundary_actions, BoundaryActions, FiberConstants};
use super::curve::ClosedCurve;
use super::discretize::{discretize_strip, StripGrid, StripSpec};
use crate::error::{invalid, Result};
use crate::operator::SparseHermitianOperator;
use crate::reduction::PhaseLaw;
use crate::sweep::{run_sweep, SolverParams, SweepPlan, SweepResult};
use serde::{Deserialize, Serialize};

/// Grid and solver settings of [`strip_sweep`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StripSweepOptions {
    /// Fixed grid for every `h`; `None` uses the default grid at each `h`.
    /// A fixed grid keeps the spectrum smooth in `h`, which dense crossing
    /// scans need.
    pub grid: Option<StripGrid>,
    /// Search for crossings; only meaningful for finely spaced `h`.
    pub crossings: bool,
    pub solver: SolverParams,
}

impl Default for StripSweepOptions {
    fn default() -> Self {
        Self { grid: None, crossings: true, solver: SolverParams::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StripSweep {
    pub result: SweepResult,
    pub actions: BoundaryActions,
    /// Two-term expansion of `λ₁` at each row.
    pub leading: Vec<f64>,
}

impl StripSweep {
    /// `λ₁ − leading order` per row.
    pub fn leading_residuals(&self) -> Vec<f64> {
        self.result.rows.iter().zip(&self.leading).map(|(r, l)| r.values[0] - l).collect()
    }
}

/// Strip operator at `h` with the solver shift just below the two-term
/// expansion of `λ₁`.
pub fn strip_operator(h: f64, curve: &ClosedCurve, fiber: &FiberConstants, grid: Option<StripGrid>) -> Result<SparseHermitianOperator> {
    let mut spec = StripSpec::new(curve.clone(), fiber, h);
    if let Some(g) = grid {
        spec.grid = g;
    }
    let mut op = discretize_strip(&spec)?;
    op.shift_hint = Some(fiber.leading_order(curve.k_max(), h) - 0.02);
    Ok(op)
}

/// Lowest `m` eigenvalues of the strip operator over a descending `h`
/// list, with crossings of the low triple and the phase law
/// `θ = α₀ + (2Φ/3)h^{−1/2}`.
pub fn strip_sweep(curve: &ClosedCurve, fiber: &FiberConstants, hs: &[f64], m: usize, opts: &StripSweepOptions) -> Result<StripSweep> {
    if m < curve.n {
        return Err(invalid("strip_sweep", format!("m = {m} below n = {}", curve.n)));
    }
    let actions = boundary_actions(curve, fiber);
    let build = |h: f64| strip_operator(h, curve, fiber, opts.grid);
    let slope = (curve.n == 3 && actions.phi > 0.0).then_some(2.0 * actions.phi / 3.0);
    let plan = SweepPlan { n: curve.n, m, law: PhaseLaw::InverseSqrtH, slope, solver: opts.solver, crossings: opts.crossings, build: &build };
    let result = run_sweep(&plan, hs)?;
    let leading = hs.iter().map(|&h| fiber.leading_order(curve.k_max(), h)).collect();
    Ok(StripSweep { result, actions, leading })
}
