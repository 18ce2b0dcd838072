//! Boundary and edge problems: a smoothed triangle, its tunnelling and flux
//! constants, the scaled strip operators along the boundary and sweeps in
//! `h`.

mod boundary;
mod curve;
mod discretize;
mod sweep;

pub use boundary::{boundary_actions, BoundaryActions, FiberConstants};
pub use curve::{smoothed_triangle, ClosedCurve};
pub use discretize::{
    default_eps0, default_grid, discretize_strip, tau_max, StripGrid, StripKind, StripSpec, SIGMA_STEP, TAU_CAP,
    TAU_CELLS_PER_UNIT,
};
pub use sweep::{strip_operator, strip_sweep, StripSweep, StripSweepOptions};
