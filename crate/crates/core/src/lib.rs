//! Tunnelling, flux-driven eigenvalue braiding and the numerics behind it:
//! one-dimensional band functions, Agmon actions, finite-dimensional
//! reductions, magnetic wells in the plane and boundary strip operators.

pub mod actions;
pub mod error;
pub mod model1d;
pub mod numeric;
pub mod operator;
pub mod reduction;
pub mod sparse;
pub mod strip2d;
pub mod sweep;
pub mod wells2d;

pub use actions::{ActionConstants, RadialWell};
pub use error::{Error, Result};
pub use model1d::{DeGennesConstants, StepConstants};
pub use operator::{lowest_eigs, GridInfo, Lattice, SparseHermitianOperator};
pub use reduction::{BraidPrediction, PhaseLaw, SiteMap};
pub use sparse::{CsrMatrix, Eigs};
pub use strip2d::{ClosedCurve, FiberConstants, StripSweep};
pub use sweep::{Crossing, SolverParams, SweepResult, SweepRow};
pub use wells2d::{WellConfig, WellSweep};
