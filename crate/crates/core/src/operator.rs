//! Discretised Hermitian operators with their grid metadata.

use crate::error::Result;
use crate::reduction::SiteMap;
use crate::sparse::{self, CsrMatrix, EigOptions, Eigs};
use serde::{Deserialize, Serialize};

/// Node layout of a two-dimensional discretisation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Lattice {
    /// `N × N` nodes on `[−R, R]²`.
    Square,
    /// Triangular lattice restricted to the disk of radius `R`.
    Triangular,
}

/// Grid description attached to a [`SparseHermitianOperator`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum GridInfo {
    Box {
        lattice: Lattice,
        half_width: f64,
        nodes_per_side: usize,
        spacing: f64,
        /// Flux `b·area/h` through every elementary cell.
        plaquette_flux: f64,
    },
    Strip {
        sigma_nodes: usize,
        tau_nodes: usize,
        d_sigma: f64,
        d_tau: f64,
        tau_min: f64,
        tau_max: f64,
    },
}

/// A sparse Hermitian matrix together with its grid and, when the
/// discretisation preserves it, the cyclic symmetry `P` of the wells.
#[derive(Debug, Clone)]
pub struct SparseHermitianOperator {
    pub matrix: CsrMatrix,
    pub grid: GridInfo,
    /// Node coordinates (`(σ, τ)` for strips).
    pub points: Vec<[f64; 2]>,
    pub symmetry: Option<SiteMap>,
    /// A value just below the expected lowest eigenvalue, used as the solver
    /// shift.
    pub shift_hint: Option<f64>,
}

impl SparseHermitianOperator {
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }
}

/// The `m` lowest eigenvalues of `op` (ascending), with residuals
/// `‖Av − λv‖ ≤ tol·‖A‖`.
pub fn lowest_eigs(op: &SparseHermitianOperator, m: usize, tol: f64, seed: u64, want_vectors: bool) -> Result<Eigs> {
    let opts = EigOptions { m, tol, seed, shift: op.shift_hint, want_vectors, ..EigOptions::default() };
    sparse::lowest_eigs(&op.matrix, &opts)
}
