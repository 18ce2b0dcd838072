//! Sparse Hermitian matrices and a lowest-eigenpair solver.

mod csr;
mod eigs;
mod envelope;
mod order;

pub use csr::CsrMatrix;
pub use eigs::{lowest_eigs, EigOptions, Eigs};
pub use envelope::EnvelopeCholesky;
pub use order::{envelope_size, reverse_cuthill_mckee};
