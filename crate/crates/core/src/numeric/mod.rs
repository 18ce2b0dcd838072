//! Small numerical building blocks shared by the physics modules.

pub mod optimize;
pub mod quad;
pub mod tridiag;
