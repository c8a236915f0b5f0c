//! Poisson geometry of the matrix affine space under its standard quadratic
//! bracket: exact polynomial and rational-function algebra, minors and their
//! brackets, commuting Hamiltonian families built from reduced words and from
//! nested submatrices, and closed-form and numeric integration of their flows.

pub mod error;
pub mod flows;
pub mod gz;
pub mod par;
pub mod poisson;
pub mod polyalg;
pub mod quasiexp;
pub mod sample;
pub mod verify;
pub mod weyl;

pub use error::{Error, Result};
pub use par::Exec;
