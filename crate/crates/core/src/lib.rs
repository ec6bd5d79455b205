//! Minimal dilations and normal measurement models of discrete quantum
//! instruments on finite-dimensional Hilbert spaces, plus a symbolic decision
//! procedure for unitary extendability in the separable infinite case.

pub mod dilation;
pub mod error;
pub mod instruments;
pub mod linalg;
pub mod models;
pub mod observables;
pub mod random;
pub mod simulate;
pub mod symbolic;

pub use error::{Error, Result};
pub use linalg::{CMatrix, CVector, Tolerance};
