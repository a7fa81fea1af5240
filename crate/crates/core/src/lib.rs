//! Symmetry groups and exponent sets of operator fractional Brownian motion.
//!
//! Given spectral parameters `(D, A)` the crate computes the symmetry group
//! `G_H = W (∩ G(Π_x) ∩ G(Π_I)) W⁻¹`, classifies it exactly for `n = 2, 3`,
//! derives the exponent set `H + T(G_H)`, and checks the process-level
//! consequences by quadrature and Monte Carlo.

pub mod cli;
pub mod commutant;
pub mod error;
pub mod exponents;
pub mod matfun;
pub mod params;
pub mod process;
pub mod symmetry;
pub mod tol;

pub use error::{Error, Result};
pub use matfun::{ComplexMatrix, RealMatrix};
pub use tol::ToleranceConfig;
