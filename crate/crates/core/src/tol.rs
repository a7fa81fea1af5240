use serde::{Deserialize, Serialize};

/// Numerical thresholds shared by every module.
///
/// Relative tolerances are scaled by the norm of the matrix they guard.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ToleranceConfig {
    /// Eigendecomposition residuals.
    pub eig: f64,
    /// Matrix exponential and logarithm residuals.
    pub fun: f64,
    /// Symmetry / skew-symmetry checks.
    pub sym: f64,
    /// Full-rank test on `Re(AA*)`: min eigenvalue over max eigenvalue.
    pub rank: f64,
    /// Eigenvalue clustering gap, relative to `max(1, ‖Π‖)`.
    pub cluster: f64,
    /// Nullspace cut, relative to the largest singular value.
    pub null: f64,
    /// Structural-zero threshold for the invariant-subspace graph.
    pub graph: f64,
    /// Relative tolerance when verifying candidate group elements.
    pub verify: f64,
    /// Generic commutation / scalar-matrix tests.
    pub commute: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            eig: 1e-12,
            fun: 1e-12,
            sym: 1e-10,
            rank: 1e-10,
            cluster: 1e-7,
            null: 1e-9,
            graph: 1e-9,
            verify: 1e-8,
            commute: 1e-9,
        }
    }
}
