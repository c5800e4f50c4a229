//! Numerical tolerances and caps, pinned in one place.

/// Relative tolerance for the hermiticity check on built Hamiltonians.
pub const HERMITICITY_REL: f64 = 1e-12;

/// Eigen residual ‖Hv − λv‖ must stay below this times the matrix scale.
pub const EIGEN_RESIDUAL_REL: f64 = 1e-10;

/// Max |V†V − I| entry tolerated for an eigenbasis.
pub const EIGEN_ORTHO_MAX: f64 = 1e-10;

/// Two eigenvalues count as degenerate within this relative spread.
pub const DEGENERACY_REL: f64 = 1e-9;

/// Overlap weights at or below this are dropped from level reports.
pub const OVERLAP_WEIGHT_MIN: f64 = 1e-10;

/// |Φ_hmf| below this makes the relative field contrast undefined.
pub const CONTRAST_DENOM_MIN: f64 = 1e-12;

/// Jacobi sweep convergence: off-diagonal norm relative to ‖A‖_F.
pub const JACOBI_OFF_REL: f64 = 1e-14;

/// Jacobi sweeps before giving up.
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Transition frequencies closer than this (relative to the largest gap)
/// are merged when integrating yields numerically.
pub const GAP_MERGE_REL: f64 = 1e-12;

/// Relative non-uniformity tolerated in a time grid before beat analysis.
pub const UNIFORM_GRID_REL: f64 = 1e-9;

/// Default cap on quadrature nodes for the numerical yield integrator.
pub const ORACLE_DEFAULT_MAX_NODES: u64 = 2_000_000_000;

/// Hilbert-space dimension cap for dense matrices.
pub const DEFAULT_DIM_CAP: usize = 1024;
