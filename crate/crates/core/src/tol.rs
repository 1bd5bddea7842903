//! Numeric tolerances shared across the lab.

/// Tolerance for identities expected to hold to accumulated machine
/// precision: normalization of distributions and tables, closed-form vs
/// Born-oracle agreement, reduction and derandomization identities.
pub const EXACT: f64 = 1e-12;

/// Unit-norm and orthogonality tolerance for rays and frames. Inputs
/// violating it are rejected, never repaired.
pub const ORTHO: f64 = 1e-9;

/// Feasibility tolerance for the local-polytope solver. Looser than
/// [`EXACT`] to absorb accumulated pivot round-off.
pub const FEASIBILITY: f64 = 1e-9;
